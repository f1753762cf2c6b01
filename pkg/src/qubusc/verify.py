"""Sequence verification: ledger checks plus an independent basis-state oracle.

Two layers, deliberately redundant:

* Ledger verification replays the sequence through the integer crossing
  algebra and compares accumulated pair phases against a target graph.
  Strict mode demands exactly +-2 units (pi/4) on edges and 0 elsewhere;
  modular mode demands 2 mod 4 on edges and 0 mod 4 elsewhere, i.e. the
  right entangling content up to single-qubit Z rotations and global phase.

* The oracle replays the raw displacements on every computational basis
  state of the register, tracking the exact integer phase and the exact
  accumulated bus displacement per state.  A Walsh decomposition of the
  resulting phase function must be supported on weights 0 and 2 only, and
  its weight-2 coefficients must reproduce the ledger.  Nothing is shared
  with the ledger implementation beyond the displacement composition rule.

Both modes require the bus to disentangle completely: every qubit residual
and every basis-state displacement must vanish.
"""

from __future__ import annotations

import os
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .algebra import BusLedger, OpSequence, pair_key
from .targets import TargetGraph

DEFAULT_ORACLE_MAX_QUBITS = 20


class VerifyMode(Enum):
    STRICT = "strict"
    MODULAR = "modular"


class VerificationError(Exception):
    """A sequence failed an exact check that has no useful partial result."""


class OracleLimitError(VerificationError):
    """The register is too large for basis-state enumeration."""


def oracle_max_qubits() -> int:
    raw = os.environ.get("QUBUS_ORACLE_MAX_QUBITS")
    if raw is None:
        return DEFAULT_ORACLE_MAX_QUBITS
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"QUBUS_ORACLE_MAX_QUBITS must be an integer, got {raw!r}")


@dataclass
class VerifyReport:
    """Outcome of ledger verification against a target graph."""

    passed: bool
    mode: VerifyMode
    edge_failures: list[tuple[tuple[int, int], int]] = field(default_factory=list)
    residual_failures: list[tuple[int, tuple[int, int]]] = field(default_factory=list)
    coloring_failures: list[tuple[int, int]] = field(default_factory=list)
    interaction_counts: dict[int, int] = field(default_factory=dict)
    create_destroy_events: list[tuple[tuple[int, int], int, int]] = field(default_factory=list)
    dwell: dict[int, tuple[int, int]] = field(default_factory=dict)
    dynamic: bool = False

    def summary(self) -> str:
        lines = [f"mode={self.mode.value} passed={self.passed} dynamic={self.dynamic}"]
        if self.edge_failures:
            lines.append(f"edge failures ({len(self.edge_failures)}):")
            for pair, units in self.edge_failures[:20]:
                lines.append(f"  {pair}: {units} units")
            if len(self.edge_failures) > 20:
                lines.append(f"  ... {len(self.edge_failures) - 20} more")
        if self.residual_failures:
            lines.append(f"residual failures ({len(self.residual_failures)}):")
            for q, res in self.residual_failures[:20]:
                lines.append(f"  qubit {q}: residual {res}")
        if self.coloring_failures:
            lines.append(f"coloring failures ({len(self.coloring_failures)}):")
            for q, step in self.coloring_failures[:20]:
                lines.append(f"  qubit {q} at step {step}")
        lines.append(f"create-destroy events: {len(self.create_destroy_events)}")
        for pair, born, died in self.create_destroy_events:
            lines.append(f"  {pair}: created step {born}, destroyed step {died}")
        return "\n".join(lines)


def _phase_ok(units: int, is_edge: bool, mode: VerifyMode) -> bool:
    if mode is VerifyMode.STRICT:
        return abs(units) == 2 if is_edge else units == 0
    return units % 4 == (2 if is_edge else 0)


def _magnitude_class(units: int) -> int:
    # 0..1 units: sub-link transient; 2..3: one link; 4..5: two; and so on.
    return abs(units) // 2


def _scan_events(
    history: list[list[tuple[tuple[int, int], int]]],
) -> list[tuple[tuple[int, int], int, int]]:
    """Find pairs whose phase reached link strength and later lost a class."""
    running: dict[tuple[int, int], int] = {}
    peak: dict[tuple[int, int], int] = {}
    born: dict[tuple[int, int], int] = {}
    events = []
    for step, deltas in enumerate(history):
        for pair, delta in deltas:
            units = running.get(pair, 0) + delta
            running[pair] = units
            cls = _magnitude_class(units)
            top = peak.get(pair, 0)
            if cls > top:
                peak[pair] = cls
                if top == 0:
                    born[pair] = step
            elif cls < top:
                events.append((pair, born[pair], step))
                peak[pair] = cls
                if cls > 0:
                    born[pair] = step
    return sorted(events, key=lambda e: (e[2], e[1], e[0]))


def _dwell_and_dynamic(
    seq: OpSequence,
) -> tuple[dict[int, tuple[int, int]], bool]:
    dwell: dict[int, tuple[int, int]] = {}
    for step, op in enumerate(seq.ops):
        if op.qubit in dwell:
            dwell[op.qubit] = (dwell[op.qubit][0], step)
        else:
            dwell[op.qubit] = (step, step)
    sections = seq.sections
    if not sections or len(sections) < 2:
        return dwell, False
    dynamic = True
    for attach, release in dwell.values():
        if bisect_right(sections, release) > bisect_right(sections, attach) + 1:
            dynamic = False
            break
    return dwell, dynamic


def verify_target(
    seq: OpSequence,
    graph: TargetGraph,
    mode: VerifyMode = VerifyMode.STRICT,
    coloring=None,
) -> VerifyReport:
    """Ledger-verify a sequence against a target graph.

    With a coloring given, every op must address its qubit's assigned
    quadrature.  Create-destroy events and dwell spans are always reported;
    they inform but never fail the check.
    """
    seq.validate()
    if seq.n_qubits != graph.qubit_count:
        raise ValueError(
            f"sequence register {seq.n_qubits} != target register {graph.qubit_count}"
        )
    coloring_failures = []
    if coloring is not None:
        for step, op in enumerate(seq.ops):
            if op.quad is not coloring[op.qubit]:
                coloring_failures.append((op.qubit, step))

    ledger = BusLedger(seq.n_qubits, record_history=True)
    ledger.apply_all(seq.ops)

    residual_failures = [
        (q, ledger.residual(q))
        for q in range(seq.n_qubits)
        if ledger.residual(q) != (0, 0)
    ]

    edge_failures = []
    seen = set(ledger.nonzero_pairs())
    for pair in sorted(graph.edges | seen):
        units = ledger.pair_phase(*pair)
        if not _phase_ok(units, pair in graph.edges, mode):
            edge_failures.append((pair, units))

    assert ledger.history is not None
    events = _scan_events(ledger.history)
    dwell, dynamic = _dwell_and_dynamic(seq)

    passed = not edge_failures and not residual_failures and not coloring_failures
    return VerifyReport(
        passed=passed,
        mode=mode,
        edge_failures=edge_failures,
        residual_failures=residual_failures,
        coloring_failures=coloring_failures,
        interaction_counts=seq.op_tally(),
        create_destroy_events=events,
        dwell=dwell,
        dynamic=dynamic,
    )


def oracle_phase_function(seq: OpSequence, limit: int | None = None) -> np.ndarray:
    """Replay the raw displacements on every basis state.

    Returns the integer phase (pi/8 units) acquired by each of the 2**n
    computational basis states.  Raises if any basis state leaves the bus
    displaced, naming the offending bitstring: such a sequence entangles
    the register with the bus and has no phase-function description.
    """
    seq.validate()
    n = seq.n_qubits
    cap = limit if limit is not None else oracle_max_qubits()
    if n > cap:
        raise OracleLimitError(
            f"register of {n} qubits exceeds oracle limit {cap} "
            f"(set QUBUS_ORACLE_MAX_QUBITS to override)"
        )
    size = 1 << n
    idx = np.arange(size, dtype=np.int64)
    sign = [np.where((idx >> q) & 1 == 0, 1, -1).astype(np.int64) for q in range(n)]
    phase = np.zeros(size, dtype=np.int64)
    acc_re = np.zeros(size, dtype=np.int64)
    acc_im = np.zeros(size, dtype=np.int64)
    for op in seq.ops:
        u_re, u_im = op.amplitude
        s = sign[op.qubit]
        c_re = u_re * s
        c_im = u_im * s
        phase += c_im * acc_re - c_re * acc_im
        acc_re += c_re
        acc_im += c_im
    bad = np.nonzero(acc_re | acc_im)[0]
    if bad.size:
        b = int(bad[0])
        bits = format(b, f"0{n}b")[::-1]
        raise VerificationError(
            f"bus stays displaced on basis state |{bits}> (qubit 0 leftmost): "
            f"residual ({int(acc_re[b])}, {int(acc_im[b])}) beta units"
        )
    return phase


def walsh_coefficients(phase: np.ndarray, n_qubits: int) -> np.ndarray:
    """Exact integer Walsh decomposition of a basis-state phase function.

    Entry S holds the coefficient of prod_{q in S} (-1)**(bit q); the input
    must satisfy phase = sum_S coeff[S] * chi_S exactly, which holds for any
    displacement sequence because each crossing contributes a constant or a
    two-qubit character.  Raises if any coefficient is not an integer.
    """
    size = 1 << n_qubits
    if phase.shape != (size,):
        raise ValueError(f"phase function must have 2**{n_qubits} entries")
    h = phase.astype(np.int64).copy()
    step = 1
    while step < size:
        h = h.reshape(-1, 2, step)
        top = h[:, 0, :] + h[:, 1, :]
        bottom = h[:, 0, :] - h[:, 1, :]
        h[:, 0, :] = top
        h[:, 1, :] = bottom
        h = h.reshape(size)
        step <<= 1
    if np.any(h % size):
        bad = int(np.nonzero(h % size)[0][0])
        raise VerificationError(f"phase function is not integral on mask {bad:#x}")
    return h // size


def _mask_weights(n_qubits: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    w = np.zeros(1 << n_qubits, dtype=np.int64)
    for q in range(n_qubits):
        w += (idx >> q) & 1
    return w


def oracle_verify(
    seq: OpSequence,
    graph: TargetGraph,
    mode: VerifyMode = VerifyMode.STRICT,
    limit: int | None = None,
) -> dict[tuple[int, int], int]:
    """Full basis-state verification against a target graph.

    Enumerates all basis states, Walsh-decomposes the phase function, and
    demands: no support above weight 2, zero weight-1 support, and weight-2
    coefficients matching the target under the given mode.  Returns the
    oracle's pair phases for cross-validation against the ledger.
    """
    phase = oracle_phase_function(seq, limit=limit)
    n = seq.n_qubits
    coeff = walsh_coefficients(phase, n)
    weights = _mask_weights(n)
    heavy = np.nonzero((weights > 2) & (coeff != 0))[0]
    if heavy.size:
        raise VerificationError(
            f"phase function has weight-{int(weights[heavy[0]])} support "
            f"on mask {int(heavy[0]):#x}: not a pairwise interaction pattern"
        )
    linear = np.nonzero((weights == 1) & (coeff != 0))[0]
    if linear.size:
        q = int(np.log2(int(linear[0])))
        raise VerificationError(f"phase function has single-qubit support on qubit {q}")
    pair_phases: dict[tuple[int, int], int] = {}
    masks = np.nonzero(weights == 2)[0]
    for mask in masks:
        units = int(coeff[mask])
        bits = [q for q in range(n) if (int(mask) >> q) & 1]
        pair = pair_key(bits[0], bits[1])
        if units:
            pair_phases[pair] = units
        if not _phase_ok(units, pair in graph.edges, mode):
            raise VerificationError(
                f"oracle pair {pair} carries {units} units, "
                f"invalid for {'edge' if pair in graph.edges else 'non-edge'} in {mode.value} mode"
            )
    return pair_phases


def cross_validate(
    seq: OpSequence,
    graph: TargetGraph,
    mode: VerifyMode = VerifyMode.STRICT,
    coloring=None,
    limit: int | None = None,
) -> VerifyReport:
    """Run ledger and oracle verification and insist they agree exactly.

    The ledger report is returned; any disagreement between the two layers
    raises, since it would mean the fast algebra and the brute-force replay
    disagree about the same physics.
    """
    report = verify_target(seq, graph, mode=mode, coloring=coloring)
    if not report.passed:
        raise VerificationError("ledger verification failed:\n" + report.summary())
    oracle_pairs = oracle_verify(seq, graph, mode=mode, limit=limit)
    ledger = BusLedger(seq.n_qubits)
    ledger.apply_all(seq.ops)
    ledger_pairs = dict(ledger.nonzero_pairs())
    if oracle_pairs != ledger_pairs:
        only_oracle = set(oracle_pairs) - set(ledger_pairs)
        only_ledger = set(ledger_pairs) - set(oracle_pairs)
        raise VerificationError(
            f"ledger and oracle disagree: oracle-only {sorted(only_oracle)}, "
            f"ledger-only {sorted(only_ledger)}, "
            f"mismatched {[p for p in oracle_pairs if ledger_pairs.get(p) != oracle_pairs[p]]}"
        )
    return report
