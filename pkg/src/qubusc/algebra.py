"""Exact integer algebra for conditional-displacement sequences.

Every operation displaces a shared bus mode by one step of size beta along
the position or momentum axis, conditioned on a qubit's Z eigenvalue.  With
beta = sqrt(pi/8), composing displacements via

    D(a) D(b) = exp((a b* - a* b) / 2) D(a + b)

only ever produces interference phases that are integer multiples of pi/8.
Amplitudes are therefore tracked as integer (position, momentum) pairs in
beta units and phases as plain integers in pi/8 units, so bookkeeping is
exact and verification never touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

# One full pi of accumulated phase, in ledger units.
PHASE_UNITS_PER_PI = 8


class Quadrature(Enum):
    """Bus quadrature an operation couples to."""

    POSITION = "x"
    MOMENTUM = "p"

    @property
    def unit(self) -> tuple[int, int]:
        """Displacement direction as an integer (real, imag) pair in beta units."""
        return (1, 0) if self is Quadrature.POSITION else (0, 1)

    @property
    def other(self) -> "Quadrature":
        return Quadrature.MOMENTUM if self is Quadrature.POSITION else Quadrature.POSITION


@dataclass(frozen=True)
class BusOp:
    """One conditional displacement of the bus.

    The displacement amplitude is sign * beta * u conditioned on the qubit's
    Z eigenvalue, where u is 1 for position coupling and i for momentum
    coupling.
    """

    qubit: int
    quad: Quadrature
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"op sign must be +1 or -1, got {self.sign!r}")
        if self.qubit < 0:
            raise ValueError(f"qubit index must be non-negative, got {self.qubit}")

    @property
    def amplitude(self) -> tuple[int, int]:
        """Signed (position, momentum) displacement in beta units."""
        u_re, u_im = self.quad.unit
        return (self.sign * u_re, self.sign * u_im)

    def inverse(self) -> "BusOp":
        return BusOp(self.qubit, self.quad, -self.sign)

    def __repr__(self):
        return f"BusOp({self.qubit}, {self.quad.value}, {self.sign:+d})"


@dataclass
class OpSequence:
    """An ordered conditional-displacement program over a qubit register.

    ``sections`` optionally records the cumulative op counts at which the
    schedule finishes one piece of the target and moves to the next; it is
    metadata only and does not affect the generated state.
    """

    n_qubits: int
    ops: list[BusOp] = field(default_factory=list)
    sections: list[int] | None = None

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("sequence needs at least one qubit")
        self.validate()

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def validate(self) -> None:
        for op in self.ops:
            if op.qubit >= self.n_qubits:
                raise ValueError(
                    f"op on qubit {op.qubit} outside register of {self.n_qubits}"
                )
        if self.sections is not None:
            bounds = list(self.sections)
            if bounds != sorted(bounds) or any(b < 0 for b in bounds):
                raise ValueError(f"section offsets must be sorted: {bounds}")
            if bounds and bounds[-1] != len(self.ops):
                raise ValueError("last section offset must equal the op count")

    def append(self, op: BusOp) -> None:
        if op.qubit >= self.n_qubits:
            raise ValueError(
                f"op on qubit {op.qubit} outside register of {self.n_qubits}"
            )
        self.ops.append(op)

    def extend(self, ops) -> None:
        for op in ops:
            self.append(op)

    def mark_section(self) -> None:
        """Record the current op count as a piece boundary."""
        if self.sections is None:
            self.sections = []
        if not self.sections or self.sections[-1] != len(self.ops):
            self.sections.append(len(self.ops))

    def inverse(self) -> "OpSequence":
        """The exact undo sequence: reversed order, flipped signs."""
        return OpSequence(self.n_qubits, [op.inverse() for op in reversed(self.ops)])

    def qubits_used(self) -> set[int]:
        return {op.qubit for op in self.ops}

    def op_tally(self) -> dict[int, int]:
        tally: dict[int, int] = {}
        for op in self.ops:
            tally[op.qubit] = tally.get(op.qubit, 0) + 1
        return tally


def pair_key(a: int, b: int) -> tuple[int, int]:
    """Canonical dict key for an unordered qubit pair."""
    if a == b:
        raise ValueError(f"pair needs two distinct qubits, got {a} twice")
    return (a, b) if a < b else (b, a)


class BusLedger:
    """Exact accumulator for the bus state and the conditional phase.

    Conditioned on a computational basis state with Z eigenvalues s_j, the
    accumulated bus displacement factors as sum_j s_j r_j with r_j the
    per-qubit residual.  Composing one more op on qubit q with amplitude
    s_q * u adds Im(s_q u * conj(sum_j s_j r_j)) to the phase, which expands
    into a state-independent part (the j = q term, since s_q^2 = 1) and
    s_q s_j cross terms.  Both are tracked as integers in pi/8 units, so the
    total conditional phase is

        pi/8 * (global_units + sum_{j<k} pair_units[j, k] * s_j * s_k).
    """

    def __init__(self, n_qubits: int, record_history: bool = False):
        if n_qubits < 1:
            raise ValueError("ledger needs at least one qubit")
        self.n_qubits = n_qubits
        self.re = [0] * n_qubits
        self.im = [0] * n_qubits
        self.global_units = 0
        self.pair_units: dict[tuple[int, int], int] = {}
        self.steps = 0
        # Per-step pair-phase increments, kept only when asked for; enough to
        # reconstruct every pair's running trajectory without full snapshots.
        self.history: list[list[tuple[tuple[int, int], int]]] | None = (
            [] if record_history else None
        )
        self._active: set[int] = set()

    def copy(self) -> "BusLedger":
        dup = BusLedger(self.n_qubits)
        dup.re = list(self.re)
        dup.im = list(self.im)
        dup.global_units = self.global_units
        dup.pair_units = dict(self.pair_units)
        dup.steps = self.steps
        dup.history = None if self.history is None else [list(h) for h in self.history]
        dup._active = set(self._active)
        return dup

    def apply(self, op: BusOp) -> list[tuple[tuple[int, int], int]]:
        """Compose one op onto the ledger.

        Returns the list of ((j, k), delta) pair-phase increments the op
        caused, for callers that track phase trajectories.
        """
        q = op.qubit
        if q >= self.n_qubits:
            raise ValueError(f"op on qubit {q} outside register of {self.n_qubits}")
        u_re, u_im = op.amplitude
        deltas: list[tuple[tuple[int, int], int]] = []
        for k in self._active:
            # Im(u * conj(r_k)) in pi/8 units; beta^2 = pi/8 absorbs the 1/2
            # from the composition law because the bracket appears twice.
            cross = u_im * self.re[k] - u_re * self.im[k]
            if cross == 0:
                continue
            if k == q:
                self.global_units += cross
            else:
                key = pair_key(q, k)
                self.pair_units[key] = self.pair_units.get(key, 0) + cross
                deltas.append((key, cross))
        self.re[q] += u_re
        self.im[q] += u_im
        if self.re[q] == 0 and self.im[q] == 0:
            self._active.discard(q)
        else:
            self._active.add(q)
        self.steps += 1
        if self.history is not None:
            self.history.append(deltas)
        return deltas

    def apply_all(self, ops) -> None:
        for op in ops:
            self.apply(op)

    @property
    def active_qubits(self) -> set[int]:
        """Qubits whose residual displacement is currently nonzero."""
        return set(self._active)

    def residual(self, q: int) -> tuple[int, int]:
        return (self.re[q], self.im[q])

    def is_closed(self) -> bool:
        """True when every qubit's residual displacement has returned to zero."""
        return not self._active

    def pair_phase(self, a: int, b: int) -> int:
        return self.pair_units.get(pair_key(a, b), 0)

    def nonzero_pairs(self) -> dict[tuple[int, int], int]:
        return {k: v for k, v in self.pair_units.items() if v != 0}

    def phase_units(self, bits) -> int:
        """Total conditional phase in pi/8 units for one basis state.

        ``bits`` holds 0/1 per qubit; the Z eigenvalue is s = 1 - 2*bit.
        """
        total = self.global_units
        for (j, k), units in self.pair_units.items():
            if units:
                s_j = 1 - 2 * bits[j]
                s_k = 1 - 2 * bits[k]
                total += units * s_j * s_k
        return total

    def __eq__(self, other):
        if not isinstance(other, BusLedger):
            return NotImplemented
        return (
            self.n_qubits == other.n_qubits
            and self.re == other.re
            and self.im == other.im
            and self.global_units == other.global_units
            and self.nonzero_pairs() == other.nonzero_pairs()
        )


def compose_step(ledger: BusLedger, op: BusOp) -> BusLedger:
    """Functional form of one composition step: returns a new ledger."""
    out = ledger.copy()
    out.apply(op)
    return out


def accumulate(seq: OpSequence, record_history: bool = False) -> BusLedger:
    """Run a whole sequence through a fresh ledger."""
    ledger = BusLedger(seq.n_qubits, record_history=record_history)
    ledger.apply_all(seq.ops)
    return ledger


def invert(seq: OpSequence) -> OpSequence:
    """Sequence that exactly undoes ``seq``: reversed order, flipped signs."""
    return seq.inverse()


def ledger_equal(a: BusLedger, b: BusLedger, ignore_global: bool = False) -> bool:
    """Exact integer comparison of two ledgers.

    With ``ignore_global`` the state-independent phase is not compared, which
    is the right notion when two schedules should produce the same
    entanglement up to an overall phase.
    """
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"ledger dimensions differ: {a.n_qubits} vs {b.n_qubits}")
    if a.re != b.re or a.im != b.im:
        return False
    if a.nonzero_pairs() != b.nonzero_pairs():
        return False
    return ignore_global or a.global_units == b.global_units
