"""Scheme registry, operation-count formulas, and the simple generators.

A scheme is a named strategy for emitting a conditional-displacement
sequence that realizes an n x m cluster grid.  Each scheme pairs a
closed-form operation count with a constructive generator; the central
invariant is len(generate(...)) == count(...) wherever the scheme's
divisibility conditions hold.

This module owns the registry, the count formulas, the transition-savings
table, sign normalization, and the generators simple enough to not need
layer machinery (single C-Phase, fused star, naive per-edge, sliding
chains).  Layer-based schemes live in layered.py; the two schemes that
cancel previously built phase live in negative.py.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .algebra import BusOp, OpSequence, Quadrature, accumulate, pair_key
from .targets import GridSpec, TargetGraph, grid_coloring, grid_graph


class DomainError(ValueError):
    """Raised when (n, m) violates a scheme's divisibility conditions."""


class NormalizationError(ValueError):
    """Raised when no per-episode sign flip can make every edge +2."""


# ---------------------------------------------------------------------------
# count formulas


def _count_naive(n: int, m: int) -> Fraction:
    return Fraction(8 * n * m - 4 * n - 4 * m)


def _count_chains(n: int, m: int) -> Fraction:
    return Fraction(4 * n * m)


def _count_stitch_4_1(n: int, m: int) -> Fraction:
    return Fraction(10 * n * m - 4 * n, 3)


def _count_alt_2_4(n: int, m: int) -> Fraction:
    return Fraction(3 * n * m - 2 * n) - Fraction(5 * (m - 2), 4)


def _count_pure_3_3(n: int, m: int) -> Fraction:
    return Fraction(3 * n * m - n)


def _count_hanging_3_3(n: int, m: int) -> Fraction:
    return Fraction(3 * n * m - 2 * n) - Fraction(3 * (m - 2), 2)


def _count_layered_min(n: int, m: int) -> Fraction:
    return Fraction(3 * n * m - 2 * n - m + 2)


def _count_negative_layered(n: int, m: int) -> Fraction:
    return Fraction(3 * n * m - 2 * n - 2 * m + 4)


def _count_negative_wide(n: int, m: int) -> Fraction:
    return Fraction(8 * n * m - 4 * n - 4 * m - 8, 3)


# ---------------------------------------------------------------------------
# generator domains (divisibility plus any structural minimum)


def _dom_any(n: int, m: int) -> bool:
    return n >= 2 and m >= 2


def _dom_stitch_4_1(n: int, m: int) -> bool:
    return n >= 2 and m >= 4 and m % 3 == 1


def _dom_alt_2_4(n: int, m: int) -> bool:
    return n >= 2 and m >= 2 and m % 8 == 2


def _dom_pure_3_3(n: int, m: int) -> bool:
    return n >= 2 and m >= 3 and m % 2 == 1


def _dom_hanging_3_3(n: int, m: int) -> bool:
    return n >= 2 and m >= 2 and m % 4 == 2


def _dom_layered_min(n: int, m: int) -> bool:
    return n >= 2 and m >= 2 and m % 2 == 0


def _dom_negative_layered(n: int, m: int) -> bool:
    # Width-3 transitions need m even; the create-destroy embedding uses
    # rows n-4..n-1 of the first boundary column, hence n >= 4.
    return n >= 4 and m >= 4 and m % 2 == 0


def _wide_canonical(n: int, m: int) -> bool:
    return n % 3 == 0 and m % 3 == 1 and n >= 3 and m >= 4


def _dom_negative_wide(n: int, m: int) -> bool:
    if (n - 2) * (m - 2) < 8:
        return False
    return _wide_canonical(n, m) or _wide_canonical(m, n)


@dataclass(frozen=True)
class SchemeDef:
    """One entry of the scheme registry."""

    name: str
    count: Callable[[int, int], Fraction]
    domain: Callable[[int, int], bool]
    description: str


SCHEMES: dict[str, SchemeDef] = {
    s.name: s
    for s in (
        SchemeDef("naive", _count_naive, _dom_any,
                  "independent 4-op C-Phase per edge"),
        SchemeDef("chains", _count_chains, _dom_any,
                  "sliding chain per row and per column"),
        SchemeDef("stitch_4_1", _count_stitch_4_1, _dom_stitch_4_1,
                  "width-4 layers stitched at shared columns"),
        SchemeDef("alt_2_4", _count_alt_2_4, _dom_alt_2_4,
                  "alternating width-2 boxes and width-4 layers"),
        SchemeDef("pure_3_3", _count_pure_3_3, _dom_pure_3_3,
                  "width-3 layers, no transition savings"),
        SchemeDef("hanging_3_3", _count_hanging_3_3, _dom_hanging_3_3,
                  "width-3 layers exploiting hanging edges"),
        SchemeDef("layered_min", _count_layered_min, _dom_layered_min,
                  "width-3 layers, one dweller per transition"),
        SchemeDef("negative_layered", _count_negative_layered,
                  _dom_negative_layered,
                  "two dwellers per transition, phase cancellation"),
        SchemeDef("negative_wide", _count_negative_wide, _dom_negative_wide,
                  "width-4 blocks joined by 3-column extensions"),
    )
}

RESTRICTED_SCHEMES = (
    "naive", "chains", "stitch_4_1", "alt_2_4",
    "pure_3_3", "hanging_3_3", "layered_min",
)


def count(scheme: str, n: int, m: int, strict: bool = True) -> int:
    """Operation count for a scheme on an n x m grid.

    strict=True additionally requires (n, m) to lie in the generator's
    domain; strict=False only requires the formula itself to be integral,
    which is what the closed-form comparisons need.
    """
    if scheme not in SCHEMES:
        raise KeyError(f"unknown scheme {scheme!r}")
    if n < 2 or m < 2:
        raise DomainError(f"grid {n}x{m} below 2x2 minimum")
    entry = SCHEMES[scheme]
    value = entry.count(n, m)
    if value.denominator != 1:
        raise DomainError(
            f"{scheme} count {value} is not an integer at ({n}, {m})")
    if strict and not entry.domain(n, m):
        raise DomainError(
            f"{scheme} generator does not support ({n}, {m})")
    return int(value)


# ---------------------------------------------------------------------------
# savings between consecutive layers

# (prev_width, next_width, hanging_edge_available) -> (saving, generates).
# hanging_edge_available=None means the row ignores availability.
_TRANSITION_TABLE: dict[tuple[int, int], dict[bool | None, tuple[int, bool]]] = {
    (2, 3): {None: (4, False)},
    (3, 3): {False: (2, True), True: (4, False)},
    (2, 4): {None: (2, True)},
    (4, 2): {False: (2, True), True: (4, False)},
}


def transition_savings(prev_width: int, next_width: int,
                       hanging_edge_available: bool = False,
                       ) -> tuple[int, bool]:
    """Savings and hanging-edge generation for a layer transition.

    Returns (ops_saved, generates_hanging_edge).  Raises KeyError for
    width pairs without a defined transition.
    """
    key = (prev_width, next_width)
    if key not in _TRANSITION_TABLE:
        raise KeyError(f"no transition defined for widths {key}")
    rows = _TRANSITION_TABLE[key]
    if None in rows:
        return rows[None]
    return rows[bool(hanging_edge_available)]


# ---------------------------------------------------------------------------
# episode bookkeeping shared by the generators


def episodes_of(seq: OpSequence) -> list[list[int]]:
    """Group op indices into episodes: maximal attach..detach spans per qubit.

    Each episode is the list of op indices between a qubit becoming active
    (eps residual leaves zero) and returning to zero.  Assumes each qubit's
    ops alternate attach/detach, which every generator here guarantees.
    """
    open_ep: dict[int, list[int]] = {}
    out: list[list[int]] = []
    re = [0] * seq.n_qubits
    im = [0] * seq.n_qubits
    for i, op in enumerate(seq.ops):
        u_re, u_im = op.amplitude
        q = op.qubit
        was = (re[q], im[q]) != (0, 0)
        re[q] += u_re
        im[q] += u_im
        now = (re[q], im[q]) != (0, 0)
        if not was and now:
            open_ep[q] = [i]
        elif was and now:
            open_ep[q].append(i)
        else:
            open_ep[q].append(i)
            out.append(open_ep.pop(q))
    for q, ep in open_ep.items():
        out.append(ep)
    return sorted(out, key=lambda ep: ep[0])


def normalize_signs(seq: OpSequence, graph: TargetGraph) -> OpSequence:
    """Flip episode signs so every realized edge lands at exactly +2 units.

    Flipping an episode negates all of its ops, which preserves closure,
    every blip, and the global phase, while negating the phase of each
    partially-overlapping partner pair.  Solvable whenever the sign
    constraints contain no odd cycle; raises NormalizationError otherwise.
    """
    eps = episodes_of(seq)
    ep_of_op: dict[int, int] = {}
    for e_idx, ep in enumerate(eps):
        for i in ep:
            ep_of_op[i] = e_idx

    led = accumulate(seq, record_history=True)
    # crossings[(e, f)] = signed units between episode pair as generated
    crossings: dict[tuple[int, int], int] = {}
    for step, deltas in enumerate(led.history):
        e = ep_of_op[step]
        for (j, k), d in deltas:
            if j == k:
                continue
            other = seq.ops[step].qubit
            target = j if other == k else k
            # find the target's episode active at this step
            f = None
            for f_idx, ep in enumerate(eps):
                if seq.ops[ep[0]].qubit != target:
                    continue
                if ep[0] <= step and (step <= ep[-1]):
                    f = f_idx
                    break
            if f is None:
                continue
            key = (min(e, f), max(e, f))
            crossings[key] = crossings.get(key, 0) + d

    # Solve flip parities.  Edge pairs must end positive; non-edge pairs
    # whose crossings cancel across two episode pairs (create-destroy)
    # must keep cancelling, which pins the relative flip of the two
    # episodes facing the shared straddler.
    flip = [None] * len(eps)
    adj: dict[int, list[tuple[int, int]]] = {}

    def constrain(e: int, f: int, parity: int) -> None:
        adj.setdefault(e, []).append((f, parity))
        adj.setdefault(f, []).append((e, parity))

    by_pair: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    for (e, f), units in crossings.items():
        if units == 0:
            continue
        qa = seq.ops[eps[e][0]].qubit
        qb = seq.ops[eps[f][0]].qubit
        by_pair.setdefault(pair_key(qa, qb), []).append((e, f, units))
    for (qa, qb), entries in by_pair.items():
        if graph.has_edge(qa, qb):
            for e, f, units in entries:
                constrain(e, f, 1 if units < 0 else 0)
            continue
        if len(entries) == 1:
            continue  # broken non-edge; left for the verifier to report
        shared = set(entries[0][:2])
        for e, f, _ in entries[1:]:
            shared &= {e, f}
        if not shared:
            raise NormalizationError(
                f"non-edge pair ({qa}, {qb}) cancels across episode pairs "
                "with no shared episode; flips cannot preserve it")
        for (e1, f1, _), (e2, f2, _) in zip(entries, entries[1:]):
            x = next(iter(shared))
            other1 = f1 if e1 == x else e1
            other2 = f2 if e2 == x else e2
            constrain(other1, other2, 0)
    for start in range(len(eps)):
        if flip[start] is not None or start not in adj:
            continue
        flip[start] = 0
        stack = [start]
        while stack:
            e = stack.pop()
            for f, parity in adj.get(e, ()):
                need = flip[e] ^ parity
                if flip[f] is None:
                    flip[f] = need
                    stack.append(f)
                elif flip[f] != need:
                    raise NormalizationError(
                        "edge sign constraints contain an odd cycle")
    new_ops = list(seq.ops)
    for e_idx, ep in enumerate(eps):
        if flip[e_idx]:
            for i in ep:
                op = new_ops[i]
                new_ops[i] = BusOp(op.qubit, op.quad, -op.sign)
    return OpSequence(seq.n_qubits, new_ops, sections=list(seq.sections)
                      if seq.sections else None)


# ---------------------------------------------------------------------------
# simple generators


def gen_cphase(q_a: int, q_b: int, coloring: list[Quadrature],
               n_qubits: int | None = None) -> OpSequence:
    """Four-op C-Phase between two opposite-quadrature qubits."""
    if coloring[q_a] is coloring[q_b]:
        raise ValueError(
            f"qubits {q_a} and {q_b} share quadrature {coloring[q_a].value}; "
            "a C-Phase needs opposite quadratures")
    total = n_qubits if n_qubits is not None else max(q_a, q_b) + 1
    ops = [
        BusOp(q_a, coloring[q_a], +1),
        BusOp(q_b, coloring[q_b], +1),
        BusOp(q_a, coloring[q_a], -1),
        BusOp(q_b, coloring[q_b], -1),
    ]
    return OpSequence(total, ops)


def gen_fused_star(center: int, leaves: list[int],
                   coloring: list[Quadrature],
                   n_qubits: int | None = None) -> OpSequence:
    """Star of edges sharing a center, fused into one center excursion.

    Costs 2 + 2*len(leaves) ops instead of 4 per edge: all leaves attach
    while the center is out once.
    """
    if not leaves:
        raise ValueError("star needs at least one leaf")
    for leaf in leaves:
        if coloring[leaf] is coloring[center]:
            raise ValueError(
                f"leaf {leaf} shares the center's quadrature; "
                "star edges need opposite quadratures")
    total = n_qubits if n_qubits is not None else max([center, *leaves]) + 1
    ops = [BusOp(leaf, coloring[leaf], +1) for leaf in leaves]
    ops.append(BusOp(center, coloring[center], -1))
    ops.extend(BusOp(leaf, coloring[leaf], -1) for leaf in leaves)
    ops.append(BusOp(center, coloring[center], +1))
    return OpSequence(total, ops)


def gen_naive(spec: GridSpec) -> OpSequence:
    """One independent C-Phase per grid edge: 8nm - 4n - 4m ops."""
    graph = grid_graph(spec)
    coloring = grid_coloring(spec)
    seq = OpSequence(spec.qubit_count, [])
    for a, b in sorted(graph.edges):
        seq.extend(gen_cphase(a, b, coloring, spec.qubit_count).ops)
        seq.mark_section()
    return seq


def _chain(seq: OpSequence, qubits: list[int],
           coloring: list[Quadrature]) -> None:
    """Sliding chain: entangle consecutive qubits with 2 ops each."""
    signs = [+1] * len(qubits)
    seq.append(BusOp(qubits[0], coloring[qubits[0]], signs[0]))
    for i in range(1, len(qubits)):
        seq.append(BusOp(qubits[i], coloring[qubits[i]], signs[i]))
        prev = qubits[i - 1]
        seq.append(BusOp(prev, coloring[prev], -signs[i - 1]))
    last = qubits[-1]
    seq.append(BusOp(last, coloring[last], -signs[-1]))


def gen_chains(spec: GridSpec) -> OpSequence:
    """Row chains then column chains: 4nm ops total."""
    coloring = grid_coloring(spec)
    seq = OpSequence(spec.qubit_count, [])
    for r in range(spec.n):
        _chain(seq, [spec.index(r, c) for c in range(spec.m)], coloring)
        seq.mark_section()
    for c in range(spec.m):
        _chain(seq, [spec.index(r, c) for r in range(spec.n)], coloring)
        seq.mark_section()
    return seq
