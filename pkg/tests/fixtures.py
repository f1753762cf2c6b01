"""Hand-checked reference sequences shared across the test suite.

Each fixture is a short displacement program whose exact ledger outcome was
worked out by hand from the composition rule; the tests freeze those
outcomes and the oracle re-derives them independently.  Ops are listed in
execution order as (qubit, quadrature, sign) triples.
"""

from qubusc import BusOp, OpSequence, Quadrature

X = Quadrature.POSITION
P = Quadrature.MOMENTUM


def seq(n_qubits: int, triples) -> OpSequence:
    return OpSequence(n_qubits, [BusOp(q, quad, s) for q, quad, s in triples])


# Two-qubit entangler: position qubit 0 against momentum qubit 1.  Closes the
# bus exactly and leaves +2 units (pi/4) on the pair, i.e. basis phases
# (+2, -2, -2, +2) on |00>, |01>, |10>, |11>.
CPHASE_PAIR = seq(2, [(0, X, -1), (1, P, -1), (0, X, +1), (1, P, +1)])
CPHASE_PAIR_UNITS = +2
CPHASE_PAIR_BASIS = (+2, -2, -2, +2)

# Three-qubit star built edge by edge: center 0 in position, leaves 1 and 2
# in momentum, one four-op entangler per edge (eight ops total).
STAR_EDGE_BY_EDGE = seq(
    3,
    [
        (2, P, +1),
        (0, X, -1),
        (2, P, -1),
        (0, X, +1),
        (1, P, +1),
        (0, X, -1),
        (1, P, -1),
        (0, X, +1),
    ],
)

# The same star with the center attached once and both leaves nested inside
# its single dwell: six ops, same ledger.
STAR_FUSED = seq(
    3,
    [
        (2, P, +1),
        (1, P, +1),
        (0, X, -1),
        (2, P, -1),
        (1, P, -1),
        (0, X, +1),
    ],
)
STAR_EDGES = {(0, 1): +2, (0, 2): +2}

# A nested (non-interleaved) attach-detach pair: the phase on (0, 1) rises to
# -1 unit and cancels back to zero, and the ledger closes with no link.
NESTED_NULL = seq(2, [(0, X, -1), (1, P, +1), (1, P, -1), (0, X, +1)])

# Interleaving through an intermediary: qubits 0 and 2 never overlap, yet the
# sequence links them through qubit 1 and leaves 1 completely clean.
RELAY_PAIR = seq(
    3,
    [
        (1, X, -1),
        (2, P, +1),
        (0, X, -1),
        (2, P, -1),
        (1, X, +1),
        (0, X, +1),
    ],
)
RELAY_EDGES = {(0, 2): +2}

# An open pair: qubit 0 is displaced twice in the same direction, so the bus
# stays entangled with it (residual (2, 0)) while the pair still holds -2.
OPEN_PAIR = seq(2, [(1, P, +1), (0, X, +1), (1, P, -1), (0, X, +1)])
OPEN_PAIR_RESIDUAL = {0: (2, 0)}
OPEN_PAIR_UNITS = -2

# Nine-qubit 3 x 3 box in which every qubit touches the bus exactly twice.
# Row-major grid, position on even (r + c), momentum on odd: the coloring
# mirrored relative to the grid default, matching the sequence's quadratures.
BOX_3X3_ALL_TWICE = seq(
    9,
    [
        (5, P, -1),
        (4, X, +1),
        (2, X, +1),
        (1, P, +1),
        (8, X, +1),
        (5, P, +1),
        (2, X, -1),
        (6, X, +1),
        (7, P, +1),
        (8, X, -1),
        (3, P, +1),
        (6, X, -1),
        (4, X, -1),
        (7, P, -1),
        (0, X, -1),
        (3, P, -1),
        (1, P, -1),
        (0, X, +1),
    ],
)
