"""Verifier behavior: ledger checks, oracle replay, and their agreement."""

import random

import pytest

from qubusc import (
    BusLedger,
    BusOp,
    GridSpec,
    OpSequence,
    Quadrature,
    TargetGraph,
    VerificationError,
    OracleLimitError,
    VerifyMode,
    accumulate,
    cross_validate,
    grid_coloring,
    grid_graph,
    oracle_phase_function,
    oracle_verify,
    verify_target,
    walsh_coefficients,
)

from fixtures import (
    BOX_3X3_ALL_TWICE,
    CPHASE_PAIR,
    NESTED_NULL,
    OPEN_PAIR,
    RELAY_PAIR,
    STAR_FUSED,
    seq,
)

X = Quadrature.POSITION
P = Quadrature.MOMENTUM


def test_cphase_pair_verifies_strict():
    g = TargetGraph(2, {(0, 1)})
    report = verify_target(CPHASE_PAIR, g, mode=VerifyMode.STRICT)
    assert report.passed
    assert report.edge_failures == []
    assert report.residual_failures == []
    assert report.interaction_counts == {0: 2, 1: 2}
    assert report.create_destroy_events == []


def test_open_sequence_fails_residual():
    g = TargetGraph(2, {(0, 1)})
    report = verify_target(OPEN_PAIR, g, mode=VerifyMode.MODULAR)
    assert not report.passed
    assert report.residual_failures == [(0, (2, 0))]


def test_missing_edge_reported():
    g = TargetGraph(3, {(0, 1), (0, 2), (1, 2)})
    report = verify_target(STAR_FUSED, g, mode=VerifyMode.STRICT)
    assert not report.passed
    assert report.edge_failures == [((1, 2), 0)]


def test_stray_edge_reported():
    g = TargetGraph(3, {(0, 1)})
    report = verify_target(STAR_FUSED, g, mode=VerifyMode.STRICT)
    assert not report.passed
    assert report.edge_failures == [((0, 2), 2)]


def test_modular_accepts_negative_edge():
    flipped = seq(2, [(0, X, +1), (1, P, -1), (0, X, -1), (1, P, +1)])
    g = TargetGraph(2, {(0, 1)})
    assert accumulate(flipped).pair_phase(0, 1) == -2
    assert verify_target(flipped, g, mode=VerifyMode.MODULAR).passed
    assert verify_target(flipped, g, mode=VerifyMode.STRICT).passed


def test_coloring_violation_flagged():
    g = TargetGraph(2, {(0, 1)})
    coloring = [Quadrature.MOMENTUM, Quadrature.POSITION]
    report = verify_target(CPHASE_PAIR, g, mode=VerifyMode.MODULAR, coloring=coloring)
    assert not report.passed
    assert (0, 0) in report.coloring_failures


def test_boxed_3x3_passes_strict_and_oracle():
    spec = GridSpec(3, 3)
    g = grid_graph(spec)
    report = cross_validate(BOX_3X3_ALL_TWICE, g, mode=VerifyMode.STRICT)
    assert report.passed
    assert all(count == 2 for count in report.interaction_counts.values())
    assert report.create_destroy_events == []
    ledger = accumulate(BOX_3X3_ALL_TWICE)
    assert all(units == 2 for units in ledger.nonzero_pairs().values())


def test_create_destroy_event_detected():
    # Qubit 1 attaches, detaches, and reattaches; qubit 0 dwells across the
    # gap.  The pair phase walks 0 -> 1 -> 2 -> 1 -> 0: one full event.
    program = seq(
        2,
        [
            (1, P, +1),
            (0, X, -1),
            (1, P, -1),
            (1, P, +1),
            (0, X, +1),
            (1, P, -1),
        ],
    )
    g = TargetGraph(2)
    report = verify_target(program, g, mode=VerifyMode.STRICT)
    assert report.passed
    assert len(report.create_destroy_events) == 1
    pair, born, died = report.create_destroy_events[0]
    assert pair == (0, 1)
    assert born == 2 and died == 3
    ledger = accumulate(program)
    assert ledger.pair_phase(0, 1) == 0


def test_blip_is_not_an_event():
    report = verify_target(NESTED_NULL, TargetGraph(2), mode=VerifyMode.STRICT)
    assert report.passed
    assert report.create_destroy_events == []


def test_dwell_spans():
    report = verify_target(RELAY_PAIR, TargetGraph(3, {(0, 2)}), mode=VerifyMode.STRICT)
    assert report.dwell == {1: (0, 4), 2: (1, 3), 0: (2, 5)}


def test_dynamic_flag_requires_sections():
    program = seq(2, [(0, X, -1), (1, P, -1), (0, X, +1), (1, P, +1)])
    report = verify_target(program, TargetGraph(2, {(0, 1)}))
    assert not report.dynamic


def test_dynamic_flag_respects_piece_spans():
    ops = [
        (0, X, -1),
        (1, P, -1),
        (0, X, +1),
        (1, P, +1),
        (2, X, -1),
        (3, P, -1),
        (2, X, +1),
        (3, P, +1),
    ]
    program = seq(4, ops)
    program.sections = [4, 8]
    g = TargetGraph(4, {(0, 1), (2, 3)})
    assert verify_target(program, g).dynamic

    # A qubit spanning from piece 0 to piece 2 defeats the flag.
    ops_wide = (
        [(4, P, -1)]
        + ops[:4]
        + [(2, X, -1), (3, P, -1), (2, X, +1), (3, P, +1)]
        + [(4, P, +1), (5, X, -1), (5, X, +1)]
    )
    wide = seq(6, ops_wide)
    wide.sections = [5, 9, 12]
    g2 = TargetGraph(6, {(0, 1), (2, 3)})
    report = verify_target(wide, g2, mode=VerifyMode.MODULAR)
    assert not report.dynamic


def test_register_size_mismatch():
    with pytest.raises(ValueError, match="register"):
        verify_target(CPHASE_PAIR, TargetGraph(3))


def test_oracle_phases_match_ledger_prediction():
    rng = random.Random(0xACE)
    for _ in range(40):
        n = rng.randint(1, 8)
        ops = []
        for _ in range(rng.randint(0, 30)):
            ops.append(
                BusOp(
                    rng.randrange(n),
                    rng.choice([X, P]),
                    rng.choice([-1, 1]),
                )
            )
        per_qubit: dict[int, list[BusOp]] = {}
        for op in ops:
            per_qubit.setdefault(op.qubit, []).append(op)
        closing = []
        for q, q_ops in per_qubit.items():
            for quad in (X, P):
                total = sum(op.sign for op in q_ops if op.quad is quad)
                closing.extend(BusOp(q, quad, -1 if total > 0 else 1) for _ in range(abs(total)))
        rng.shuffle(closing)
        program = OpSequence(n, ops + closing)
        ledger = accumulate(program)
        assert ledger.is_closed()
        phases = oracle_phase_function(program)
        for _ in range(6):
            idx = rng.randrange(1 << n)
            bits = tuple((idx >> q) & 1 for q in range(n))
            assert phases[idx] == ledger.phase_units(bits)


def test_oracle_rejects_open_sequence():
    with pytest.raises(VerificationError, match="stays displaced"):
        oracle_phase_function(OPEN_PAIR)


def test_oracle_limit():
    big = OpSequence(25, [])
    with pytest.raises(OracleLimitError):
        oracle_phase_function(big)


def test_walsh_recovers_pair_structure():
    phases = oracle_phase_function(STAR_FUSED)
    coeff = walsh_coefficients(phases, 3)
    assert coeff[0] == 0
    assert coeff[0b011] == 2
    assert coeff[0b101] == 2
    assert coeff[0b110] == 0
    for mask in (0b001, 0b010, 0b100, 0b111):
        assert coeff[mask] == 0


def test_oracle_verify_rejects_wrong_target():
    g = TargetGraph(3, {(0, 1)})
    with pytest.raises(VerificationError, match="pair"):
        oracle_verify(STAR_FUSED, g, mode=VerifyMode.STRICT)


def test_cross_validate_agreement():
    g = TargetGraph(3, {(0, 1), (0, 2)})
    report = cross_validate(STAR_FUSED, g, mode=VerifyMode.STRICT)
    assert report.passed
