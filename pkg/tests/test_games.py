from __future__ import annotations

import math

import numpy as np
import pytest

from prodnorm.config import Limits, SeesawOptions
from prodnorm.errors import DimensionError, InvalidSpecError, ResourceError
from prodnorm.games import (
    ClassicalGame,
    ProverStrategy,
    VerifierSpec,
    acceptance_probability,
    build_b,
    chsh_game,
    chsh_spec,
    classical_value,
    compile_game,
    embed_strategy,
    game_sop,
    magic_square_column,
    magic_square_game,
    magic_square_row,
    magic_square_spec,
    map_lb,
    norm_consistency,
    random_spec,
    strategy_to_witness,
    verifier_channel,
)
from prodnorm.linalg import Bipartition, is_unitary, random_unit_vector, random_unitary
from prodnorm.restarts import derive_seed, make_rng
from prodnorm.sop import identity_sop, sop_product_norm_lb, sop_value, tensor_product
from prodnorm.strategies import chsh_classical, chsh_optimal, magic_square_optimal

TSIRELSON = math.cos(math.pi / 8) ** 2


def _trivial_spec(accept: bool) -> VerifierSpec:
    eye = np.eye(2, dtype=np.complex128)
    init = np.diag([1.0, 0.0]).astype(np.complex128)
    return VerifierSpec(
        d_v=2, d_m1=1, d_m2=1, v1=eye, v2=eye, pi_init=init, pi_acc=eye if accept else 0 * eye
    )


def test_trivial_specs(fast_opts: SeesawOptions) -> None:
    assert map_lb(_trivial_spec(True), 1, 1, fast_opts).probability == pytest.approx(1.0)
    report = map_lb(_trivial_spec(False), 1, 1, fast_opts)
    assert report.probability == 0.0
    assert report.value == 0.0


def test_spec_validation() -> None:
    eye = np.eye(4, dtype=np.complex128)
    with pytest.raises(InvalidSpecError):
        VerifierSpec(d_v=2, d_m1=2, d_m2=1, v1=2 * eye, v2=eye, pi_init=eye, pi_acc=eye)
    with pytest.raises(InvalidSpecError):
        VerifierSpec(d_v=2, d_m1=2, d_m2=1, v1=eye, v2=eye, pi_init=0.5 * eye, pi_acc=eye)
    with pytest.raises(InvalidSpecError):
        VerifierSpec(d_v=2, d_m1=1, d_m2=1, v1=eye, v2=eye, pi_init=eye, pi_acc=eye)
    with pytest.raises(InvalidSpecError):
        VerifierSpec(d_v=0, d_m1=1, d_m2=1, v1=eye, v2=eye, pi_init=eye, pi_acc=eye)
    with pytest.raises(InvalidSpecError):
        random_spec(1, 2, 2, seed=0)


def test_build_b_composes_projections() -> None:
    spec = random_spec(2, 2, 1, seed=2)
    b1, b2 = build_b(spec)
    assert np.allclose(b1, spec.v1 @ spec.pi_init)
    assert np.allclose(b2, spec.pi_acc @ spec.v2)
    assert np.allclose(b1[:, 1:], 0.0)


def test_spec_matrices_are_read_only() -> None:
    spec = chsh_spec()
    with pytest.raises(ValueError):
        spec.v1[0, 0] = 0.0


def test_strategy_validation() -> None:
    eye = np.eye(4, dtype=np.complex128)
    with pytest.raises(InvalidSpecError):
        ProverStrategy(d_p1=1, d_p2=1, u1=eye, u2=eye, psi=np.ones(4))
    with pytest.raises(InvalidSpecError):
        ProverStrategy(d_p1=3, d_p2=1, u1=eye, u2=eye, psi=np.eye(1, 4).reshape(-1))
    wrong = ProverStrategy(d_p1=1, d_p2=1, u1=eye, u2=eye, psi=np.eye(1, 16).reshape(-1))
    with pytest.raises(DimensionError):
        acceptance_probability(chsh_spec(), wrong)


def test_chsh_classical_value() -> None:
    assert classical_value(chsh_game()) == pytest.approx(0.75, abs=1e-12)


def test_chsh_fixtures() -> None:
    spec = chsh_spec()
    assert (spec.d_v, spec.d_m1, spec.d_m2) == (8, 4, 4)
    assert acceptance_probability(spec, chsh_classical()) == pytest.approx(0.75, abs=1e-9)
    assert acceptance_probability(spec, chsh_optimal()) == pytest.approx(TSIRELSON, abs=1e-9)


def test_chsh_map_without_entanglement(fast_opts: SeesawOptions) -> None:
    report = map_lb(chsh_spec(), 1, 1, fast_opts)
    assert report.probability >= 0.75 - 1e-6


def test_chsh_map_with_entanglement() -> None:
    opts = SeesawOptions(restarts=8, max_iters=500, seed=0)
    report = map_lb(chsh_spec(), 2, 2, opts)
    assert report.probability >= 0.8526
    assert report.probability <= TSIRELSON + 1e-9
    assert report.probability - classical_value(chsh_game()) > 0.09
    assert acceptance_probability(chsh_spec(), report.strategy) == pytest.approx(
        report.probability, abs=1e-9
    )
    assert report.value == pytest.approx(math.sqrt(report.probability), abs=1e-9)


def test_map_history_is_monotone(fast_opts: SeesawOptions) -> None:
    report = map_lb(random_spec(2, 2, 2, seed=3), 2, 2, fast_opts)
    steps = np.diff(np.asarray(report.history))
    assert np.all(steps >= -1e-10)
    assert is_unitary(report.strategy.u1)
    assert is_unitary(report.strategy.u2)


def test_map_rejects_bad_ancilla(fast_opts: SeesawOptions) -> None:
    with pytest.raises(DimensionError):
        map_lb(chsh_spec(), 0, 1, fast_opts)
    with pytest.raises(ResourceError):
        map_lb(chsh_spec(), 2, 2, fast_opts, limits=Limits(state_cap=100))


def test_embed_strategy_keeps_acceptance() -> None:
    spec = chsh_spec()
    grown = embed_strategy(chsh_optimal(), 3, 4)
    assert (grown.d_p1, grown.d_p2) == (3, 4)
    assert acceptance_probability(spec, grown) == pytest.approx(TSIRELSON, abs=1e-9)
    with pytest.raises(DimensionError):
        embed_strategy(chsh_optimal(), 1, 2)


def test_magic_square_rules() -> None:
    for r in range(3):
        for a in range(4):
            assert sum(magic_square_row(r, a)) % 2 == 0
    for c in range(3):
        for b in range(4):
            assert sum(magic_square_column(c, b)) % 2 == 1


def test_magic_square_values() -> None:
    assert classical_value(magic_square_game()) == pytest.approx(8 / 9, abs=1e-12)
    spec = magic_square_spec()
    assert (spec.d_v, spec.d_m1, spec.d_m2) == (18, 12, 12)
    assert acceptance_probability(spec, magic_square_optimal()) == pytest.approx(1.0, abs=1e-9)


def test_magic_square_map_from_warm_start() -> None:
    opts = SeesawOptions(restarts=1, max_iters=3, seed=0)
    report = map_lb(magic_square_spec(), 4, 4, opts, start=magic_square_optimal())
    assert report.probability >= 0.999


def test_magic_square_dense_forms_are_refused() -> None:
    with pytest.raises(ResourceError):
        game_sop(magic_square_spec())
    with pytest.raises(ResourceError):
        magic_square_spec(pad=True)


def test_classical_value_budget_and_trivial_predicate() -> None:
    with pytest.raises(ResourceError):
        classical_value(chsh_game(), Limits(enumeration_budget=2))
    game = ClassicalGame(
        distribution=np.full((2, 3), 1 / 6), predicate=np.ones((2, 3, 2, 2), dtype=bool)
    )
    assert classical_value(game) == pytest.approx(1.0)


def test_classical_game_validation() -> None:
    with pytest.raises(InvalidSpecError):
        ClassicalGame(distribution=np.full((2, 2), 0.3), predicate=np.ones((2, 2, 2, 2)))
    with pytest.raises(InvalidSpecError):
        ClassicalGame(distribution=np.full((2, 2), 0.25), predicate=np.ones((2, 3, 2, 2)))


def test_padded_game_keeps_its_value(fast_opts: SeesawOptions) -> None:
    # single question side, Alice must echo x
    pred = np.zeros((3, 1, 3, 1), dtype=bool)
    for x in range(3):
        pred[x, 0, x, 0] = True
    game = ClassicalGame(distribution=np.full((3, 1), 1 / 3), predicate=pred)
    assert classical_value(game) == pytest.approx(1.0)
    padded = compile_game(game, pad=True)
    assert (padded.d_v, padded.d_m1, padded.d_m2) == (8, 16, 1)
    assert map_lb(padded, 1, 1, fast_opts).probability >= 1.0 - 1e-6


def test_game_sop_matches_channel_with_trivial_ancilla() -> None:
    spec = random_spec(2, 2, 2, seed=4)
    t = game_sop(spec)
    channel = verifier_channel(spec, 1, 1)
    rng = make_rng(12)
    a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    assert np.allclose(t.apply(a), channel.apply(a))


def test_channel_matches_dense_tensor_product() -> None:
    spec = random_spec(2, 2, 2, seed=5)
    dense = tensor_product(game_sop(spec), identity_sop(4, Bipartition(2, 2)), Limits())
    channel = verifier_channel(spec, 2, 2)
    assert channel.dim_in == dense.dim_in
    assert channel.out_part == dense.out_part
    rng = make_rng(6)
    a = rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32))
    assert np.allclose(channel.apply(a), dense.apply(a))
    u, v = random_unit_vector(32, 1), random_unit_vector(32, 2)
    assert np.allclose(channel.apply_rank_one(u, v), dense.apply_rank_one(u, v))
    unitary = random_unitary(16, 3)
    assert np.allclose(channel.coupling(unitary), dense.coupling(unitary))


def test_channel_coupling_identity() -> None:
    spec = random_spec(2, 2, 2, seed=7)
    channel = verifier_channel(spec, 2, 1)
    u, v = random_unit_vector(channel.dim_in, 8), random_unit_vector(channel.dim_in, 9)
    unitary = random_unitary(channel.out_part.dim, 10)
    lhs = np.vdot(v, channel.coupling(unitary) @ u)
    rhs = np.trace(unitary @ channel.apply_rank_one(u, v))
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_strategy_witness_value_is_root_of_acceptance() -> None:
    spec = chsh_spec()
    strat = chsh_optimal()
    witness = strategy_to_witness(spec, strat)
    channel = verifier_channel(spec, 2, 2)
    value = sop_value(channel, witness.u, witness.v, strat.u1, strat.u2)
    assert value**2 == pytest.approx(TSIRELSON, abs=1e-9)


@pytest.mark.parametrize("k", range(5))
def test_acceptance_matches_squared_norm(k: int, fast_opts: SeesawOptions) -> None:
    spec = random_spec(2, 2, 2, derive_seed(77, k))
    report = norm_consistency(spec, 1, fast_opts)
    assert report.witness_gap <= 1e-6
    assert report.gap <= 1e-6
    assert 0.0 <= report.map_value <= 1.0


def test_chsh_consistency_with_entanglement() -> None:
    opts = SeesawOptions(restarts=4, max_iters=400, seed=1)
    report = norm_consistency(chsh_spec(), 2, opts)
    assert report.witness_gap <= 1e-6
    assert report.map_value >= 0.8526


def test_consistency_certificate_dominates_map_witness(fast_opts: SeesawOptions) -> None:
    spec = random_spec(2, 2, 2, derive_seed(77, 0))
    report = norm_consistency(spec, 1, fast_opts)
    cert = report.certificate
    channel = verifier_channel(spec, 1, 1)
    assert sop_value(channel, cert.u, cert.v, cert.u1, cert.u2) ** 2 == pytest.approx(
        report.norm_squared, abs=1e-10
    )
    assert report.norm_squared >= report.map_as_sop - 1e-10
    assert report.gap <= 1e-6


def test_consistency_agrees_after_short_runs() -> None:
    # each seesaw stops well before convergence; alternation closes the gap
    opts = SeesawOptions(restarts=2, max_iters=40, tol=1e-12, seed=3)
    report = norm_consistency(random_spec(2, 2, 2, seed=11), 1, opts)
    assert report.norm_squared >= report.map_value - 1e-10
    assert report.norm_squared >= report.map_as_sop - 1e-10


def test_game_sop_of_trivial_specs(fast_opts: SeesawOptions) -> None:
    t = game_sop(_trivial_spec(True))
    assert (t.dim_in, t.out_part) == (2, Bipartition(1, 1))
    assert sop_product_norm_lb(t, fast_opts).value == pytest.approx(1.0, abs=1e-9)
    assert not np.any(game_sop(_trivial_spec(False)).action)


def test_game_sop_trace_matches_direct_evaluation() -> None:
    spec = random_spec(2, 2, 1, seed=8)
    b1, b2 = build_b(spec)
    x = make_rng(8).standard_normal((spec.dim, spec.dim)).astype(np.complex128)
    assert np.trace(game_sop(spec).apply(x)) == pytest.approx(np.trace(b1 @ x @ b2), abs=1e-10)


def test_map_value_grows_with_the_ancilla(fast_opts: SeesawOptions) -> None:
    spec = random_spec(2, 2, 2, seed=9)
    small = map_lb(spec, 1, 1, fast_opts)
    large = map_lb(spec, 2, 2, fast_opts, start=embed_strategy(small.strategy, 2, 2))
    assert large.probability >= small.probability - 1e-9
    chsh = chsh_spec()
    assert map_lb(chsh, 1, 1, fast_opts).probability == pytest.approx(0.75, abs=1e-6)
    assert map_lb(chsh, 2, 2, fast_opts).probability >= 0.8526


def test_magic_square_map_from_cold_start() -> None:
    report = map_lb(magic_square_spec(), 4, 4, SeesawOptions(restarts=4, seed=0))
    assert report.probability >= 1.0 - 1e-3
