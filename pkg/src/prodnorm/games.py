"""Two-prover one-round quantum protocols.

Registers are ordered V⊗M₁⊗M₂⊗P₁⊗P₂ everywhere. The verifier applies
B₁ = V₁Π_init, the provers apply U₁ on M₁⊗P₁ and U₂ on M₂⊗P₂, and the
verifier accepts on B₂ = Π_accV₂. The maximum acceptance probability over
prover strategies equals the squared superoperator product norm of
T⊗I_{P₁⊗P₂} with T(X) = Tr_V(B₁XB₂); `map_lb` works on the probability side,
`VerifierChannel` on the norm side, and `norm_consistency` ties them.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from .config import Limits, SeesawOptions, resolve_limits
from .constants import (
    CONSISTENCY_ROUNDS,
    CONSISTENCY_TOL,
    ERR_DISTRIBUTION,
    ERR_ENUMERATION,
    ERR_POSITIVE,
    ERR_PREDICATE_SHAPE,
    ERR_RANDOM_SPEC,
    ERR_SHAPE_MISMATCH,
    ERR_SPEC_DIMS,
    ERR_SPEC_PROJECTOR,
    ERR_SPEC_UNITARY,
    ERR_STRATEGY_NORM,
    ERR_STRATEGY_UNITARY,
    PROBABILITY_SLACK,
    UNITARY_ATOL,
)
from .errors import DimensionError, InvalidSpecError, ResourceError
from .linalg import (
    Bipartition,
    ComplexMatrix,
    as_matrix,
    as_vector,
    is_projector,
    is_unitary,
    polar_maximizer,
    projector_range,
    random_unitary,
    svd,
)
from .restarts import best_of, derive_seed, run_restarts
from .sop import (
    SopNormCertificate,
    SopStart,
    Superoperator,
    sop_product_norm_lb,
    sop_value,
)

logger = logging.getLogger(__name__)


def _frozen(a: npt.ArrayLike) -> ComplexMatrix:
    m = np.array(a, dtype=np.complex128)
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class VerifierSpec:
    d_v: int
    d_m1: int
    d_m2: int
    v1: ComplexMatrix
    v2: ComplexMatrix
    pi_init: ComplexMatrix
    pi_acc: ComplexMatrix

    def __post_init__(self) -> None:
        for name in ("d_v", "d_m1", "d_m2"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise InvalidSpecError(ERR_POSITIVE.format(name=name, value=value))
        dim = self.dim
        for name in ("v1", "v2", "pi_init", "pi_acc"):
            m = _frozen(getattr(self, name))
            if m.shape != (dim, dim):
                raise InvalidSpecError(ERR_SPEC_DIMS.format(name=name, shape=m.shape, dim=dim))
            object.__setattr__(self, name, m)
        for name in ("v1", "v2"):
            if not is_unitary(getattr(self, name)):
                raise InvalidSpecError(ERR_SPEC_UNITARY.format(name=name, atol=UNITARY_ATOL))
        for name in ("pi_init", "pi_acc"):
            if not is_projector(getattr(self, name)):
                raise InvalidSpecError(
                    ERR_SPEC_PROJECTOR.format(name=name, atol=UNITARY_ATOL)
                )

    @property
    def dim(self) -> int:
        return self.d_v * self.d_m1 * self.d_m2


@dataclass(frozen=True, eq=False)
class ProverStrategy:
    d_p1: int
    d_p2: int
    u1: ComplexMatrix
    u2: ComplexMatrix
    psi: ComplexMatrix

    def __post_init__(self) -> None:
        for name in ("d_p1", "d_p2"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise InvalidSpecError(ERR_POSITIVE.format(name=name, value=value))
        for name, d_p in (("u1", self.d_p1), ("u2", self.d_p2)):
            u = _frozen(getattr(self, name))
            if not is_unitary(u) or u.shape[0] % d_p:
                raise InvalidSpecError(ERR_STRATEGY_UNITARY.format(name=name, atol=UNITARY_ATOL))
            object.__setattr__(self, name, u)
        psi = _frozen(as_vector(self.psi))
        norm = float(np.linalg.norm(psi))
        if abs(norm - 1.0) > UNITARY_ATOL:
            raise InvalidSpecError(ERR_STRATEGY_NORM.format(norm=norm))
        object.__setattr__(self, "psi", psi)

    @property
    def d_m1(self) -> int:
        return self.u1.shape[0] // self.d_p1

    @property
    def d_m2(self) -> int:
        return self.u2.shape[0] // self.d_p2


@dataclass(frozen=True)
class GameValueReport:
    probability: float
    norm_value: float
    strategy: ProverStrategy
    converged: bool
    restart_index: int
    iterations: int
    history: tuple[float, ...] = ()

    @property
    def value(self) -> float:
        return self.norm_value


@dataclass(frozen=True, eq=False)
class ClassicalGame:
    """Nonlocal game: distribution π over (x, y) and a predicate over (x, y, a, b)."""

    distribution: npt.NDArray[np.float64]
    predicate: npt.NDArray[np.bool_]

    def __post_init__(self) -> None:
        dist = np.array(self.distribution, dtype=np.float64)
        pred = np.array(self.predicate, dtype=bool)
        if dist.ndim != 2 or pred.ndim != 4 or pred.shape[:2] != dist.shape:
            raise InvalidSpecError(
                ERR_PREDICATE_SHAPE.format(shape=pred.shape, expected=(*dist.shape, "nA", "nB"))
            )
        total = float(dist.sum())
        if np.any(dist < 0) or abs(total - 1.0) > 1e-12:
            raise InvalidSpecError(ERR_DISTRIBUTION.format(total=total))
        dist.setflags(write=False)
        pred.setflags(write=False)
        object.__setattr__(self, "distribution", dist)
        object.__setattr__(self, "predicate", pred)

    @property
    def question_counts(self) -> tuple[int, int]:
        return int(self.distribution.shape[0]), int(self.distribution.shape[1])

    @property
    def answer_counts(self) -> tuple[int, int]:
        return int(self.predicate.shape[2]), int(self.predicate.shape[3])


@dataclass(frozen=True)
class ConsistencyReport:
    """Both sides of the acceptance/norm identity plus cross-evaluated witnesses.

    ``map_as_sop`` is the squared sop value of the map strategy turned into a
    rank-one witness; ``sop_as_map`` is the acceptance probability of the sop
    certificate turned into a strategy.
    """

    map_value: float
    norm_squared: float
    map_as_sop: float
    sop_as_map: float
    map_report: GameValueReport = field(repr=False)
    certificate: SopNormCertificate = field(repr=False)

    @property
    def witness_gap(self) -> float:
        return max(
            abs(self.map_value - self.map_as_sop), abs(self.norm_squared - self.sop_as_map)
        )

    @property
    def gap(self) -> float:
        return abs(self.map_value - self.norm_squared)


def build_b(spec: VerifierSpec) -> tuple[ComplexMatrix, ComplexMatrix]:
    """B₁ = V₁Π_init and B₂ = Π_accV₂."""
    return spec.v1 @ spec.pi_init, spec.pi_acc @ spec.v2


def _clamp(p: float) -> float:
    if p < -PROBABILITY_SLACK or p > 1.0 + PROBABILITY_SLACK:
        logger.warning("probability %.12g outside [0, 1], clamping", p)
    return min(1.0, max(0.0, p))


def _apply_provers(
    state: ComplexMatrix,
    spec: VerifierSpec,
    u1: ComplexMatrix,
    u2: ComplexMatrix,
    d_p1: int,
    d_p2: int,
) -> ComplexMatrix:
    # state rows are V⊗M₁⊗M₂⊗P₁⊗P₂, trailing axis is carried along
    k = state.shape[-1]
    s = state.reshape(spec.d_v, spec.d_m1, spec.d_m2, d_p1, d_p2, k)
    t1 = u1.reshape(spec.d_m1, d_p1, spec.d_m1, d_p1)
    t2 = u2.reshape(spec.d_m2, d_p2, spec.d_m2, d_p2)
    out = np.einsum("abmx,ceny,vmnxyk->vacbek", t1, t2, s, optimize=True)
    return out.reshape(-1, k)


def _check_strategy(spec: VerifierSpec, strat: ProverStrategy) -> None:
    expected = (
        spec.d_m1 * strat.d_p1,
        spec.d_m2 * strat.d_p2,
        spec.dim * strat.d_p1 * strat.d_p2,
    )
    actual = (strat.u1.shape[0], strat.u2.shape[0], strat.psi.size)
    if actual != expected:
        raise DimensionError(ERR_SHAPE_MISMATCH.format(left=actual, right=expected))


def acceptance_probability(spec: VerifierSpec, strat: ProverStrategy) -> float:
    """‖(B₂⊗I)(I_V⊗U₁⊗U₂)(B₁⊗I)|ψ⟩‖², clamped to [0, 1]."""
    _check_strategy(spec, strat)
    final = _final_state(spec, strat)
    return _clamp(float(np.vdot(final, final).real))


def _final_state(spec: VerifierSpec, strat: ProverStrategy) -> ComplexMatrix:
    x = strat.psi.reshape(spec.dim, strat.d_p1 * strat.d_p2)
    x = spec.v1 @ (spec.pi_init @ x)
    x = _apply_provers(x.reshape(-1, 1), spec, strat.u1, strat.u2, strat.d_p1, strat.d_p2)
    x = x.reshape(spec.dim, -1)
    return (spec.pi_acc @ (spec.v2 @ x)).reshape(-1)


def game_sop(spec: VerifierSpec, limits: Limits | None = None) -> Superoperator:
    """T(X) = Tr_V(B₁XB₂) on L(V⊗M₁⊗M₂), output split (M₁, M₂)."""
    limits = resolve_limits(limits)
    n = spec.dim
    d_out = spec.d_m1 * spec.d_m2
    limits.check_dim("superoperator input dimension", n)
    limits.check_dim("superoperator output dimension", d_out)
    limits.check_dense(n * n, d_out * d_out)
    b1, b2 = build_b(spec)
    left = b1.reshape(spec.d_v, d_out, n)
    right = b2.reshape(n, spec.d_v, d_out)
    action = np.einsum("vxi,jvy->ijxy", left, right, optimize=True)
    return Superoperator(
        dim_in=n,
        out_part=Bipartition(spec.d_m1, spec.d_m2),
        action=action.reshape(n * n, d_out, d_out),
    )


class VerifierChannel:
    """Matrix-free T⊗I_{P₁⊗P₂} of a verifier.

    Input is V⊗M₁⊗M₂⊗P₁⊗P₂, output is split (M₁⊗P₁, M₂⊗P₂). Agrees with
    ``tensor_product(game_sop(spec), identity_sop(dP1·dP2, (dP1, dP2)))``
    without ever forming the dim_in² images.
    """

    def __init__(
        self, spec: VerifierSpec, d_p1: int, d_p2: int, limits: Limits | None = None
    ) -> None:
        limits = resolve_limits(limits)
        if d_p1 < 1 or d_p2 < 1:
            raise DimensionError(ERR_POSITIVE.format(name="dP", value=min(d_p1, d_p2)))
        limits.check_dim("prover register M1xP1", spec.d_m1 * d_p1)
        limits.check_dim("prover register M2xP2", spec.d_m2 * d_p2)
        limits.check_state("protocol state dimension", spec.dim * d_p1 * d_p2)
        self.spec = spec
        self.d_p1 = d_p1
        self.d_p2 = d_p2
        self.limits = limits
        self.b1, self.b2 = build_b(spec)
        self.dim_in = spec.dim * d_p1 * d_p2
        self.out_part = Bipartition(spec.d_m1 * d_p1, spec.d_m2 * d_p2)

    def _registers(self, x: ComplexMatrix) -> ComplexMatrix:
        s = self.spec
        t = x.reshape(s.d_v, s.d_m1, s.d_m2, self.d_p1, self.d_p2)
        return t.transpose(0, 1, 3, 2, 4).reshape(s.d_v, self.out_part.d1, self.out_part.d2)

    def _left(self, u: ComplexMatrix) -> ComplexMatrix:
        x = as_vector(u).reshape(self.spec.dim, -1)
        return self._registers(self.b1 @ x)

    def _right(self, v: ComplexMatrix) -> ComplexMatrix:
        x = as_vector(v).reshape(self.spec.dim, -1)
        return self._registers(self.b2.conj().T @ x)

    def apply_rank_one(self, u: ComplexMatrix, v: ComplexMatrix) -> ComplexMatrix:
        a, b = self._left(u), self._right(v)
        d = self.out_part.dim
        self.limits.check_dense(d, d)
        return np.einsum("vxy,vXY->xyXY", a, b.conj()).reshape(d, d)

    def apply(self, a: ComplexMatrix) -> ComplexMatrix:
        a = as_matrix(a)
        n, s = self.dim_in, self.spec
        if a.shape != (n, n):
            raise DimensionError(ERR_SHAPE_MISMATCH.format(left=a.shape, right=(n, n)))
        self.limits.check_dense(n, n)
        d_p = self.d_p1 * self.d_p2
        x = a.reshape(s.dim, d_p, s.dim, d_p)
        y = np.einsum("ai,ipjq,jb->apbq", self.b1, x, self.b2, optimize=True)
        y = y.reshape(
            s.d_v, s.d_m1, s.d_m2, self.d_p1, self.d_p2,
            s.d_v, s.d_m1, s.d_m2, self.d_p1, self.d_p2,
        )
        out = np.einsum("vabcevxyzw->acbexzyw", y)
        d = self.out_part.dim
        return out.reshape(d, d)

    def coupling(self, unitary: ComplexMatrix) -> ComplexMatrix:
        """K[r,c] = ⟨r|(B₂⊗I)(I_V⊗U)(B₁⊗I)|c⟩ with U on (M₁⊗P₁)⊗(M₂⊗P₂)."""
        s = self.spec
        n = self.dim_in
        self.limits.check_dense(n, n)
        left = self.b1.reshape(s.d_v, s.d_m1, s.d_m2, s.dim)
        right = self.b2.reshape(s.dim, s.d_v, s.d_m1, s.d_m2)
        u8 = unitary.reshape(
            s.d_m1, self.d_p1, s.d_m2, self.d_p2, s.d_m1, self.d_p1, s.d_m2, self.d_p2
        )
        k = np.einsum("jvac,abcempnq,vmni->jbeipq", right, u8, left, optimize=True)
        return k.reshape(n, n)


def verifier_channel(
    spec: VerifierSpec, d_p1: int, d_p2: int, limits: Limits | None = None
) -> VerifierChannel:
    return VerifierChannel(spec, d_p1, d_p2, limits)


def _strategy_start(
    start: ProverStrategy | int | None, spec: VerifierSpec, d_p1: int, d_p2: int
) -> tuple[ComplexMatrix, ComplexMatrix]:
    n1, n2 = spec.d_m1 * d_p1, spec.d_m2 * d_p2
    if isinstance(start, ProverStrategy):
        return np.array(start.u1), np.array(start.u2)
    if start is None:
        return np.eye(n1, dtype=np.complex128), np.eye(n2, dtype=np.complex128)
    return random_unitary(n1, derive_seed(start, 1)), random_unitary(n2, derive_seed(start, 2))


def map_lb(
    spec: VerifierSpec,
    d_p1: int,
    d_p2: int,
    opts: SeesawOptions | None = None,
    start: ProverStrategy | None = None,
    limits: Limits | None = None,
) -> GameValueReport:
    """Seesaw lower bound on the maximum acceptance probability with ancillas dP1, dP2.

    Each iteration takes the optimal |ψ⟩ (top singular vector) for fixed
    unitaries, then updates U₁ and U₂ by polar maximizers of the reduced
    coupling matrices. ``start`` contributes its unitaries as restart 0;
    restart ``start is not None`` is the identity start, the rest are Haar
    random.
    """
    opts = opts or SeesawOptions()
    limits = resolve_limits(limits)
    if d_p1 < 1 or d_p2 < 1:
        raise DimensionError(ERR_POSITIVE.format(name="dP", value=min(d_p1, d_p2)))
    limits.check_dim("prover register M1xP1", spec.d_m1 * d_p1)
    limits.check_dim("prover register M2xP2", spec.d_m2 * d_p2)
    limits.check_state("protocol state dimension", spec.dim * d_p1 * d_p2)
    if start is not None:
        _check_strategy(spec, start)

    d_p = d_p1 * d_p2
    p_init = projector_range(spec.pi_init)
    q_acc = projector_range(spec.pi_acc)
    g1 = spec.v1 @ p_init
    h2 = q_acc.conj().T @ spec.v2
    r, s_rank = g1.shape[1], h2.shape[0]
    g1r = g1.reshape(spec.d_v, spec.d_m1, spec.d_m2, r)
    shape = (spec.d_v, spec.d_m1, spec.d_m2, d_p1, d_p2)
    n1, n2 = spec.d_m1 * d_p1, spec.d_m2 * d_p2

    def reduced(u1: ComplexMatrix, u2: ComplexMatrix) -> ComplexMatrix:
        t1 = u1.reshape(spec.d_m1, d_p1, spec.d_m1, d_p1)
        t2 = u2.reshape(spec.d_m2, d_p2, spec.d_m2, d_p2)
        out = np.einsum("abmx,ceny,vmnk->vacbekxy", t1, t2, g1r, optimize=True)
        out = h2 @ out.reshape(spec.dim, -1)
        return out.reshape(s_rank * d_p, r * d_p)

    def split(x: ComplexMatrix) -> ComplexMatrix:
        return x.reshape(shape).transpose(0, 1, 3, 2, 4).reshape(spec.d_v, n1, n2)

    def best_state(
        u1: ComplexMatrix, u2: ComplexMatrix
    ) -> tuple[ComplexMatrix, ComplexMatrix, float]:
        res = svd(reduced(u1, u2))
        return res.right_h[0].conj(), res.left[:, 0], float(res.singulars[0])

    if r == 0 or s_rank == 0:
        eye1, eye2 = _strategy_start(None, spec, d_p1, d_p2)
        psi = np.zeros(spec.dim * d_p, dtype=np.complex128)
        psi[0] = 1.0
        strat = ProverStrategy(d_p1=d_p1, d_p2=d_p2, u1=eye1, u2=eye2, psi=psi)
        return GameValueReport(
            probability=0.0,
            norm_value=0.0,
            strategy=strat,
            converged=True,
            restart_index=0,
            iterations=0,
        )

    offset = 0 if start is None else 1
    count = max(opts.restarts, offset + 1)

    def restart(k: int) -> GameValueReport:
        seed: ProverStrategy | int | None
        if k < offset:
            seed = start
        elif k == offset:
            seed = None
        else:
            seed = derive_seed(opts.seed, k)
        u1, u2 = _strategy_start(seed, spec, d_p1, d_p2)
        w, y, value = best_state(u1, u2)
        history = [value]
        converged = False
        iterations = 0
        for iterations in range(1, opts.max_iters + 1):
            previous = value
            a = split(g1 @ w.reshape(r, d_p))
            b = split(h2.conj().T @ y.reshape(s_rank, d_p)).conj()
            r1 = np.einsum("vxy,vXY,Yy->xX", a, b, u2, optimize=True)
            u1, half = polar_maximizer(r1)
            r2 = np.einsum("vxy,vXY,Xx->yY", a, b, u1, optimize=True)
            u2, full = polar_maximizer(r2)
            w, y, value = best_state(u1, u2)
            history.extend((half, full, value))
            if abs(value - previous) / max(value, np.finfo(float).tiny) < opts.tol:
                converged = True
                break
        logger.debug(
            "map seesaw restart=%d iterations=%d probability=%.12g",
            k,
            iterations,
            value * value,
        )
        psi = (p_init @ w.reshape(r, d_p)).reshape(-1)
        return GameValueReport(
            probability=_clamp(value * value),
            norm_value=value,
            strategy=ProverStrategy(d_p1=d_p1, d_p2=d_p2, u1=u1, u2=u2, psi=psi),
            converged=converged,
            restart_index=k,
            iterations=iterations,
            history=tuple(history),
        )

    return best_of(run_restarts(restart, count, opts.workers))


def strategy_to_witness(
    spec: VerifierSpec, strat: ProverStrategy
) -> SopStart:
    """(u, v, U₁, U₂) = (ψ, Mψ/‖Mψ‖, U₁, U₂); its sop value is √(acceptance)."""
    _check_strategy(spec, strat)
    final = _final_state(spec, strat)
    norm = float(np.linalg.norm(final))
    if norm > 0:
        v = final / norm
    else:
        v = np.zeros_like(final)
        v[0] = 1.0
    return SopStart(u=strat.psi, v=v, u1=strat.u1, u2=strat.u2)


def witness_to_strategy(
    cert: SopNormCertificate, d_p1: int, d_p2: int
) -> ProverStrategy:
    u = as_vector(cert.u)
    return ProverStrategy(
        d_p1=d_p1, d_p2=d_p2, u1=cert.u1, u2=cert.u2, psi=u / np.linalg.norm(u)
    )


def norm_consistency(
    spec: VerifierSpec,
    d_p: int,
    opts: SeesawOptions | None = None,
    limits: Limits | None = None,
) -> ConsistencyReport:
    """Run both sides and convert each certificate into a witness of the other.

    The two seesaws are alternated, each warm-started from the other side's
    best witness, until the values agree. The last run is always the sop side,
    so ``norm_squared`` is at least ``map_as_sop``.
    """
    opts = opts or SeesawOptions()
    channel = verifier_channel(spec, d_p, d_p, limits)
    final = map_lb(spec, d_p, d_p, opts, limits=limits)
    cert = sop_product_norm_lb(
        channel, opts, starts=(strategy_to_witness(spec, final.strategy),)
    )
    follow = opts.model_copy(update={"restarts": 1})
    for _ in range(CONSISTENCY_ROUNDS):
        if cert.value**2 - final.probability <= CONSISTENCY_TOL:
            break
        start = witness_to_strategy(cert, d_p, d_p)
        final = map_lb(spec, d_p, d_p, follow, start=start, limits=limits)
        cert = sop_product_norm_lb(
            channel, follow, starts=(strategy_to_witness(spec, final.strategy),)
        )
    if cert.value**2 - final.probability > CONSISTENCY_TOL:
        logger.warning(
            "consistency dP=%d still apart after %d rounds", d_p, CONSISTENCY_ROUNDS
        )
    sop_strategy = witness_to_strategy(cert, d_p, d_p)
    witness = strategy_to_witness(spec, final.strategy)
    strat = final.strategy
    map_as_sop = sop_value(channel, witness.u, witness.v, strat.u1, strat.u2) ** 2
    sop_as_map = acceptance_probability(spec, sop_strategy)
    logger.info(
        "consistency dP=%d map=%.10g norm^2=%.10g", d_p, final.probability, cert.value**2
    )
    return ConsistencyReport(
        map_value=final.probability,
        norm_squared=cert.value**2,
        map_as_sop=map_as_sop,
        sop_as_map=sop_as_map,
        map_report=final,
        certificate=cert,
    )


def embed_strategy(strat: ProverStrategy, d_p1: int, d_p2: int) -> ProverStrategy:
    """Same strategy with larger ancillas; the padding levels are never populated."""
    if d_p1 < strat.d_p1 or d_p2 < strat.d_p2:
        raise DimensionError(
            ERR_SHAPE_MISMATCH.format(left=(d_p1, d_p2), right=(strat.d_p1, strat.d_p2))
        )

    def grow(u: ComplexMatrix, d_m: int, n_from: int, n_to: int) -> ComplexMatrix:
        out = np.eye(d_m * n_to, dtype=np.complex128).reshape(d_m, n_to, d_m, n_to)
        out[:, :n_from, :, :n_from] = u.reshape(d_m, n_from, d_m, n_from)
        return out.reshape(d_m * n_to, d_m * n_to)

    head = strat.psi.size // (strat.d_p1 * strat.d_p2)
    psi = np.zeros((head, d_p1, d_p2), dtype=np.complex128)
    psi[:, : strat.d_p1, : strat.d_p2] = strat.psi.reshape(head, strat.d_p1, strat.d_p2)
    return ProverStrategy(
        d_p1=d_p1,
        d_p2=d_p2,
        u1=grow(strat.u1, strat.d_m1, strat.d_p1, d_p1),
        u2=grow(strat.u2, strat.d_m2, strat.d_p2, d_p2),
        psi=psi.reshape(-1),
    )


def classical_value(game: ClassicalGame, limits: Limits | None = None) -> float:
    """Exact classical value by enumerating Alice's deterministic strategies.

    For a fixed x ↦ a the best reply is chosen independently for every y, so
    only nA^nX functions are enumerated.
    """
    limits = resolve_limits(limits)
    n_x, n_y = game.question_counts
    n_a, _ = game.answer_counts
    count = n_a**n_x
    if count > limits.enumeration_budget:
        raise ResourceError(ERR_ENUMERATION.format(count=count, budget=limits.enumeration_budget))
    # weighted[x, y, a, b] = π(x, y)·[predicate]
    weighted = game.distribution[:, :, None, None] * game.predicate
    xs = np.arange(n_x)
    best = 0.0
    functions = itertools.product(range(n_a), repeat=n_x)
    while chunk := list(itertools.islice(functions, 4096)):
        alice = np.array(chunk, dtype=np.intp)
        # picked[f, x, y, b] = weighted[x, y, alice[f, x], b]
        picked = weighted[xs[None, :], :, alice, :]
        scores = picked.sum(axis=1).max(axis=2).sum(axis=1)
        best = max(best, float(scores.max()))
    return best


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def compile_game(
    game: ClassicalGame, pad: bool = False, limits: Limits | None = None
) -> VerifierSpec:
    """Quantum verifier for a classical nonlocal game.

    V holds coherent copies (x, y) of the questions and an accept qubit; M₁
    holds (x, a) and M₂ holds (y, b). V₁ prepares
    Σ √π(x,y) |x,y,0⟩|x,0⟩|y,0⟩ from the all-zero state; V₂ flips the accept
    qubit when the predicate fails (or an answer is out of range). With
    ``pad`` every register is rounded up to a power of two.
    """
    limits = resolve_limits(limits)
    n_x, n_y = game.question_counts
    n_a, n_b = game.answer_counts
    grow = _next_pow2 if pad else (lambda n: n)
    qx, qy, ra, rb = grow(n_x), grow(n_y), grow(n_a), grow(n_b)
    dims = (qx, qy, 2, qx, ra, qy, rb)
    d_v, d_m1, d_m2 = qx * qy * 2, qx * ra, qy * rb
    dim = d_v * d_m1 * d_m2
    limits.check_dense(dim, dim)

    phi = np.zeros(dim, dtype=np.complex128)
    for x in range(n_x):
        for y in range(n_y):
            phi[np.ravel_multi_index((x, y, 0, x, 0, y, 0), dims)] = math.sqrt(
                game.distribution[x, y]
            )
    w = -phi
    w[0] += 1.0
    v1 = np.eye(dim, dtype=np.complex128)
    if np.linalg.norm(w) > UNITARY_ATOL:
        v1 -= 2.0 * np.outer(w, w.conj()) / np.vdot(w, w).real

    x, y, acc, _, a, _, b = np.indices(dims).reshape(7, -1)
    in_range = (x < n_x) & (y < n_y) & (a < n_a) & (b < n_b)
    wins = game.predicate[
        np.minimum(x, n_x - 1), np.minimum(y, n_y - 1), np.minimum(a, n_a - 1), np.minimum(b, n_b - 1)
    ]
    flip = (~(in_range & wins)).astype(np.intp)
    idx = np.indices(dims).reshape(7, -1)
    idx[2] = acc ^ flip
    target = np.ravel_multi_index(tuple(idx), dims)
    v2 = np.zeros((dim, dim), dtype=np.complex128)
    v2[target, np.arange(dim)] = 1.0

    pi_init = np.zeros((dim, dim), dtype=np.complex128)
    pi_init[0, 0] = 1.0
    pi_acc = np.diag((acc == 0).astype(np.complex128))
    return VerifierSpec(
        d_v=d_v, d_m1=d_m1, d_m2=d_m2, v1=v1, v2=v2, pi_init=pi_init, pi_acc=pi_acc
    )


def chsh_game() -> ClassicalGame:
    """Win iff a ⊕ b = x ∧ y, questions uniform."""
    pred = np.zeros((2, 2, 2, 2), dtype=bool)
    for x, y, a, b in itertools.product(range(2), repeat=4):
        pred[x, y, a, b] = (a ^ b) == (x & y)
    return ClassicalGame(distribution=np.full((2, 2), 0.25), predicate=pred)


def magic_square_row(r: int, a: int) -> tuple[int, int, int]:
    """Alice's row entries for answer a; the row parity is even."""
    a0, a1 = (a >> 1) & 1, a & 1
    return a0, a1, a0 ^ a1


def magic_square_column(c: int, b: int) -> tuple[int, int, int]:
    """Bob's column entries for answer b; the column parity is odd."""
    b0, b1 = (b >> 1) & 1, b & 1
    return b0, b1, 1 ^ b0 ^ b1


def magic_square_game() -> ClassicalGame:
    """Alice fills row r, Bob column c; they win iff the shared cell agrees."""
    pred = np.zeros((3, 3, 4, 4), dtype=bool)
    for r, c, a, b in itertools.product(range(3), range(3), range(4), range(4)):
        pred[r, c, a, b] = magic_square_row(r, a)[c] == magic_square_column(c, b)[r]
    return ClassicalGame(distribution=np.full((3, 3), 1.0 / 9.0), predicate=pred)


@functools.cache
def chsh_spec() -> VerifierSpec:
    """dV = 8, dM1 = dM2 = 4."""
    return compile_game(chsh_game())


@functools.cache
def magic_square_spec(pad: bool = False) -> VerifierSpec:
    """dV = 18, dM1 = dM2 = 12 (3 questions × 4 answers); padded: 32, 16, 16."""
    return compile_game(magic_square_game(), pad=pad)


def random_spec(d_v: int, d_m1: int, d_m2: int, seed: int) -> VerifierSpec:
    """Haar-random V₁, V₂ with Π_init = |0⟩⟨0| and acceptance on the upper half of V."""
    if d_v < 2:
        raise InvalidSpecError(ERR_RANDOM_SPEC.format(d_v=d_v))
    dim = d_v * d_m1 * d_m2
    pi_init = np.zeros((dim, dim), dtype=np.complex128)
    pi_init[0, 0] = 1.0
    accept = np.repeat(np.arange(d_v) < d_v // 2, d_m1 * d_m2)
    return VerifierSpec(
        d_v=d_v,
        d_m1=d_m1,
        d_m2=d_m2,
        v1=random_unitary(dim, derive_seed(seed, 1)),
        v2=random_unitary(dim, derive_seed(seed, 2)),
        pi_init=pi_init,
        pi_acc=np.diag(accept.astype(np.complex128)),
    )


BUILTIN_GAMES = {"chsh": chsh_game, "magicsquare": magic_square_game}
BUILTIN_SPECS = {"chsh": chsh_spec, "magicsquare": magic_square_spec}
