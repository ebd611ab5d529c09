"""Operator norms: trace norm and the bipartite product norm.

The product norm of A over V₁⊗V₂ is max |Tr((U₁⊗U₂)A)| over local unitaries.
For rank-one A it has a closed form in the Schmidt coefficients; in general
we certify lower bounds with an alternating (seesaw) maximizer and bracket
the value with trace-norm sandwich bounds.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .config import SeesawOptions
from .constants import ERR_SHAPE_MISMATCH
from .errors import DimensionError
from .linalg import (
    Bipartition,
    ComplexMatrix,
    as_matrix,
    partial_trace,
    polar_maximizer,
    random_unitary,
    require_square,
    schmidt,
    svd,
    weyl_basis,
)
from .restarts import best_of, derive_seed, run_restarts

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProductNormCertificate:
    """Local unitaries witnessing ``value`` as a lower bound on the product norm."""

    value: float
    u1: ComplexMatrix
    u2: ComplexMatrix
    iterations: int
    restart_index: int
    converged: bool
    history: tuple[float, ...] = ()


def trace_norm(a: ComplexMatrix) -> float:
    a = as_matrix(a)
    require_square(a)
    return float(np.sum(svd(a).singulars))


def product_norm_rank1(
    u: npt.ArrayLike, v: npt.ArrayLike, part: Bipartition
) -> float:
    """Σᵢ αᵢβᵢ over the descending Schmidt coefficients of u and v."""
    alpha = schmidt(u, part).raw_coefficients
    beta = schmidt(v, part).raw_coefficients
    return float(np.dot(alpha, beta))


def _as_tensor(a: ComplexMatrix, part: Bipartition) -> ComplexMatrix:
    a = as_matrix(a)
    part.check(require_square(a))
    return a.reshape(part.d1, part.d2, part.d1, part.d2)


def _trace_pair(a4: ComplexMatrix, u1: ComplexMatrix, u2: ComplexMatrix) -> complex:
    # Tr((U₁⊗U₂)A) = Σ U₁[k,i] U₂[l,j] A[(i,j),(k,l)]
    return complex(np.einsum("ki,lj,ijkl->", u1, u2, a4))


def product_value(
    a: ComplexMatrix, part: Bipartition, u1: ComplexMatrix, u2: ComplexMatrix
) -> float:
    """|Tr((u1⊗u2)·a)|."""
    return abs(_trace_pair(_as_tensor(a, part), u1, u2))


def _update_first(a4: ComplexMatrix, u2: ComplexMatrix) -> tuple[ComplexMatrix, float]:
    # Tr_{V₂}((I⊗U₂)A), then the polar maximizer on V₁
    reduced = np.einsum("lj,ijkl->ik", u2, a4)
    return polar_maximizer(reduced)


def _update_second(a4: ComplexMatrix, u1: ComplexMatrix) -> tuple[ComplexMatrix, float]:
    # Tr_{V₁}((U₁⊗I)A), then the polar maximizer on V₂
    reduced = np.einsum("ki,ijkl->jl", u1, a4)
    return polar_maximizer(reduced)


def seesaw_sweep(
    a4: ComplexMatrix, u1: ComplexMatrix, u2: ComplexMatrix
) -> tuple[ComplexMatrix, ComplexMatrix, float, float]:
    """One (U₁, U₂) sweep; returns new unitaries and both half-step values."""
    u1, half = _update_first(a4, u2)
    u2, full = _update_second(a4, u1)
    return u1, u2, half, full


def _canonical_phase(
    a4: ComplexMatrix, u1: ComplexMatrix, u2: ComplexMatrix
) -> tuple[ComplexMatrix, float]:
    # absorb the phase of Tr((U₁⊗U₂)A) into U₁
    t = _trace_pair(a4, u1, u2)
    if abs(t) == 0.0:
        return u1, 0.0
    return u1 * (np.conj(t) / abs(t)), abs(t)


def _relative_change(new: float, old: float) -> float:
    return abs(new - old) / max(abs(new), np.finfo(float).tiny)


def _seesaw_run(
    a4: ComplexMatrix,
    u1: ComplexMatrix,
    u2: ComplexMatrix,
    opts: SeesawOptions,
    restart_index: int,
) -> ProductNormCertificate:
    value = abs(_trace_pair(a4, u1, u2))
    history = [value]
    converged = False
    iterations = 0
    for iterations in range(1, opts.max_iters + 1):
        previous = value
        u1, u2, half, value = seesaw_sweep(a4, u1, u2)
        history.extend((half, value))
        if _relative_change(value, previous) < opts.tol:
            converged = True
            break
    u1, value = _canonical_phase(a4, u1, u2)
    logger.debug(
        "product seesaw restart=%d iterations=%d value=%.12g converged=%s",
        restart_index,
        iterations,
        value,
        converged,
    )
    return ProductNormCertificate(
        value=value,
        u1=u1,
        u2=u2,
        iterations=iterations,
        restart_index=restart_index,
        converged=converged,
        history=tuple(history),
    )


def product_norm_lb(
    a: ComplexMatrix,
    part: Bipartition,
    opts: SeesawOptions | None = None,
) -> ProductNormCertificate:
    """Best seesaw certificate over all restarts (a lower bound on the product norm).

    Restart 0 starts from identities, restart k ≥ 1 from Haar-random unitaries
    seeded by ``derive_seed(opts.seed, k)``.
    """
    opts = opts or SeesawOptions()
    a4 = _as_tensor(a, part)
    eye1 = np.eye(part.d1, dtype=np.complex128)
    eye2 = np.eye(part.d2, dtype=np.complex128)
    if not np.any(a4):
        return ProductNormCertificate(
            value=0.0, u1=eye1, u2=eye2, iterations=0, restart_index=0, converged=True
        )

    def restart(k: int) -> ProductNormCertificate:
        if k == 0:
            return _seesaw_run(a4, eye1, eye2, opts, k)
        seed = derive_seed(opts.seed, k)
        u1 = random_unitary(part.d1, derive_seed(seed, 1))
        u2 = random_unitary(part.d2, derive_seed(seed, 2))
        return _seesaw_run(a4, u1, u2, opts, k)

    return best_of(run_restarts(restart, opts.restarts, opts.workers))


def sandwich_bounds(a: ComplexMatrix, part: Bipartition) -> tuple[float, float]:
    """(‖Tr_{V₂}(A)‖_tr, ‖A‖_tr): the product norm lies in between."""
    a = as_matrix(a)
    part.check(require_square(a))
    lower = trace_norm(partial_trace(a, (part.d1, part.d2), {1}))
    return lower, trace_norm(a)


def hj_product_bound(b: ComplexMatrix, c: ComplexMatrix) -> tuple[float, float]:
    """(‖BC‖_tr, Σᵢ sᵢ(B)sᵢ(C)); the first never exceeds the second."""
    b, c = as_matrix(b), as_matrix(c)
    if require_square(b) != require_square(c):
        raise DimensionError(ERR_SHAPE_MISMATCH.format(left=b.shape, right=c.shape))
    lhs = trace_norm(b @ c)
    rhs = float(np.dot(svd(b).singulars, svd(c).singulars))
    return lhs, rhs


def product_norm_positivity_witness(a: ComplexMatrix, part: Bipartition) -> float:
    """max |Tr((Wᵢ⊗Vⱼ)A)| over the product clock-and-shift basis.

    Strictly positive for A ≠ 0 since the products span L(V₁⊗V₂).
    """
    a4 = _as_tensor(a, part)
    if not np.any(a4):
        logger.warning("positivity witness of the zero matrix is 0")
        return 0.0
    best = 0.0
    for w in weyl_basis(part.d1):
        for v in weyl_basis(part.d2):
            best = max(best, abs(_trace_pair(a4, w, v)))
    return best
