"""Superoperators and their norms.

A superoperator T: L(H) → L(V₁⊗V₂) is stored by its images of the matrix
units, ``action[i·n+j] = T(|i⟩⟨j|)``. The ℓ₁, diamond and superoperator
product norms are all maxima over rank-one inputs |u⟩⟨v|, which the seesaws
below exploit: for fixed output unitaries the objective is the sesquilinear
form ⟨v|K(U)|u⟩ with K(U)[r,c] = Tr(U·T(|c⟩⟨r|)), maximized by the top
singular pair of K(U).
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .config import Limits, SeesawOptions, resolve_limits
from .constants import (
    ERR_ACTION_SHAPE,
    ERR_EMBED,
    ERR_NS_ORDER,
    ERR_SHAPE_MISMATCH,
    ERR_SQUARE_PART,
)
from .errors import DimensionError
from .linalg import (
    Bipartition,
    ComplexMatrix,
    as_matrix,
    as_vector,
    max_entangled,
    polar_maximizer,
    random_unitary,
    svd,
)
from .norms import product_value, seesaw_sweep
from .restarts import best_of, derive_seed, make_rng, run_restarts

logger = logging.getLogger(__name__)


class LinearMap(Protocol):
    """What the seesaws need from a superoperator."""

    @property
    def dim_in(self) -> int: ...

    @property
    def out_part(self) -> Bipartition: ...

    def apply(self, a: ComplexMatrix) -> ComplexMatrix: ...

    def apply_rank_one(self, u: ComplexMatrix, v: ComplexMatrix) -> ComplexMatrix: ...

    def coupling(self, unitary: ComplexMatrix) -> ComplexMatrix: ...


@dataclass(frozen=True, eq=False)
class Superoperator:
    dim_in: int
    out_part: Bipartition
    action: ComplexMatrix

    def __post_init__(self) -> None:
        n, d = self.dim_in, self.out_part.dim
        if self.action.shape != (n * n, d, d):
            raise DimensionError(
                ERR_ACTION_SHAPE.format(count=n * n, dim=d, shape=self.action.shape)
            )

    @property
    def dim_out(self) -> int:
        return self.out_part.dim

    def _blocks(self) -> ComplexMatrix:
        n, d = self.dim_in, self.dim_out
        return self.action.reshape(n, n, d, d)

    def apply(self, a: ComplexMatrix) -> ComplexMatrix:
        a = as_matrix(a)
        if a.shape != (self.dim_in, self.dim_in):
            raise DimensionError(
                ERR_SHAPE_MISMATCH.format(left=a.shape, right=(self.dim_in, self.dim_in))
            )
        return np.einsum("ij,ijkl->kl", a, self._blocks())

    def apply_rank_one(self, u: ComplexMatrix, v: ComplexMatrix) -> ComplexMatrix:
        return np.einsum("i,j,ijkl->kl", as_vector(u), as_vector(v).conj(), self._blocks())

    def coupling(self, unitary: ComplexMatrix) -> ComplexMatrix:
        return np.einsum("kl,crlk->rc", unitary, self._blocks())


@dataclass(frozen=True)
class SopStart:
    """Explicit starting point for a sop seesaw restart."""

    u: ComplexMatrix
    v: ComplexMatrix
    u1: ComplexMatrix | None = None
    u2: ComplexMatrix | None = None


@dataclass(frozen=True)
class SopNormCertificate:
    """Rank-one input and output unitaries witnessing ``value``.

    For the ℓ₁ and diamond norms the output is treated as a single block:
    ``u1`` is the full unitary and ``u2`` is the 1×1 identity.
    """

    value: float
    u: ComplexMatrix
    v: ComplexMatrix
    u1: ComplexMatrix
    u2: ComplexMatrix
    converged: bool
    restart_index: int
    iterations: int = 0
    history: tuple[float, ...] = ()


@dataclass(frozen=True)
class StabilityEntry:
    n: int
    value: float
    certificate: SopNormCertificate


@dataclass(frozen=True)
class StabilityReport:
    base_value: float
    base: SopNormCertificate
    entries: tuple[StabilityEntry, ...]


def _units(d: int) -> ComplexMatrix:
    return np.eye(d * d, dtype=np.complex128).reshape(d * d, d, d)


def identity_sop(d: int, part: Bipartition) -> Superoperator:
    part.check(d)
    return Superoperator(dim_in=d, out_part=part, action=_units(d))


def transpose_sop(d: int, part: Bipartition) -> Superoperator:
    """T(|i⟩⟨j|) = |j⟩⟨i|."""
    part.check(d)
    action = _units(d).reshape(d, d, d, d).transpose(1, 0, 2, 3).reshape(d * d, d, d)
    return Superoperator(dim_in=d, out_part=part, action=np.ascontiguousarray(action))


def apply(t: LinearMap, a: ComplexMatrix) -> ComplexMatrix:
    return t.apply(a)


def tensor_product(
    t: Superoperator, r: Superoperator, limits: Limits | None = None
) -> Superoperator:
    """T⊗R: L(H₁⊗H₂) → L((V₁⊗W₁)⊗(V₂⊗W₂))."""
    limits = resolve_limits(limits)
    n, m = t.dim_in, r.dim_in
    d1, d2 = t.out_part.d1, t.out_part.d2
    e1, e2 = r.out_part.d1, r.out_part.d2
    dim_in = n * m
    dim_out = d1 * d2 * e1 * e2
    limits.check_dim("superoperator input dimension", dim_in)
    limits.check_dim("superoperator output dimension", dim_out)
    limits.check_dense(dim_in * dim_in, dim_out * dim_out)
    t6 = t.action.reshape(n, n, d1, d2, d1, d2)
    r6 = r.action.reshape(m, m, e1, e2, e1, e2)
    action = np.einsum("ijabxy,klcezw->ikjlacbexzyw", t6, r6)
    return Superoperator(
        dim_in=dim_in,
        out_part=Bipartition(d1 * e1, d2 * e2),
        action=action.reshape(dim_in * dim_in, dim_out, dim_out),
    )


def tensor_identity(t: Superoperator, n: int, limits: Limits | None = None) -> Superoperator:
    """T⊗I_N⊗I_N with one C^N appended inside V₁ and one inside V₂."""
    return tensor_product(t, identity_sop(n * n, Bipartition(n, n)), limits)


def _top_pair(k: ComplexMatrix) -> tuple[ComplexMatrix, ComplexMatrix, float]:
    # max |⟨v|K|u⟩| over unit u, v, attained with ⟨v|K|u⟩ = s₁ > 0
    res = svd(k)
    return res.right_h[0].conj(), res.left[:, 0], float(res.singulars[0])


def _unit(x: ComplexMatrix) -> ComplexMatrix:
    x = as_vector(x)
    norm = np.linalg.norm(x)
    return x / norm if norm > 0 else x


def sop_value(
    t: LinearMap,
    u: ComplexMatrix,
    v: ComplexMatrix,
    u1: ComplexMatrix,
    u2: ComplexMatrix,
) -> float:
    """|Tr((u1⊗u2)·T(|u⟩⟨v|))|."""
    return product_value(t.apply_rank_one(u, v), t.out_part, u1, u2)


def _relative_change(new: float, old: float) -> float:
    return abs(new - old) / max(abs(new), np.finfo(float).tiny)


def _restart_plan(
    starts: Sequence[SopStart], opts: SeesawOptions
) -> tuple[int, Callable[[int], SopStart | int | None]]:
    """Warm starts take indices 0..m-1, then the identity start, then random."""
    count = max(opts.restarts, len(starts) + 1)

    def plan(k: int) -> SopStart | int | None:
        if k < len(starts):
            return starts[k]
        if k == len(starts):
            return None
        return derive_seed(opts.seed, k)

    return count, plan


def l1_norm_lb(
    t: LinearMap,
    opts: SeesawOptions | None = None,
    starts: Sequence[SopStart] = (),
) -> SopNormCertificate:
    """Lower bound on ‖T‖₁ = max ‖T(|u⟩⟨v|)‖_tr over unit u, v."""
    opts = opts or SeesawOptions()
    dim_out = t.out_part.dim
    one = np.ones((1, 1), dtype=np.complex128)
    count, plan = _restart_plan(starts, opts)

    def restart(k: int) -> SopNormCertificate:
        start = plan(k)
        if isinstance(start, SopStart):
            u, v = _unit(start.u), _unit(start.v)
            unitary, value = polar_maximizer(t.apply_rank_one(u, v))
        else:
            if start is None:
                unitary = np.eye(dim_out, dtype=np.complex128)
            else:
                unitary = random_unitary(dim_out, start)
            u, v, value = _top_pair(t.coupling(unitary))
        history = [value]
        converged = False
        iterations = 0
        for iterations in range(1, opts.max_iters + 1):
            previous = value
            unitary, half = polar_maximizer(t.apply_rank_one(u, v))
            u, v, value = _top_pair(t.coupling(unitary))
            history.extend((half, value))
            if _relative_change(value, previous) < opts.tol:
                converged = True
                break
        logger.debug(
            "l1 seesaw restart=%d iterations=%d value=%.12g", k, iterations, value
        )
        return SopNormCertificate(
            value=value,
            u=u,
            v=v,
            u1=unitary,
            u2=one,
            converged=converged,
            restart_index=k,
            iterations=iterations,
            history=tuple(history),
        )

    return best_of(run_restarts(restart, count, opts.workers))


def diamond_lb(
    t: Superoperator,
    opts: SeesawOptions | None = None,
    limits: Limits | None = None,
) -> SopNormCertificate:
    """Lower bound on ‖T‖⋄ = ‖T⊗I_n‖₁ with n = dim_in, ancilla on one side.

    The first restart starts from the maximally entangled input on H⊗C^n.
    """
    n = t.dim_in
    extended = tensor_product(t, identity_sop(n, Bipartition(1, n)), limits)
    phi = max_entangled(n)
    return l1_norm_lb(extended, opts, starts=(SopStart(u=phi, v=phi),))


def sop_product_norm_lb(
    t: LinearMap,
    opts: SeesawOptions | None = None,
    starts: Sequence[SopStart] = (),
) -> SopNormCertificate:
    """Lower bound on max ‖T(|u⟩⟨v|)‖ over unit u, v in the product norm.

    Each iteration is one full (U₁, U₂) sweep on A = T(|u⟩⟨v|) followed by
    the exact (u, v) update from K(U₁⊗U₂).
    """
    opts = opts or SeesawOptions()
    part = t.out_part
    count, plan = _restart_plan(starts, opts)

    def restart(k: int) -> SopNormCertificate:
        start = plan(k)
        u1 = np.eye(part.d1, dtype=np.complex128)
        u2 = np.eye(part.d2, dtype=np.complex128)
        if isinstance(start, int):
            u1 = random_unitary(part.d1, derive_seed(start, 1))
            u2 = random_unitary(part.d2, derive_seed(start, 2))
        if isinstance(start, SopStart):
            u1 = start.u1 if start.u1 is not None else u1
            u2 = start.u2 if start.u2 is not None else u2
            u, v = _unit(start.u), _unit(start.v)
            value = sop_value(t, u, v, u1, u2)
        else:
            u, v, value = _top_pair(t.coupling(np.kron(u1, u2)))
        history = [value]
        converged = False
        iterations = 0
        for iterations in range(1, opts.max_iters + 1):
            previous = value
            a4 = t.apply_rank_one(u, v).reshape(part.d1, part.d2, part.d1, part.d2)
            u1, u2, half, full = seesaw_sweep(a4, u1, u2)
            u, v, value = _top_pair(t.coupling(np.kron(u1, u2)))
            history.extend((half, full, value))
            if _relative_change(value, previous) < opts.tol:
                converged = True
                break
        logger.debug(
            "sop product seesaw restart=%d iterations=%d value=%.12g",
            k,
            iterations,
            value,
        )
        return SopNormCertificate(
            value=value,
            u=u,
            v=v,
            u1=u1,
            u2=u2,
            converged=converged,
            restart_index=k,
            iterations=iterations,
            history=tuple(history),
        )

    return best_of(run_restarts(restart, count, opts.workers))


def transpose_swap_witness(d: int) -> SopStart:
    """Witness for the transpose on C^d⊗C^d stabilized with N = d.

    Input Σ|i,j,i,j⟩/d and the swap |a,p⟩ ↦ |p,a⟩ on each side turn the
    image into I/d², certifying the value d².
    """
    dim = d * d
    u = np.zeros((dim, d, d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            u[i * d + j, i, j] = 1.0 / d
    swap = np.eye(dim, dtype=np.complex128).reshape(d, d, d, d).transpose(1, 0, 2, 3)
    swap = np.ascontiguousarray(swap.reshape(dim, dim))
    flat = u.reshape(-1)
    return SopStart(u=flat, v=flat, u1=swap, u2=swap.copy())


def square_swap_witness(part: Bipartition) -> SopStart:
    if part.d1 != part.d2:
        raise DimensionError(ERR_SQUARE_PART.format(d1=part.d1, d2=part.d2))
    return transpose_swap_witness(part.d1)


def _embed_unitary(u: ComplexMatrix, d: int, n_from: int, n_to: int) -> ComplexMatrix:
    out = np.eye(d * n_to, dtype=np.complex128).reshape(d, n_to, d, n_to)
    out[:, :n_from, :, :n_from] = u.reshape(d, n_from, d, n_from)
    return out.reshape(d * n_to, d * n_to)


def _embed_input(x: ComplexMatrix, dim_in: int, n_from: int, n_to: int) -> ComplexMatrix:
    out = np.zeros((dim_in, n_to, n_to), dtype=np.complex128)
    out[:, :n_from, :n_from] = as_vector(x).reshape(dim_in, n_from, n_from)
    return out.reshape(-1)


def embed_certificate(
    cert: SopNormCertificate,
    dim_in: int,
    part: Bipartition,
    n_from: int,
    n_to: int,
) -> SopStart:
    """Carry a certificate of T⊗I_{n_from}⊗I_{n_from} to ancilla n_to, value intact.

    ``dim_in`` and ``part`` describe the base map T.
    """
    if n_to < n_from:
        raise DimensionError(ERR_EMBED.format(n_from=n_from, n_to=n_to))
    return SopStart(
        u=_embed_input(cert.u, dim_in, n_from, n_to),
        v=_embed_input(cert.v, dim_in, n_from, n_to),
        u1=_embed_unitary(cert.u1, part.d1, n_from, n_to),
        u2=_embed_unitary(cert.u2, part.d2, n_from, n_to),
    )


def stability_scan(
    t: Superoperator,
    ns: Sequence[int],
    opts: SeesawOptions | None = None,
    warm_starts: Mapping[int, Sequence[SopStart]] | None = None,
    limits: Limits | None = None,
) -> StabilityReport:
    """Product norms of T⊗I_N⊗I_N for each N in ``ns``.

    Each N is seeded with the previous best certificate embedded into the
    larger ancilla, so the reported values never decrease.
    """
    if list(ns) != sorted(ns) or any(n < 1 for n in ns):
        raise DimensionError(ERR_NS_ORDER.format(ns=tuple(ns)))
    warm_starts = warm_starts or {}
    base = sop_product_norm_lb(t, opts)
    previous, previous_n = base, 1
    entries: list[StabilityEntry] = []
    for n in ns:
        extended = tensor_identity(t, n, limits)
        starts = [
            *warm_starts.get(n, ()),
            embed_certificate(previous, t.dim_in, t.out_part, previous_n, n),
        ]
        cert = sop_product_norm_lb(extended, opts, starts=starts)
        logger.info("stability N=%d value=%.10g", n, cert.value)
        entries.append(StabilityEntry(n=n, value=cert.value, certificate=cert))
        previous, previous_n = cert, n
    return StabilityReport(base_value=base.value, base=base, entries=tuple(entries))


def supermult_witness(
    t: Superoperator,
    r: Superoperator,
    opts: SeesawOptions | None = None,
    limits: Limits | None = None,
) -> tuple[float, float]:
    """Evaluate the tensored witnesses of T and R on T⊗R.

    Returns (value on T⊗R, product of the two values); they agree, which
    certifies ‖T⊗R‖ ≥ ‖T‖·‖R‖ on the computed instances.
    """
    ct = sop_product_norm_lb(t, opts)
    cr = sop_product_norm_lb(r, opts)
    joint = tensor_product(t, r, limits)
    value = sop_value(
        joint,
        np.kron(ct.u, cr.u),
        np.kron(ct.v, cr.v),
        np.kron(ct.u1, cr.u1),
        np.kron(ct.u2, cr.u2),
    )
    return value, ct.value * cr.value


def random_sop(dim_in: int, part: Bipartition, seed: int) -> Superoperator:
    """Superoperator with independent complex Gaussian images (for tests and sweeps)."""
    rng = make_rng(seed, dim_in, part.d1, part.d2)
    shape = (dim_in * dim_in, part.dim, part.dim)
    action = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return Superoperator(dim_in=dim_in, out_part=part, action=action / part.dim)
