"""Dense complex linear algebra.

Matrices are ``numpy`` complex128 arrays. Composite spaces are ordered left to
right, row-major: for V⊗M₁⊗M₂ the flat index is ((v·d_M1)+m₁)·d_M2+m₂.
"""

from __future__ import annotations

import math
from collections.abc import Collection, Sequence
from dataclasses import dataclass, field
from typing import TypeAlias

import numpy as np
import numpy.typing as npt

from .constants import (
    ERR_FACTOR_MISMATCH,
    ERR_KRON_OVERFLOW,
    ERR_NON_FINITE,
    ERR_NOT_SQUARE,
    ERR_POSITIVE,
    ERR_SHAPE_MISMATCH,
    ERR_TRACED_INDEX,
    ERR_VECTOR_LENGTH,
    SCHMIDT_CUTOFF,
    UNITARY_ATOL,
)
from .errors import DimensionError, InputError
from .restarts import make_rng

ComplexMatrix: TypeAlias = npt.NDArray[np.complex128]
RealVector: TypeAlias = npt.NDArray[np.float64]


@dataclass(frozen=True)
class Bipartition:
    """Ordered split H = V₁⊗V₂ of a space of dimension d1·d2."""

    d1: int
    d2: int

    def __post_init__(self) -> None:
        for name, value in (("d1", self.d1), ("d2", self.d2)):
            if int(value) != value or value < 1:
                raise DimensionError(ERR_POSITIVE.format(name=name, value=value))

    @property
    def dim(self) -> int:
        return self.d1 * self.d2

    def check(self, dim: int) -> None:
        if dim != self.dim:
            raise DimensionError(
                ERR_FACTOR_MISMATCH.format(factors=(self.d1, self.d2), dim=dim)
            )


@dataclass(frozen=True)
class SVDResult:
    left: ComplexMatrix
    singulars: RealVector
    right_h: ComplexMatrix

    def reconstruct(self) -> ComplexMatrix:
        return (self.left * self.singulars) @ self.right_h


@dataclass(frozen=True)
class SchmidtDecomposition:
    """u = Σᵢ cᵢ |leftᵢ⟩⊗|rightᵢ⟩ with cᵢ descending.

    ``coefficients`` reports values below the cutoff as exact zeros; the raw
    values are kept for reconstruction.
    """

    coefficients: RealVector
    left_basis: ComplexMatrix
    right_basis: ComplexMatrix
    raw_coefficients: RealVector = field(repr=False)

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.coefficients))

    def reconstruct(self) -> ComplexMatrix:
        return np.einsum(
            "i,ai,bi->ab", self.raw_coefficients, self.left_basis, self.right_basis
        ).reshape(-1)


def as_matrix(a: npt.ArrayLike) -> ComplexMatrix:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise DimensionError(ERR_SHAPE_MISMATCH.format(left=m.shape, right="2-d"))
    return m


def as_vector(u: npt.ArrayLike) -> ComplexMatrix:
    return np.asarray(u, dtype=np.complex128).reshape(-1)


def require_square(a: ComplexMatrix) -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(ERR_NOT_SQUARE.format(shape=a.shape))
    return int(a.shape[0])


def require_finite(a: ComplexMatrix) -> None:
    if not np.all(np.isfinite(a)):
        raise InputError(ERR_NON_FINITE)


def kron(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    a, b = as_matrix(a), as_matrix(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows * cols > np.iinfo(np.intp).max:
        raise DimensionError(ERR_KRON_OVERFLOW.format(rows=rows, cols=cols))
    return np.kron(a, b)


def svd(a: ComplexMatrix) -> SVDResult:
    a = as_matrix(a)
    require_finite(a)
    left, singulars, right_h = np.linalg.svd(a, full_matrices=False)
    return SVDResult(left=left, singulars=singulars, right_h=right_h)


def partial_trace(
    x: ComplexMatrix, factors: Sequence[int], traced: Collection[int]
) -> ComplexMatrix:
    """Trace out the factors at 0-based positions ``traced``.

    Tr_{H₂}(A⊗B) = Tr(B)·A, extended linearly.
    """
    x = as_matrix(x)
    dim = require_square(x)
    dims = [int(f) for f in factors]
    if any(d < 1 for d in dims) or math.prod(dims) != dim:
        raise DimensionError(ERR_FACTOR_MISMATCH.format(factors=tuple(dims), dim=dim))
    for index in traced:
        if not 0 <= index < len(dims):
            raise InputError(ERR_TRACED_INDEX.format(index=index, count=len(dims)))
    tensor = x.reshape(dims + dims)
    live = len(dims)
    for index in sorted(set(traced), reverse=True):
        tensor = np.trace(tensor, axis1=index, axis2=index + live)
        live -= 1
    kept = math.prod(d for i, d in enumerate(dims) if i not in set(traced))
    return np.asarray(tensor, dtype=np.complex128).reshape(kept, kept)


def polar_maximizer(a: ComplexMatrix) -> tuple[ComplexMatrix, float]:
    """Unitary U maximizing |Tr(U·a)|; Tr(U·a) = Σ sᵢ(a) is real and non-negative."""
    a = as_matrix(a)
    require_square(a)
    res = svd(a)
    u = res.right_h.conj().T @ res.left.conj().T
    return u, float(np.sum(res.singulars))


def schmidt(u: npt.ArrayLike, part: Bipartition) -> SchmidtDecomposition:
    vec = as_vector(u)
    if vec.size != part.dim:
        raise DimensionError(
            ERR_VECTOR_LENGTH.format(length=vec.size, d1=part.d1, d2=part.d2)
        )
    res = svd(vec.reshape(part.d1, part.d2))
    raw = res.singulars
    reported = np.where(raw < SCHMIDT_CUTOFF, 0.0, raw)
    return SchmidtDecomposition(
        coefficients=reported,
        left_basis=res.left,
        right_basis=res.right_h.T,
        raw_coefficients=raw,
    )


def random_unitary(d: int, seed: int) -> ComplexMatrix:
    """Haar unitary from the QR factorization of a complex Gaussian matrix."""
    if d < 1:
        raise DimensionError(ERR_POSITIVE.format(name="d", value=d))
    rng = make_rng(seed, d)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    phases = np.where(np.abs(diag) > 0, diag / np.abs(diag), 1.0)
    return np.asarray(q * phases, dtype=np.complex128)


def random_unit_vector(d: int, seed: int) -> ComplexMatrix:
    rng = make_rng(seed, d, 1)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return np.asarray(z / np.linalg.norm(z), dtype=np.complex128)


def weyl_basis(d: int) -> list[ComplexMatrix]:
    """Clock-and-shift unitaries X^a Z^b, ordered by a·d+b."""
    if d < 1:
        raise DimensionError(ERR_POSITIVE.format(name="d", value=d))
    shift = np.roll(np.eye(d, dtype=np.complex128), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    out: list[ComplexMatrix] = []
    for a in range(d):
        xa = np.linalg.matrix_power(shift, a)
        for b in range(d):
            out.append(xa @ np.linalg.matrix_power(clock, b))
    return out


def rank_one(u: npt.ArrayLike, v: npt.ArrayLike) -> ComplexMatrix:
    """|u⟩⟨v|."""
    return np.outer(as_vector(u), as_vector(v).conj())


def max_entangled(d: int) -> ComplexMatrix:
    return np.eye(d, dtype=np.complex128).reshape(-1) / math.sqrt(d)


def is_unitary(a: ComplexMatrix, atol: float = UNITARY_ATOL) -> bool:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    eye = np.eye(a.shape[0])
    return bool(np.allclose(a.conj().T @ a, eye, rtol=0.0, atol=atol))


def is_projector(a: ComplexMatrix, atol: float = UNITARY_ATOL) -> bool:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    diag = np.diagonal(a)
    if not np.any(np.abs(a - np.diag(diag)) > atol):
        return bool(np.all(np.minimum(np.abs(diag), np.abs(diag - 1.0)) <= atol))
    hermitian = np.allclose(a, a.conj().T, rtol=0.0, atol=atol)
    return bool(hermitian and np.allclose(a @ a, a, rtol=0.0, atol=atol))


def projector_range(pi: ComplexMatrix) -> ComplexMatrix:
    """Isometry whose columns span the range of the projector ``pi``."""
    dim = require_square(pi)
    diag = np.diagonal(pi)
    off = pi - np.diag(diag)
    if not np.any(np.abs(off) > UNITARY_ATOL):
        cols = np.flatnonzero(diag.real > 0.5)
        return np.eye(dim, dtype=np.complex128)[:, cols]
    res = svd(pi)
    return res.left[:, res.singulars > 0.5]
