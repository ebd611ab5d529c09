"""Prover strategy fixtures for the built-in games.

These are constructed, not trusted: tests and the repro suite check each
one only through ``acceptance_probability``.

Provenance
----------
chsh_classical
    Both provers answer 0 and share nothing (dP = 1). Wins unless
    x = y = 1, so 3/4 under uniform questions.
chsh_optimal
    Shared |Φ⁺⟩ on one qubit per side. Alice measures Z for x = 0 and X for
    x = 1; Bob measures (Z + X)/√2 for y = 0 and (Z − X)/√2 for y = 1. Every
    question pair wins with probability cos²(π/8).
magic_square_optimal
    Two shared EPR pairs per side (dP = 4) and the Mermin–Peres square of
    two-qubit Pauli observables

        X⊗I    I⊗X    X⊗X
        I⊗Z    Z⊗I    Z⊗Z
       −X⊗Z   −Z⊗X    Y⊗Y

    Rows multiply to +I and columns to −I. Alice measures the first two
    observables of her row, Bob the transposes of the first two of his
    column; the third entries follow from the parities and agree on the
    shared cell with certainty.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .games import ProverStrategy, chsh_spec, magic_square_spec
from .linalg import ComplexMatrix

_I = np.eye(2, dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

MAGIC_SQUARE: tuple[tuple[ComplexMatrix, ...], ...] = (
    (np.kron(_X, _I), np.kron(_I, _X), np.kron(_X, _X)),
    (np.kron(_I, _Z), np.kron(_Z, _I), np.kron(_Z, _Z)),
    (-np.kron(_X, _Z), -np.kron(_Z, _X), np.kron(_Y, _Y)),
)


def _outcome_projector(observable: ComplexMatrix, bit: int) -> ComplexMatrix:
    """Projector onto the (−1)^bit eigenspace of a ±1 observable."""
    eye = np.eye(observable.shape[0], dtype=np.complex128)
    return (eye + (-1) ** bit * observable) / 2


def _xor_shift(dim: int, value: int) -> ComplexMatrix:
    """|t⟩ ↦ |t ⊕ value⟩ on an answer register of size dim (a power of two)."""
    out = np.zeros((dim, dim), dtype=np.complex128)
    for t in range(dim):
        out[t ^ value, t] = 1.0
    return out


def measurement_unitary(
    answers: int, povms: list[list[ComplexMatrix]]
) -> ComplexMatrix:
    """Σ_q |q⟩⟨q| ⊗ Σ_a S_a ⊗ Π^q_a on (question, answer, ancilla).

    ``povms[q][a]`` are orthogonal projectors on the ancilla that sum to I;
    S_a XORs a into the answer register.
    """
    n_q = len(povms)
    d_p = povms[0][0].shape[0]
    out = np.zeros((n_q * answers * d_p, n_q * answers * d_p), dtype=np.complex128)
    block = answers * d_p
    for q, projectors in enumerate(povms):
        local = sum(
            np.kron(_xor_shift(answers, a), proj) for a, proj in enumerate(projectors)
        )
        out[q * block : (q + 1) * block, q * block : (q + 1) * block] = local
    return out


def _shared_state(dim: int, d_p: int) -> ComplexMatrix:
    """|0⟩ on V⊗M₁⊗M₂ times the maximally entangled state on P₁⊗P₂."""
    head = np.zeros(dim, dtype=np.complex128)
    head[0] = 1.0
    phi = np.eye(d_p, dtype=np.complex128).reshape(-1) / math.sqrt(d_p)
    return np.kron(head, phi)


def chsh_classical() -> ProverStrategy:
    spec = chsh_spec()
    psi = np.zeros(spec.dim, dtype=np.complex128)
    psi[0] = 1.0
    return ProverStrategy(
        d_p1=1,
        d_p2=1,
        u1=np.eye(spec.d_m1, dtype=np.complex128),
        u2=np.eye(spec.d_m2, dtype=np.complex128),
        psi=psi,
    )


def chsh_optimal() -> ProverStrategy:
    spec = chsh_spec()
    alice = [_Z, _X]
    bob = [(_Z + _X) / math.sqrt(2), (_Z - _X) / math.sqrt(2)]
    u1 = measurement_unitary(2, [[_outcome_projector(o, a) for a in (0, 1)] for o in alice])
    # for |Φ⁺⟩, ⟨A⊗B⟩ = Tr(A·Bᵀ)/2; these observables are real symmetric
    u2 = measurement_unitary(2, [[_outcome_projector(o.T, b) for b in (0, 1)] for o in bob])
    return ProverStrategy(d_p1=2, d_p2=2, u1=u1, u2=u2, psi=_shared_state(spec.dim, 2))


def magic_square_optimal() -> ProverStrategy:
    spec = magic_square_spec()
    alice: list[list[ComplexMatrix]] = []
    for r in range(3):
        first, second = MAGIC_SQUARE[r][0], MAGIC_SQUARE[r][1]
        alice.append(
            [
                _outcome_projector(first, a0) @ _outcome_projector(second, a1)
                for a0, a1 in itertools.product((0, 1), repeat=2)
            ]
        )
    bob: list[list[ComplexMatrix]] = []
    for c in range(3):
        first, second = MAGIC_SQUARE[0][c].T, MAGIC_SQUARE[1][c].T
        bob.append(
            [
                _outcome_projector(first, b0) @ _outcome_projector(second, b1)
                for b0, b1 in itertools.product((0, 1), repeat=2)
            ]
        )
    return ProverStrategy(
        d_p1=4,
        d_p2=4,
        u1=measurement_unitary(4, alice),
        u2=measurement_unitary(4, bob),
        psi=_shared_state(spec.dim, 4),
    )


FIXTURES = {
    "chsh-classical": chsh_classical,
    "chsh-optimal": chsh_optimal,
    "magicsquare-optimal": magic_square_optimal,
}
