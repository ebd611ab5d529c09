"""JSON wire formats.

Every payload is a pydantic model with the camelCase field names used on
disk; ``load_*`` helpers turn files into library objects and ``dump_*``
helpers go the other way. Matrices travel as
``{"rows": r, "cols": c, "data": [[re, im], ...]}`` in row-major order;
vectors are r×1 matrices.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, TypeVar

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .constants import ERR_INPUT_NOT_FOUND, ERR_INVALID_JSON, ERR_MATRIX_DATA
from .errors import InputError, InvalidSpecError
from .games import ClassicalGame, ProverStrategy, VerifierSpec
from .linalg import Bipartition, ComplexMatrix
from .sop import Superoperator


class _Wire(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid", allow_inf_nan=False)


class MatrixPayload(_Wire):
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    data: list[tuple[float, float]]

    @model_validator(mode="after")
    def _check_length(self) -> MatrixPayload:
        if len(self.data) != self.rows * self.cols:
            raise ValueError(
                ERR_MATRIX_DATA.format(length=len(self.data), rows=self.rows, cols=self.cols)
            )
        return self

    def to_array(self) -> ComplexMatrix:
        pairs = np.asarray(self.data, dtype=np.float64).reshape(self.rows, self.cols, 2)
        return pairs[..., 0] + 1j * pairs[..., 1]

    @classmethod
    def from_array(cls, a: npt.ArrayLike) -> MatrixPayload:
        m = np.asarray(a, dtype=np.complex128)
        if m.ndim == 1:
            m = m.reshape(-1, 1)
        flat = m.reshape(-1)
        return cls(
            rows=m.shape[0],
            cols=m.shape[1],
            data=[(float(z.real), float(z.imag)) for z in flat],
        )


class SuperoperatorPayload(_Wire):
    dim_in: int = Field(alias="dimIn", ge=1)
    d1: int = Field(ge=1)
    d2: int = Field(ge=1)
    action: list[MatrixPayload]

    def to_superoperator(self) -> Superoperator:
        d = self.d1 * self.d2
        images = [m.to_array() for m in self.action]
        stacked = np.stack(images) if images else np.zeros((0, d, d), dtype=np.complex128)
        return Superoperator(
            dim_in=self.dim_in, out_part=Bipartition(self.d1, self.d2), action=stacked
        )

    @classmethod
    def from_superoperator(cls, t: Superoperator) -> SuperoperatorPayload:
        return cls(
            dim_in=t.dim_in,
            d1=t.out_part.d1,
            d2=t.out_part.d2,
            action=[MatrixPayload.from_array(img) for img in t.action],
        )


class SpecPayload(_Wire):
    d_v: int = Field(alias="dV", ge=1)
    d_m1: int = Field(alias="dM1", ge=1)
    d_m2: int = Field(alias="dM2", ge=1)
    v1: MatrixPayload
    v2: MatrixPayload
    pi_init: MatrixPayload = Field(alias="piInit")
    pi_acc: MatrixPayload = Field(alias="piAcc")

    def to_spec(self) -> VerifierSpec:
        return VerifierSpec(
            d_v=self.d_v,
            d_m1=self.d_m1,
            d_m2=self.d_m2,
            v1=self.v1.to_array(),
            v2=self.v2.to_array(),
            pi_init=self.pi_init.to_array(),
            pi_acc=self.pi_acc.to_array(),
        )

    @classmethod
    def from_spec(cls, spec: VerifierSpec) -> SpecPayload:
        return cls(
            d_v=spec.d_v,
            d_m1=spec.d_m1,
            d_m2=spec.d_m2,
            v1=MatrixPayload.from_array(spec.v1),
            v2=MatrixPayload.from_array(spec.v2),
            pi_init=MatrixPayload.from_array(spec.pi_init),
            pi_acc=MatrixPayload.from_array(spec.pi_acc),
        )


class StrategyPayload(_Wire):
    d_p1: int = Field(alias="dP1", ge=1)
    d_p2: int = Field(alias="dP2", ge=1)
    u1: MatrixPayload
    u2: MatrixPayload
    psi: MatrixPayload

    def to_strategy(self) -> ProverStrategy:
        return ProverStrategy(
            d_p1=self.d_p1,
            d_p2=self.d_p2,
            u1=self.u1.to_array(),
            u2=self.u2.to_array(),
            psi=self.psi.to_array().reshape(-1),
        )

    @classmethod
    def from_strategy(cls, strat: ProverStrategy) -> StrategyPayload:
        return cls(
            d_p1=strat.d_p1,
            d_p2=strat.d_p2,
            u1=MatrixPayload.from_array(strat.u1),
            u2=MatrixPayload.from_array(strat.u2),
            psi=MatrixPayload.from_array(strat.psi),
        )


class ClassicalGamePayload(_Wire):
    n_x: int = Field(alias="nX", ge=1)
    n_y: int = Field(alias="nY", ge=1)
    n_a: int = Field(alias="nA", ge=1)
    n_b: int = Field(alias="nB", ge=1)
    dist: list[float]
    predicate: list[bool]

    @model_validator(mode="after")
    def _check_sizes(self) -> ClassicalGamePayload:
        if len(self.dist) != self.n_x * self.n_y:
            raise ValueError(
                ERR_MATRIX_DATA.format(length=len(self.dist), rows=self.n_x, cols=self.n_y)
            )
        expected = self.n_x * self.n_y * self.n_a * self.n_b
        if len(self.predicate) != expected:
            raise ValueError(
                ERR_MATRIX_DATA.format(
                    length=len(self.predicate), rows=self.n_x * self.n_y, cols=self.n_a * self.n_b
                )
            )
        return self

    def to_game(self) -> ClassicalGame:
        return ClassicalGame(
            distribution=np.asarray(self.dist).reshape(self.n_x, self.n_y),
            predicate=np.asarray(self.predicate, dtype=bool).reshape(
                self.n_x, self.n_y, self.n_a, self.n_b
            ),
        )

    @classmethod
    def from_game(cls, game: ClassicalGame) -> ClassicalGamePayload:
        n_x, n_y = game.question_counts
        n_a, n_b = game.answer_counts
        return cls(
            n_x=n_x,
            n_y=n_y,
            n_a=n_a,
            n_b=n_b,
            dist=[float(p) for p in game.distribution.reshape(-1)],
            predicate=[bool(w) for w in game.predicate.reshape(-1)],
        )


P = TypeVar("P", bound=_Wire)


def read_payload(path: Path, model: type[P], kind: str) -> P:
    if not path.exists():
        raise InputError(ERR_INPUT_NOT_FOUND.format(path=path))
    try:
        return model.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise InvalidSpecError(ERR_INVALID_JSON.format(kind=kind, path=path, err=e)) from e


def load_matrix(path: Path) -> ComplexMatrix:
    return read_payload(path, MatrixPayload, "matrix").to_array()


def load_superoperator(path: Path) -> Superoperator:
    payload = read_payload(path, SuperoperatorPayload, "superoperator")
    try:
        return payload.to_superoperator()
    except ValueError as e:
        raise InvalidSpecError(
            ERR_INVALID_JSON.format(kind="superoperator", path=path, err=e)
        ) from e


def load_spec(path: Path) -> VerifierSpec:
    return read_payload(path, SpecPayload, "verifier spec").to_spec()


def load_strategy(path: Path) -> ProverStrategy:
    return read_payload(path, StrategyPayload, "strategy").to_strategy()


def load_game(path: Path) -> ClassicalGame:
    return read_payload(path, ClassicalGamePayload, "classical game").to_game()


def dump(payload: _Wire) -> dict[str, Any]:
    return payload.model_dump(by_alias=True, mode="json")


def write_json(path: Path, payload: _Wire) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(payload.model_dump_json(by_alias=True, indent=2) + "\n", encoding="utf-8")
