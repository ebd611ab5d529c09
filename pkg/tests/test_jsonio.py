from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from prodnorm.errors import InputError, InvalidSpecError
from prodnorm.games import acceptance_probability, chsh_game, chsh_spec, classical_value
from prodnorm.jsonio import (
    ClassicalGamePayload,
    MatrixPayload,
    SpecPayload,
    StrategyPayload,
    SuperoperatorPayload,
    dump,
    load_game,
    load_matrix,
    load_spec,
    load_strategy,
    load_superoperator,
    write_json,
)
from prodnorm.linalg import Bipartition
from prodnorm.sop import transpose_sop
from prodnorm.strategies import chsh_optimal


def test_matrix_payload_layout() -> None:
    a = np.array([[1 + 2j, 0], [3, -1j]])
    payload = MatrixPayload.from_array(a)
    assert dump(payload) == {
        "rows": 2,
        "cols": 2,
        "data": [[1.0, 2.0], [0.0, 0.0], [3.0, 0.0], [0.0, -1.0]],
    }
    assert np.array_equal(payload.to_array(), a)


def test_vectors_travel_as_columns(tmp_path: Path) -> None:
    path = tmp_path / "u.json"
    write_json(path, MatrixPayload.from_array(np.array([1.0, 0.0, 0.0])))
    raw = json.loads(path.read_text(encoding="utf-8"))
    assert (raw["rows"], raw["cols"]) == (3, 1)
    assert load_matrix(path).shape == (3, 1)


def test_matrix_payload_rejects_bad_data(tmp_path: Path) -> None:
    path = tmp_path / "bad.json"
    path.write_text('{"rows": 2, "cols": 2, "data": [[1, 0], [0, 0]]}', encoding="utf-8")
    with pytest.raises(InvalidSpecError) as e:
        load_matrix(path)
    assert "expected 2x2" in str(e.value)

    path.write_text('{"rows": 1, "cols": 1, "data": [[NaN, 0]]}', encoding="utf-8")
    with pytest.raises(InvalidSpecError):
        load_matrix(path)

    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(InvalidSpecError) as e:
        load_matrix(path)
    assert "invalid matrix JSON" in str(e.value)

    with pytest.raises(InputError):
        load_matrix(tmp_path / "missing.json")


def test_unknown_fields_are_rejected(tmp_path: Path) -> None:
    path = tmp_path / "extra.json"
    path.write_text('{"rows": 1, "cols": 1, "data": [[1, 0]], "dtype": "c16"}', encoding="utf-8")
    with pytest.raises(InvalidSpecError):
        load_matrix(path)


def test_superoperator_file(tmp_path: Path) -> None:
    t = transpose_sop(2, Bipartition(1, 2))
    path = tmp_path / "t.json"
    write_json(path, SuperoperatorPayload.from_superoperator(t))
    raw = json.loads(path.read_text(encoding="utf-8"))
    assert (raw["dimIn"], raw["d1"], raw["d2"], len(raw["action"])) == (2, 1, 2, 4)
    loaded = load_superoperator(path)
    assert np.array_equal(loaded.action, t.action)

    raw["action"] = raw["action"][:3]
    path.write_text(json.dumps(raw), encoding="utf-8")
    with pytest.raises(InvalidSpecError):
        load_superoperator(path)


def test_spec_and_strategy_files(tmp_path: Path) -> None:
    spec_path, strat_path = tmp_path / "chsh.spec.json", tmp_path / "chsh.strategy.json"
    write_json(spec_path, SpecPayload.from_spec(chsh_spec()))
    write_json(strat_path, StrategyPayload.from_strategy(chsh_optimal()))
    raw = json.loads(spec_path.read_text(encoding="utf-8"))
    assert {"dV", "dM1", "dM2", "v1", "v2", "piInit", "piAcc"} == set(raw)
    value = acceptance_probability(load_spec(spec_path), load_strategy(strat_path))
    assert value == pytest.approx(np.cos(np.pi / 8) ** 2, abs=1e-9)


def test_spec_file_is_validated(tmp_path: Path) -> None:
    payload = dump(SpecPayload.from_spec(chsh_spec()))
    payload["dV"] = 4
    path = tmp_path / "bad.spec.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(InvalidSpecError):
        load_spec(path)


def test_game_file(tmp_path: Path) -> None:
    path = tmp_path / "chsh.game.json"
    write_json(path, ClassicalGamePayload.from_game(chsh_game()))
    assert classical_value(load_game(path)) == pytest.approx(0.75)

    raw = json.loads(path.read_text(encoding="utf-8"))
    raw["predicate"] = raw["predicate"][:-1]
    path.write_text(json.dumps(raw), encoding="utf-8")
    with pytest.raises(InvalidSpecError):
        load_game(path)


def test_written_file_is_indented_camel_case(tmp_path: Path) -> None:
    path = tmp_path / "t.json"
    write_json(path, SuperoperatorPayload.from_superoperator(transpose_sop(2, Bipartition(1, 2))))
    text = path.read_text(encoding="utf-8")
    assert text.startswith('{\n  "dimIn": 2,')
    assert text.endswith("}\n")
