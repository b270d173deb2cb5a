"""JSON wire format for Choi and transfer matrices.

Both are written as ``{"dim": d, "<key>": [[re, im], ...]}`` listing the
d^2 x d^2 entries in row-major order; the key is ``entries`` for Choi
matrices and ``transfer`` for superoperators.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .superop import ChoiMatrix, Superoperator


class ParseError(ValueError):
    def __init__(self, message: str, offset: int | None = None):
        where = "" if offset is None else f" at byte {offset}"
        super().__init__(f"{message}{where}")
        self.offset = offset


def _pairs(m: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(m).ravel(order="C")]


def _matrix(data: dict, key: str) -> np.ndarray:
    if not isinstance(data, dict) or "dim" not in data or key not in data:
        raise ParseError(f"expected an object with 'dim' and '{key}'")
    try:
        d = int(data["dim"])
        arr = np.asarray(data[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed '{key}': {exc}") from exc
    n = d * d
    if d < 1 or arr.shape != (n * n, 2):
        raise ParseError(f"'{key}' must hold {n * n} [re, im] pairs for dim {d}, got shape {arr.shape}")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(n, n)


def _loads(text: str | bytes) -> dict:
    raw = text.encode() if isinstance(text, str) else text
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        offset = len(exc.doc[:exc.pos].encode()) if isinstance(exc.doc, str) else exc.pos
        raise ParseError(exc.msg, offset) from exc
    except UnicodeDecodeError as exc:
        raise ParseError("input is not UTF-8", exc.start) from exc


def choi_to_dict(c: ChoiMatrix) -> dict:
    return {"dim": c.dim, "entries": _pairs(c.entries)}


def choi_from_dict(data: dict) -> ChoiMatrix:
    return ChoiMatrix(_matrix(data, "entries"))


def superop_to_dict(phi: Superoperator) -> dict:
    return {"dim": phi.dim, "transfer": _pairs(phi.transfer)}


def superop_from_dict(data: dict) -> Superoperator:
    return Superoperator(_matrix(data, "transfer"))


def dumps_choi(c: ChoiMatrix) -> str:
    return json.dumps(choi_to_dict(c))


def loads_choi(text: str | bytes) -> ChoiMatrix:
    return choi_from_dict(_loads(text))


def dumps_superop(phi: Superoperator) -> str:
    return json.dumps(superop_to_dict(phi))


def loads_superop(text: str | bytes) -> Superoperator:
    return superop_from_dict(_loads(text))


def read_choi(path) -> ChoiMatrix:
    return loads_choi(Path(path).read_bytes())


def write_choi(path, c: ChoiMatrix) -> None:
    Path(path).write_text(dumps_choi(c))
