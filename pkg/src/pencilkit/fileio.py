"""JSON file formats for pencils, structures and transforms.

Rationals are written as JSON integers when integral and as ``"p/q"``
strings otherwise; both forms are accepted on input, floats are not.

Pencil file::

    {"rows": 2, "cols": 2, "E": [[0, 1], [0, 0]], "A": [[1, 0], [0, 1]]}

Structure file (block sizes are string keys, counts are >= 1)::

    {"nilpotent": {"2": 1}, "l_blocks": {}, "lt_blocks": {},
     "core_dim": 1, "core": [["1/2"]]}

Transform file::

    {"P": {"rows": .., "cols": .., "data": [[..]]}, "Q": {..}, "R": {..}}

``R`` only appears for weak-equivalence transforms.
"""

from __future__ import annotations

import json
from pathlib import Path

from .canonical import KroneckerStructure, Transform
from .exactla import Matrix, rational
from .pencil import Pencil


class FormatError(ValueError):
    """Malformed or inconsistent input file."""


def rational_to_json(x):
    return int(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rational_from_json(x):
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise FormatError(f"rational literal must be an integer or a 'p/q' string, got {x!r}")
    try:
        return rational(x)
    except ValueError as e:
        raise FormatError(str(e)) from None


def grid_to_json(M: Matrix) -> list:
    return [[rational_to_json(x) for x in r] for r in M.entries]


def grid_from_json(data, rows: int, cols: int, what: str) -> Matrix:
    if not isinstance(data, list) or len(data) != rows:
        raise FormatError(f"{what} must have {rows} rows")
    out = []
    for i, r in enumerate(data):
        if not isinstance(r, list) or len(r) != cols:
            raise FormatError(f"row {i} of {what} must have {cols} entries")
        out.append([rational_from_json(x) for x in r])
    return Matrix.from_rows(out, cols)


def _dim(obj: dict, key: str) -> int:
    v = obj.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise FormatError(f"'{key}' must be a non-negative integer")
    return v


def matrix_to_json(M: Matrix) -> dict:
    return {"rows": M.rows, "cols": M.cols, "data": grid_to_json(M)}


def matrix_from_json(obj) -> Matrix:
    if not isinstance(obj, dict):
        raise FormatError("matrix must be an object")
    rows, cols = _dim(obj, "rows"), _dim(obj, "cols")
    return grid_from_json(obj.get("data"), rows, cols, "data")


def pencil_to_json(P: Pencil) -> dict:
    return {"rows": P.rows, "cols": P.cols, "E": grid_to_json(P.E), "A": grid_to_json(P.A)}


def pencil_from_json(obj) -> Pencil:
    if not isinstance(obj, dict):
        raise FormatError("pencil file must contain an object")
    rows, cols = _dim(obj, "rows"), _dim(obj, "cols")
    return Pencil(
        grid_from_json(obj.get("E"), rows, cols, "E"),
        grid_from_json(obj.get("A"), rows, cols, "A"),
    )


def structure_to_json(s: KroneckerStructure) -> dict:
    def counts(d):
        return {str(k): c for k, c in d.items()}

    return {
        "nilpotent": counts(s.nilpotent),
        "l_blocks": counts(s.l_blocks),
        "lt_blocks": counts(s.lt_blocks),
        "core_dim": s.core_dim,
        "core": None if s.core is None else grid_to_json(s.core),
    }


def structure_from_json(obj) -> KroneckerStructure:
    if not isinstance(obj, dict):
        raise FormatError("structure file must contain an object")
    parsed = {}
    for key in ("nilpotent", "l_blocks", "lt_blocks"):
        d = obj.get(key, {})
        if not isinstance(d, dict):
            raise FormatError(f"'{key}' must be an object")
        parsed[key] = {}
        for k, c in d.items():
            try:
                size = int(k)
            except ValueError:
                raise FormatError(f"block size {k!r} in '{key}' is not an integer") from None
            if isinstance(c, bool) or not isinstance(c, int) or c < 1 or size < 1:
                raise FormatError(f"'{key}' entry {k!r}: sizes and counts must be >= 1")
            parsed[key][size] = c
    core = obj.get("core")
    if core is not None:
        if not isinstance(core, list):
            raise FormatError("'core' must be a square array")
        n = len(core)
        core = grid_from_json(core, n, n, "core")
    core_dim = obj.get("core_dim", core.rows if core is not None else 0)
    if isinstance(core_dim, bool) or not isinstance(core_dim, int) or core_dim < 0:
        raise FormatError("'core_dim' must be a non-negative integer")
    if core is not None and core.rows != core_dim:
        raise FormatError("'core_dim' does not match the core matrix")
    return KroneckerStructure(
        parsed["nilpotent"], parsed["l_blocks"], parsed["lt_blocks"], core_dim, core
    )


def transform_to_json(T: Transform) -> dict:
    out = {"P": matrix_to_json(T.P), "Q": matrix_to_json(T.Q)}
    if T.R is not None:
        out["R"] = matrix_to_json(T.R)
    return out


def transform_from_json(obj) -> Transform:
    if not isinstance(obj, dict) or "P" not in obj or "Q" not in obj:
        raise FormatError("transform file needs 'P' and 'Q'")
    R = matrix_from_json(obj["R"]) if "R" in obj else None
    return Transform(matrix_from_json(obj["P"]), matrix_from_json(obj["Q"]), R)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def load_json(path: str | Path):
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e})") from None


def read_pencil(path: str | Path) -> Pencil:
    return pencil_from_json(load_json(path))


def read_structure(path: str | Path) -> KroneckerStructure:
    return structure_from_json(load_json(path))


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(dumps(obj))
