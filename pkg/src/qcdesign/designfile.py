"""Versioned JSON design files.

One design per file, or a homogeneous set under ``members``.  Complex
numbers are [re, im] pairs and holes are null; Python's shortest-round-trip
float serialization makes write/read bit-exact.  Row vectors of orthogonal
arrays and generalized cells are stored sparsely as [index, re, im]
triples because their ambient dimensions reach into the millions.
"""

from __future__ import annotations

import json

import numpy as np
import scipy.sparse as sp

from .classical import HOLE, LatinDesign, OrthogonalArray
from .qdesign import QuantumGrid
from .qoa import GeneralizedGrid, PureState, QuantumOrthogonalArray

FORMAT_VERSION = 1


class DesignFormatError(ValueError):
    """Raised when a file does not parse into a known design."""


def _complex_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _vector_payload(vec: np.ndarray) -> list[list[float]]:
    return [_complex_pair(z) for z in vec]


def _vector_from_payload(data, dim: int) -> np.ndarray:
    if len(data) != dim:
        raise DesignFormatError(f"vector length {len(data)} != {dim}")
    return np.array([complex(re, im) for re, im in data], dtype=np.complex128)


def _sparse_rows_payload(rows: sp.csr_matrix) -> list[list[list[float]]]:
    out = []
    for r in range(rows.shape[0]):
        start, stop = rows.indptr[r], rows.indptr[r + 1]
        out.append(
            [
                [int(i), float(v.real), float(v.imag)]
                for i, v in zip(rows.indices[start:stop], rows.data[start:stop])
            ]
        )
    return out


def _sparse_rows_from_payload(data, dim: int) -> sp.csr_matrix:
    mat = sp.lil_matrix((len(data), dim), dtype=np.complex128)
    for r, entries in enumerate(data):
        for i, re, im in entries:
            if not 0 <= int(i) < dim:
                raise DesignFormatError(f"amplitude index {i} out of range")
            mat[r, int(i)] = complex(re, im)
    return mat.tocsr()


def _grid_kind(g: QuantumGrid) -> str:
    if g.arity == 3:
        return "qlc"
    return "iqls" if g.holes else "qls"


def design_kind(obj) -> str:
    if isinstance(obj, LatinDesign):
        return "ls"
    if isinstance(obj, OrthogonalArray):
        return "oa"
    if isinstance(obj, QuantumGrid):
        return _grid_kind(obj)
    if isinstance(obj, GeneralizedGrid):
        return "gmoqls" if obj.arity == 2 else "gmoqlc"
    if isinstance(obj, QuantumOrthogonalArray):
        return "qoa"
    if isinstance(obj, PureState):
        return "state"
    raise DesignFormatError(f"cannot serialize object of type {type(obj).__name__}")


def _single_payload(obj) -> dict:
    if isinstance(obj, LatinDesign):
        cells = [
            [None if v == HOLE else int(v) for v in row]
            for row in obj.cells.reshape(obj.order ** (obj.arity - 1), obj.order)
        ]
        return {
            "arity": obj.arity,
            "dim": obj.order,
            "holes": [list(s) for s in obj.holes],
            "cells": cells,
        }
    if isinstance(obj, OrthogonalArray):
        return {
            "rows": obj.rows,
            "factors": obj.factors,
            "levels": obj.levels,
            "strength": obj.strength,
            "body": obj.body.tolist(),
        }
    if isinstance(obj, QuantumGrid):
        mask = obj.hole_mask.reshape(-1)
        flat = obj.flat_cells()
        cells = [
            None if mask[n] else _vector_payload(flat[n]) for n in range(flat.shape[0])
        ]
        return {
            "arity": obj.arity,
            "dim": obj.order,
            "cell_dim": obj.cell_dim,
            "holes": [list(s) for s in obj.holes],
            "cells": cells,
        }
    if isinstance(obj, GeneralizedGrid):
        return {
            "arity": obj.arity,
            "dim": obj.order,
            "parties": obj.parties,
            "cells": _sparse_rows_payload(obj.cells),
        }
    if isinstance(obj, QuantumOrthogonalArray):
        return {
            "parties": obj.parties,
            "local_dim": obj.local_dim,
            "strength": obj.strength,
            "rows": _sparse_rows_payload(obj.rows),
        }
    if isinstance(obj, PureState):
        return {
            "parties": obj.parties,
            "local_dim": obj.local_dim,
            "amplitudes": _vector_payload(obj.amplitudes),
        }
    raise DesignFormatError(f"cannot serialize {type(obj).__name__}")


def _single_from_payload(kind: str, data: dict):
    if kind == "ls":
        arity, d = int(data["arity"]), int(data["dim"])
        flat = [
            HOLE if v is None else int(v) for row in data["cells"] for v in row
        ]
        cells = np.array(flat, dtype=np.int64).reshape((d,) * arity)
        return LatinDesign(arity, d, cells, tuple(tuple(s) for s in data["holes"]))
    if kind == "oa":
        return OrthogonalArray(
            int(data["rows"]),
            int(data["factors"]),
            int(data["levels"]),
            int(data["strength"]),
            np.array(data["body"], dtype=np.int64),
        )
    if kind in ("qls", "qlc", "iqls"):
        arity, d, cd = int(data["arity"]), int(data["dim"]), int(data["cell_dim"])
        cells = np.zeros((d,) * arity + (cd,), dtype=np.complex128)
        flat = cells.reshape(-1, cd)
        for n, cell in enumerate(data["cells"]):
            if cell is not None:
                flat[n] = _vector_from_payload(cell, cd)
        return QuantumGrid(
            arity, d, cd, cells, tuple(tuple(s) for s in data["holes"])
        )
    if kind in ("gmoqls", "gmoqlc"):
        arity, d, t = int(data["arity"]), int(data["dim"]), int(data["parties"])
        return GeneralizedGrid(
            arity, d, t, _sparse_rows_from_payload(data["cells"], d**t)
        )
    if kind == "qoa":
        n, d = int(data["parties"]), int(data["local_dim"])
        return QuantumOrthogonalArray(
            n, d, int(data["strength"]), _sparse_rows_from_payload(data["rows"], d**n)
        )
    if kind == "state":
        n, d = int(data["parties"]), int(data["local_dim"])
        return PureState(n, d, _vector_from_payload(data["amplitudes"], d**n))
    raise DesignFormatError(f"unknown design kind {kind!r}")


def save_design(path, obj, metadata: dict | None = None) -> None:
    """Write one design, or a homogeneous list of designs, as JSON."""
    payload: dict = {"format": FORMAT_VERSION}
    if isinstance(obj, (list, tuple)):
        kinds = {design_kind(o) for o in obj}
        if len(kinds) != 1:
            raise DesignFormatError("set members must share one kind")
        payload["kind"] = kinds.pop()
        payload["members"] = [_single_payload(o) for o in obj]
    else:
        payload["kind"] = design_kind(obj)
        payload.update(_single_payload(obj))
    if metadata:
        payload["metadata"] = metadata
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_design(path):
    """Read a design file; returns (object_or_list, kind, metadata)."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DesignFormatError(f"cannot parse {path}: {exc}") from exc
    try:
        if payload.get("format") != FORMAT_VERSION:
            raise DesignFormatError(f"unsupported format {payload.get('format')!r}")
        kind = payload["kind"]
        metadata = payload.get("metadata", {})
        if "members" in payload:
            members = [_single_from_payload(kind, m) for m in payload["members"]]
            return members, kind, metadata
        return _single_from_payload(kind, payload), kind, metadata
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, DesignFormatError):
            raise
        raise DesignFormatError(f"malformed design file {path}: {exc}") from exc
