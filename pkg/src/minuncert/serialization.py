"""JSON encoding for matrices, reports, families and search results.

Matrices use ``{"dim": n, "entries": [[re, im], ...]}`` with ``n²`` entries in
row-major order.  Vectors are lists of ``[re, im]`` pairs.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, fields
from pathlib import Path

import numpy as np

from .counterexample import SaturatingFamily
from .errors import InputError
from .operator_core import DensityMatrix, HermitianOperator, UncertaintyReport
from .search import SearchConfig, SearchResult


def _pair(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _unpair(p) -> complex:
    if not isinstance(p, (list, tuple)) or len(p) != 2:
        raise InputError(f"expected a [re, im] pair, got {p!r}")
    try:
        re, im = float(p[0]), float(p[1])
    except (TypeError, ValueError) as exc:
        raise InputError(f"non-numeric entry {p!r}") from exc
    if not (math.isfinite(re) and math.isfinite(im)):
        raise InputError(f"non-finite entry {p!r}")
    return complex(re, im)


def matrix_to_json(m) -> dict:
    if isinstance(m, (HermitianOperator, DensityMatrix)):
        m = m.matrix
    m = np.asarray(m)
    return {"dim": int(m.shape[0]), "entries": [_pair(z) for z in m.ravel()]}


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "dim" not in obj or "entries" not in obj:
        raise InputError('matrix JSON must be an object with "dim" and "entries"')
    dim = obj["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputError(f"dim must be a positive integer, got {dim!r}")
    entries = obj["entries"]
    if not isinstance(entries, list) or len(entries) != dim * dim:
        got = len(entries) if isinstance(entries, list) else type(entries).__name__
        raise InputError(f"expected {dim * dim} entries for dim={dim}, got {got}")
    return np.array([_unpair(e) for e in entries], dtype=np.complex128).reshape(dim, dim)


def vector_to_json(v) -> list[list[float]]:
    return [_pair(z) for z in np.asarray(v).ravel()]


def vector_from_json(obj) -> np.ndarray:
    if not isinstance(obj, list):
        raise InputError("vector JSON must be a list of [re, im] pairs")
    return np.array([_unpair(e) for e in obj], dtype=np.complex128)


def load_json(path) -> object:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(obj, path=None, indent: int | None = 2) -> str:
    text = json.dumps(obj, indent=indent, allow_nan=False)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text


def load_observable(path) -> HermitianOperator:
    return HermitianOperator(matrix_from_json(load_json(path)))


def save_matrix(m, path) -> None:
    dump_json(matrix_to_json(m), path)


# --------------------------------------------------------------------------
# value types
# --------------------------------------------------------------------------

def report_to_dict(r: UncertaintyReport) -> dict:
    return {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v)) for k, v in asdict(r).items()}


def report_from_dict(d: dict) -> UncertaintyReport:
    names = [f.name for f in fields(UncertaintyReport)]
    missing = set(names) - set(d)
    if missing:
        raise InputError(f"report is missing {sorted(missing)}")
    return UncertaintyReport(**{k: d[k] for k in names})


def family_to_dict(f: SaturatingFamily) -> dict:
    return {
        "lambda": float(f.lam),
        "eigenvalue": _pair(f.eigenvalue),
        "kernel_basis": [vector_to_json(f.kernel_basis[:, k]) for k in range(f.kernel_dim)],
        "canonical_state": matrix_to_json(f.canonical_state),
        "report": report_to_dict(f.report),
    }


def family_from_dict(d: dict) -> SaturatingFamily:
    basis = np.column_stack([vector_from_json(v) for v in d["kernel_basis"]])
    return SaturatingFamily(
        lam=float(d["lambda"]),
        eigenvalue=_unpair(d["eigenvalue"]),
        kernel_basis=basis,
        canonical_state=DensityMatrix(matrix_from_json(d["canonical_state"])),
        report=report_from_dict(d["report"]),
    )


def config_to_dict(cfg: SearchConfig) -> dict:
    return asdict(cfg)


def config_from_dict(d: dict) -> SearchConfig:
    return SearchConfig(**{f.name: d[f.name] for f in fields(SearchConfig) if f.name in d})


def result_to_dict(r: SearchResult, cfg: SearchConfig | None = None) -> dict:
    out = {
        "state": matrix_to_json(r.state),
        "report": report_to_dict(r.report),
        "objective_trace": [float(x) for x in r.objective_trace],
        "converged": bool(r.converged),
        "iterations": int(r.iterations),
        "method": r.method,
    }
    if cfg is not None:
        out["config"] = config_to_dict(cfg)
    return out


def result_from_dict(d: dict) -> SearchResult:
    return SearchResult(
        state=DensityMatrix(matrix_from_json(d["state"])),
        report=report_from_dict(d["report"]),
        objective_trace=[float(x) for x in d["objective_trace"]],
        converged=bool(d["converged"]),
        iterations=int(d["iterations"]),
        method=d.get("method", "gradient"),
    )
