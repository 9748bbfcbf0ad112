"""JSON system files: parsing, validation and conversion to generators.

Layout (schema_version 1)::

    {
      "schema_version": 1,
      "n_s": 2, "n_a": 2,
      "hamiltonians": [{"name": "H0", "matrix": [[[re, im], ...], ...]}, ...],
      "rho_a": <matrix>, "rho_s": <matrix>, "target_x": <matrix>,
      "tolerance": {"rank_tol": 1e-9, "residual_tol": 1e-9}
    }

Matrices are row-major nested lists whose entries are ``[re, im]`` pairs or
plain real numbers. Only ``n_s``, ``n_a`` and ``hamiltonians`` are required.
"""
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .operators import BipartiteSplit, Tolerance, is_hermitian, trace_project

SCHEMA_VERSION = 1


class SpecFileError(ValueError):
    """Malformed system file; the message names the offending field."""


@dataclass(frozen=True, eq=False)
class SystemSpec:
    n_s: int
    n_a: int
    hamiltonians: tuple
    names: tuple
    rho_a: np.ndarray | None = None
    rho_s: np.ndarray | None = None
    target_x: np.ndarray | None = None
    tolerance: Tolerance | None = None
    source: str = ""

    @property
    def split(self):
        return BipartiteSplit(self.n_s, self.n_a)

    def generators(self):
        """Skew-Hermitian generators ``i (H - tr(H)/n)``."""
        return [1j * trace_project(h) for h in self.hamiltonians]


def parse_entry(x, where):
    if isinstance(x, bool):
        raise SpecFileError(f"{where}: booleans are not matrix entries")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(x[0], x[1])
    raise SpecFileError(f"{where}: expected [re, im] or a real number, got {x!r}")


def parse_matrix(rows, n, where):
    if not isinstance(rows, list):
        raise SpecFileError(f"{where}: expected a list of rows")
    if len(rows) != n:
        raise SpecFileError(f"{where}: expected {n} rows, got {len(rows)}")
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise SpecFileError(f"{where} row {i}: expected {n} entries, got {got}")
        for j, x in enumerate(row):
            out[i, j] = parse_entry(x, f"{where} row {i} column {j}")
    return out


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _positive_int(doc, key):
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise SpecFileError(f"{key}: expected a positive integer, got {v!r}")
    return v


def parse_spec(doc, source="<memory>", herm_tol=1e-9):
    if not isinstance(doc, dict):
        raise SpecFileError("top level: expected a JSON object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SpecFileError(f"schema_version: unsupported value {version!r}")
    n_s = _positive_int(doc, "n_s")
    n_a = _positive_int(doc, "n_a")
    n = n_s * n_a
    hams = doc.get("hamiltonians")
    if not isinstance(hams, list) or not hams:
        raise SpecFileError("hamiltonians: expected a non-empty list")
    mats, names = [], []
    for k, h in enumerate(hams):
        if isinstance(h, dict):
            name = str(h.get("name", f"H{k}"))
            rows = h.get("matrix")
        else:
            name, rows = f"H{k}", h
        where = f"hamiltonians[{k}] ({name})"
        m = parse_matrix(rows, n, where)
        if not is_hermitian(m, herm_tol * max(1.0, np.linalg.norm(m))):
            raise SpecFileError(f"{where}: matrix is not Hermitian")
        mats.append(m)
        names.append(name)
    opt = {}
    for key, dim in (("rho_a", n_a), ("rho_s", n_s), ("target_x", n_s)):
        if doc.get(key) is not None:
            opt[key] = parse_matrix(doc[key], dim, key)
    tol = None
    if doc.get("tolerance") is not None:
        t = doc["tolerance"]
        if not isinstance(t, dict):
            raise SpecFileError("tolerance: expected an object")
        unknown = set(t) - {"rank_tol", "residual_tol"}
        if unknown:
            raise SpecFileError(f"tolerance: unknown keys {sorted(unknown)}")
        try:
            tol = Tolerance(**{k: float(v) for k, v in t.items()})
        except (TypeError, ValueError) as exc:
            raise SpecFileError(f"tolerance: {exc}") from None
    return SystemSpec(n_s, n_a, tuple(mats), tuple(names), tolerance=tol, source=source, **opt)


def load_spec(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None
    except OSError as exc:
        raise SpecFileError(f"{path}: {exc.strerror}") from None
    return parse_spec(doc, str(path))


def load_matrix(path, n, label):
    """A matrix from a file holding either a bare nested list or ``{"matrix": ...}``."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None
    except OSError as exc:
        raise SpecFileError(f"{path}: {exc.strerror}") from None
    if isinstance(doc, dict):
        doc = doc.get("matrix")
    return parse_matrix(doc, n, f"{label} ({path})")


def spec_to_json(spec):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "n_s": spec.n_s,
        "n_a": spec.n_a,
        "hamiltonians": [
            {"name": nm, "matrix": matrix_to_json(h)} for nm, h in zip(spec.names, spec.hamiltonians)
        ],
    }
    for key in ("rho_a", "rho_s", "target_x"):
        if getattr(spec, key) is not None:
            doc[key] = matrix_to_json(getattr(spec, key))
    if spec.tolerance is not None:
        doc["tolerance"] = {
            "rank_tol": spec.tolerance.rank_tol, "residual_tol": spec.tolerance.residual_tol
        }
    return doc
