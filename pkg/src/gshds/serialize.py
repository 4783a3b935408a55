"""Machine-readable renderings of the library's results.

Every JSON document carries ``"schema": "gshds/1"`` and is written with
sorted keys, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .checks import Check
from .cyclotomic import CyclotomicInt
from .galgebra import AlgebraElement, GshdsCertificate
from .pgroup import GroupSpec, UnitOrbitTable

SCHEMA = "gshds/1"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float):
        return "inf" if math.isinf(obj) else obj
    if isinstance(obj, CyclotomicInt):
        return cyclotomic_json(obj)
    if isinstance(obj, Check):
        return obj.to_json()
    if isinstance(obj, GroupSpec):
        return group_json(obj)
    if isinstance(obj, AlgebraElement):
        return element_json(obj)
    if isinstance(obj, GshdsCertificate):
        return certificate_json(obj)
    return obj


def dumps(doc: dict) -> str:
    out = {"schema": SCHEMA}
    out.update(doc)
    return json.dumps(_plain(out), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def group_json(G: GroupSpec) -> dict:
    return {"p": G.p, "exponents": list(G.exponents), "order": G.v, "dsl": G.dsl}


def cyclotomic_json(z: CyclotomicInt) -> dict:
    c = z.canonical()
    return {"level": c.level, "coeffs": list(c.coeffs)}


def element_json(A: AlgebraElement) -> dict:
    """Sparse form: sorted (element, coefficient) pairs."""
    G = A.group
    return {"group": G.dsl,
            "terms": [[list(g), int(A.vec[G.index(g)])] for g in G.elements() if A.vec[G.index(g)]]}


def certificate_json(cert: GshdsCertificate, verified_by=()) -> dict:
    out = {"kind": cert.kind, "v": cert.v, "k": cert.k, "k0": cert.k0, "lambda": cert.lambda_,
           "n0": cert.n0, "ok": cert.ok, "params": list(cert.params)}
    if cert.reason:
        out["reason"] = cert.reason
    if cert.witness is not None:
        out["witness"] = list(cert.witness)
    if verified_by:
        out["verified_by"] = list(verified_by)
    return out


def table_json(table: UnitOrbitTable) -> dict:
    return {"r": table.r, "n0": table.n0, "ordering": table.ordering, "pairing": table.pairing_tag,
            "reps": [list(g) for g in table.reps], "orbit_sizes": list(table.orbit_sizes)}


def checks_json(checks) -> dict:
    return {c.name: ("pass" if c.ok else "FAIL") for c in checks}


def matrix_csv(M, row_labels=None, col_labels=None) -> str:
    M = np.asarray(M)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if col_labels is not None:
        w.writerow([""] + list(col_labels) if row_labels is not None else list(col_labels))
    for i, row in enumerate(M.tolist()):
        w.writerow(([row_labels[i]] if row_labels is not None else []) + row)
    return buf.getvalue()


def rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def text_lines(doc: dict, indent: int = 0) -> str:
    """A flat key: value rendering of a JSON document."""
    out = []
    pad = "  " * indent
    for k in sorted(doc):
        v = _plain(doc[k])
        if isinstance(v, dict):
            out.append(f"{pad}{k}:")
            out.append(text_lines(v, indent + 1).rstrip("\n"))
        else:
            out.append(f"{pad}{k}: {json.dumps(v) if isinstance(v, list) else v}")
    return "\n".join(x for x in out if x) + "\n"
