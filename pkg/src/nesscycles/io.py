"""File formats. All indices in files are 1-based."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math

import numpy as np

from .errors import NessError
from .markov import CONTINUOUS, DISCRETE, FluxField, MarkovProcess


class ParseError(NessError):
    exit_code = 2


def _index(value, n, what):
    if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= n:
        raise ParseError(f"{what}: state index {value!r} is not an integer in 1..{n}")
    return value - 1


def _number(value, what):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ParseError(f"{what}: {value!r} is not a finite number")
    return float(value)


def parse_model(text: str) -> MarkovProcess:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError("model must be a JSON object")
    time_kind = data.get("time", CONTINUOUS)
    if time_kind not in (CONTINUOUS, DISCRETE):
        raise ParseError(f"'time' must be 'continuous' or 'discrete', not {time_kind!r}")
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError("'n' must be a positive integer")
    edges = []
    for k, e in enumerate(data.get("edges", [])):
        if not isinstance(e, list) or len(e) != 3:
            raise ParseError(f"edges[{k}] must be [i, j, rate]")
        i, j = _index(e[0], n, f"edges[{k}]"), _index(e[1], n, f"edges[{k}]")
        if i == j:
            raise ParseError(f"edges[{k}] is a loop; use 'loops' (discrete time only)")
        edges.append((i, j, _number(e[2], f"edges[{k}] rate")))
    loops = []
    for k, lp in enumerate(data.get("loops", [])):
        if time_kind != DISCRETE:
            raise ParseError("'loops' are only allowed for discrete time")
        if not isinstance(lp, list) or len(lp) != 2:
            raise ParseError(f"loops[{k}] must be [i, p]")
        loops.append((_index(lp[0], n, f"loops[{k}]"), _number(lp[1], f"loops[{k}] p")))
    return MarkovProcess.from_edges(n, edges, time_kind, loops)


def load_model(path) -> tuple[MarkovProcess, str]:
    """Return the process and the sha256 digest of the file bytes."""
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"model file is not UTF-8: {exc}") from exc
    return parse_model(text), hashlib.sha256(raw).hexdigest()


def model_to_json(p: MarkovProcess) -> dict:
    w = p.off_diagonal
    data = {
        "time": p.time_kind,
        "n": p.n_states,
        "edges": [[int(i) + 1, int(j) + 1, float(w[i, j])] for i, j in zip(*np.nonzero(w > 0))],
    }
    if p.is_discrete:
        diag = np.diag(p.rates)
        data["loops"] = [[int(i) + 1, float(diag[i])] for i in np.nonzero(diag > 0)[0]]
    return data


def flux_to_json(f: FluxField) -> dict:
    data = {
        "n": f.n_states,
        "fluxes": [[int(i) + 1, int(j) + 1, float(f.phi[i, j])] for i, j in zip(*np.nonzero(f.phi > 0))],
    }
    if f.loops is not None:
        data["loops"] = [[int(i) + 1, float(v)] for i, v in enumerate(f.loops)]
    return data


def flux_from_json(data: dict) -> FluxField:
    n = data["n"]
    phi = np.zeros((n, n))
    for i, j, v in data["fluxes"]:
        phi[i - 1, j - 1] = v
    loops = None
    if "loops" in data:
        loops = np.zeros(n)
        for i, v in data["loops"]:
            loops[i - 1] = v
    return FluxField(phi, loops)


def fmt(x: float) -> str:
    """12 significant digits; NA for undefined."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "NA"
    return f"{x:.12g}"


def thermo_csv(t) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["edge", "I", "A", "U", "E", "R"])
    for i, j in t.edges():
        for a, b in ((i, j), (j, i)):
            out.writerow([f"{a + 1}->{b + 1}", fmt(t.I[a, b]), fmt(t.A[a, b]),
                          fmt(t.U[a, b]), fmt(t.E[a, b]), fmt(t.R[a, b])])
    return buf.getvalue()


def sweep_csv(rows) -> str:
    names = ("alpha", "beta", "gamma", "delta")
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["x"] + [f"m_{k}" for k in names] + [f"m_{k}_raw" for k in names] + ["support_tag"])
    for r in rows:
        out.writerow([fmt(r.x)] + [fmt(r.scaled[k]) for k in names]
                     + [fmt(r.raw[k]) for k in names] + [r.support_tag])
    return buf.getvalue()
