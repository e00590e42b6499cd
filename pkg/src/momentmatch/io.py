"""Model files (JSON), dataset files (CSV) and result documents.

Model file layout::

    {
      "name": "bernoulli",                      # optional
      "variables": [{"name": "x", "role": "obs", "symbols": ["0", "1"]}],
      "stat_dim": 1,
      "statistics": [{"assign": {"x": "0"}, "t": [0]},
                     {"assign": {"x": "1"}, "t": [1]}],
      "log_h": [{"assign": {"x": "0"}, "value": "-inf"}]   # optional, default 0
    }

``statistics`` must list every full configuration exactly once.  Output
documents write floats with 17 significant digits so they re-parse exactly;
non-finite values are written as the strings "inf", "-inf" and "nan".
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from typing import Any

import numpy as np

from .core import LABEL_RE, Dataset, FamilySpec, Role, VariableSpec
from .errors import ParseError, SchemaError, SpecError
from .learning import FitResult, MomentReport

_ROLES = {r.value: r for r in Role}
_MODEL_KEYS = {"name", "variables", "stat_dim", "statistics", "log_h"}


def _fmt_assign(assign: dict[str, str]) -> str:
    return "{" + ", ".join(f"{k}={v}" for k, v in assign.items()) + "}"


def _number(value, path: str, allow_neg_inf: bool = False) -> float:
    if allow_neg_inf and value == "-inf":
        return -math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{path}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise SchemaError(f"{path}: non-finite number")
    return float(value)


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise SchemaError(f"{path}: missing key {key!r}")
    return doc[key]


def _parse_variables(raw) -> list[VariableSpec]:
    if not isinstance(raw, list) or not raw:
        raise SchemaError("variables: expected a non-empty list")
    out = []
    for k, v in enumerate(raw):
        path = f"variables[{k}]"
        if not isinstance(v, dict):
            raise SchemaError(f"{path}: expected an object")
        name = _require(v, "name", path)
        role = _require(v, "role", path)
        symbols = _require(v, "symbols", path)
        if not isinstance(name, str) or not LABEL_RE.match(name):
            raise SchemaError(f"{path}.name: invalid variable name {name!r}")
        if role not in _ROLES:
            raise SchemaError(f"{path}.role: unknown role {role!r} (expected cond, obs or hid)")
        if not isinstance(symbols, list) or not symbols:
            raise SchemaError(f"{path}.symbols: expected a non-empty list")
        for j, s in enumerate(symbols):
            if not isinstance(s, str) or not LABEL_RE.match(s):
                raise SchemaError(f"{path}.symbols[{j}]: invalid label {s!r}")
        try:
            out.append(VariableSpec(name, _ROLES[role], tuple(symbols)))
        except SpecError as e:
            raise SchemaError(f"{path}: {e}") from None
    return out


def _resolve_assign(spec_vars, assign, path: str) -> tuple[int, ...]:
    if not isinstance(assign, dict):
        raise SchemaError(f"{path}: expected an object")
    names = [v.name for v in spec_vars]
    if set(assign) != set(names):
        raise SchemaError(f"{path}: must assign exactly the variables {names}, got {sorted(assign)}")
    idx = []
    for v in spec_vars:
        label = assign[v.name]
        if label not in v.symbols:
            raise SchemaError(f"{path}.{v.name}: unknown symbol {label!r}")
        idx.append(v.symbols.index(label))
    return tuple(idx)


def parse_model(text: str) -> FamilySpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise SchemaError("<root>: expected an object")
    unknown = set(doc) - _MODEL_KEYS
    if unknown:
        raise SchemaError(f"<root>: unknown key(s) {sorted(unknown)}")

    variables = _parse_variables(_require(doc, "variables", "<root>"))
    if len({v.name for v in variables}) != len(variables):
        raise SchemaError("variables: duplicate variable names")
    d = _require(doc, "stat_dim", "<root>")
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise SchemaError(f"stat_dim: expected a positive integer, got {d!r}")

    shape = tuple(v.cardinality for v in variables)
    n = math.prod(shape)
    T = np.full((n, d), np.nan)
    seen = np.zeros(n, dtype=bool)
    stats = _require(doc, "statistics", "<root>")
    if not isinstance(stats, list):
        raise SchemaError("statistics: expected a list")
    for k, entry in enumerate(stats):
        path = f"statistics[{k}]"
        if not isinstance(entry, dict):
            raise SchemaError(f"{path}: expected an object")
        flat = int(np.ravel_multi_index(
            _resolve_assign(variables, _require(entry, "assign", path), f"{path}.assign"), shape))
        if seen[flat]:
            raise SchemaError(f"{path}: duplicate configuration {_fmt_assign(entry['assign'])}")
        t = _require(entry, "t", path)
        if not isinstance(t, list) or len(t) != d:
            raise SchemaError(f"{path}.t: expected a list of {d} numbers")
        T[flat] = [_number(x, f"{path}.t[{j}]") for j, x in enumerate(t)]
        seen[flat] = True
    if not seen.all():
        missing = np.unravel_index(int(np.flatnonzero(~seen)[0]), shape)
        assign = {v.name: v.symbols[i] for v, i in zip(variables, missing)}
        raise SchemaError(f"statistics: missing configuration {_fmt_assign(assign)}")

    log_h = np.zeros(n)
    lh_seen = np.zeros(n, dtype=bool)
    lh_entries = doc.get("log_h", [])
    if not isinstance(lh_entries, list):
        raise SchemaError("log_h: expected a list")
    for k, entry in enumerate(lh_entries):
        path = f"log_h[{k}]"
        if not isinstance(entry, dict):
            raise SchemaError(f"{path}: expected an object")
        flat = int(np.ravel_multi_index(
            _resolve_assign(variables, _require(entry, "assign", path), f"{path}.assign"), shape))
        if lh_seen[flat]:
            raise SchemaError(f"{path}: duplicate configuration {_fmt_assign(entry['assign'])}")
        log_h[flat] = _number(_require(entry, "value", path), f"{path}.value", allow_neg_inf=True)
        lh_seen[flat] = True

    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise SchemaError("name: expected a string")
    try:
        return FamilySpec(tuple(variables), d, T, log_h, name=name)
    except SpecError as e:
        raise SchemaError(f"<root>: {e}") from None


def model_document(spec: FamilySpec) -> dict[str, Any]:
    doc: dict[str, Any] = {}
    if spec.name is not None:
        doc["name"] = spec.name
    doc["variables"] = [
        {"name": v.name, "role": v.role.value, "symbols": list(v.symbols)} for v in spec.variables
    ]
    doc["stat_dim"] = spec.stat_dim
    doc["statistics"] = [
        {"assign": spec.labels(spec.configuration(i)), "t": [float(x) for x in spec.T[i]]}
        for i in range(spec.num_configs)
    ]
    log_h = [
        {"assign": spec.labels(spec.configuration(i)), "value": float(spec.log_h[i])}
        for i in range(spec.num_configs)
        if spec.log_h[i] != 0.0
    ]
    if log_h:
        doc["log_h"] = log_h
    return doc


def serialize_model(spec: FamilySpec) -> str:
    return dumps(model_document(spec))


def parse_dataset(text: str, spec: FamilySpec) -> Dataset:
    """Parse CSV rows of symbol labels; the header names every COND and OBS variable."""
    lines = [ln for ln in csv.reader(_io.StringIO(text))]
    numbered = [(k + 1, ln) for k, ln in enumerate(lines) if ln and any(c.strip() for c in ln)]
    if not numbered:
        raise SchemaError("line 1: empty dataset file (no header)")
    header_line, header = numbered[0]
    header = [h.strip() for h in header]
    hidden = [h for h in header if h in spec.names_with_role(Role.HID)]
    if hidden:
        raise SchemaError(f"line {header_line}: header names hidden variable(s) {hidden}")
    expected = set(spec.names_with_role(Role.COND, Role.OBS))
    if len(set(header)) != len(header) or set(header) != expected:
        raise SchemaError(
            f"line {header_line}: header {header} must name exactly {sorted(expected)}"
        )
    variables = [spec.variable(h) for h in header]
    rows = []
    for lineno, cells in numbered[1:]:
        if len(cells) != len(header):
            raise SchemaError(f"line {lineno}: expected {len(header)} fields, got {len(cells)}")
        row = {}
        for var, cell in zip(variables, cells):
            label = cell.strip()
            if label not in var.symbols:
                raise SchemaError(f"line {lineno}: unknown symbol {label!r} for variable {var.name!r}")
            row[var.name] = var.symbols.index(label)
        rows.append(row)
    if not rows:
        raise SchemaError(f"line {header_line}: dataset has a header but no rows")
    return Dataset(tuple(rows))


# -- output documents --------------------------------------------------


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, type(None), str)):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return format(x, ".17g")
        return json.dumps("nan" if math.isnan(x) else ("inf" if x > 0 else "-inf"))
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        if level > 0 and all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj.values()):
            return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}"
                                   for k, v in obj.items()) + "}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(doc, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits, newline-terminated."""
    return _encode(doc, indent, 0) + "\n"


def moment_document(report: MomentReport) -> dict[str, Any]:
    return {
        "data_side": [float(x) for x in report.data_side],
        "model_side": [float(x) for x in report.model_side],
        "residual_inf": float(report.residual_inf),
    }


def fit_document(result: FitResult) -> dict[str, Any]:
    doc = {
        "status": result.status.value,
        "theta_hat": [float(x) for x in result.theta_hat],
        "iterations": result.iterations,
        "loglik_final": float(result.loglik_final),
        "grad_inf_final": float(result.grad_inf_final),
        "mm_residual_inf": float(result.mm_residual_inf),
    }
    if result.moment is not None:
        doc["moment_report"] = moment_document(result.moment)
    return doc


def write_fit_result(result: FitResult) -> str:
    return dumps(fit_document(result))


def read_number(value) -> float:
    """Inverse of the float encoding used in output documents ("-inf" etc. included)."""
    return float(value)
