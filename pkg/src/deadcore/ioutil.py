"""Deterministic file I/O: canonical JSON and CSV with 17-significant-digit
floats, atomic writes, a flat key=value config format, and the "re,im"
complex-number encoding used by the CLI."""

from __future__ import annotations

import json
import math
import os
import tempfile

import numpy as np

FLOAT_FMT = ".17g"


def fmt_float(x: float) -> str:
    """Canonical decimal rendering; round trips float64 exactly."""
    return format(float(x), FLOAT_FMT)


def parse_complex(text: str) -> complex:
    """Parse 're,im' (or a bare real part) into a complex number."""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"cannot parse complex value from {text!r}")


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{fmt_float(z.real)},{fmt_float(z.imag)}"


def _ser(obj, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return fmt_float(x)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return (f'{{"re": {_ser(z.real, indent)}, '
                f'"im": {_ser(z.imag, indent)}}}')
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(
            f"{inner}{json.dumps(str(k))}: {_ser(v, indent + 1)}"
            for k, v in obj.items())
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        body = ",\n".join(f"{inner}{_ser(v, indent + 1)}" for v in obj)
        return "[\n" + body + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_canonical(obj) -> str:
    """JSON text with fixed key order, canonical floats, inf/nan as strings."""
    return _ser(obj, 0) + "\n"


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file and rename, so readers never see a torn file."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, obj) -> None:
    atomic_write_text(path, dumps_canonical(obj))


def write_region_csv(path: str, rows) -> None:
    """Region-scan rows: coefficients plus 0/1 membership flags."""
    lines = ["re_a,im_a,re_b,im_b,in_A,in_B,exists,unique"]
    for re_a, im_a, re_b, im_b, flags in rows:
        lines.append(",".join([
            fmt_float(re_a), fmt_float(im_a), fmt_float(re_b), fmt_float(im_b),
            str(int(flags["in_A"])), str(int(flags["in_B"])),
            str(int(flags["exists"])), str(int(flags["unique"]))]))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_field_csv(path: str, u) -> None:
    lines = ["r,re_u,im_u"]
    for r, v in zip(u.mesh.nodes, u.values):
        lines.append(f"{fmt_float(r)},{fmt_float(v.real)},{fmt_float(v.imag)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_field_csv(path: str):
    """Return (radii, complex values) from a field CSV."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "r,re_u,im_u":
            raise ValueError(f"unexpected field CSV header {header!r}")
        rs, vs = [], []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            r, re_u, im_u = line.split(",")
            rs.append(float(r))
            vs.append(complex(float(re_u), float(im_u)))
    return np.array(rs), np.array(vs, dtype=complex)


def write_profiles_csv(path: str, profiles) -> None:
    lines = ["rho,E,b,m2,I,J"]
    for j, rho in enumerate(profiles.rho_grid):
        lines.append(",".join([
            fmt_float(rho), fmt_float(profiles.E[j]), fmt_float(profiles.b[j]),
            fmt_float(profiles.m2[j]), fmt_float(profiles.I[j]),
            fmt_float(profiles.J[j])]))
    atomic_write_text(path, "\n".join(lines) + "\n")


_INT_KEYS = {"dim_N", "n_nodes", "max_iter"}
_FLOAT_KEYS = {"r_inner", "r_outer", "m", "delta", "damping", "tol"}
_COMPLEX_KEYS = {"a", "b"}
_STR_KEYS = {"source_kind", "solver"}


def _parse_source_params(text: str) -> dict:
    """Semicolon-separated key=value pairs; values are real or 're,im'."""
    out = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise ValueError(f"bad source_params entry {chunk!r}")
        key, val = chunk.split("=", 1)
        out[key.strip()] = parse_complex(val)
    return out


def parse_config_text(text: str) -> dict:
    """Flat key = value lines; '#' starts a comment; keys are typed."""
    cfg = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in _INT_KEYS:
            cfg[key] = int(val)
        elif key in _FLOAT_KEYS:
            cfg[key] = float(val)
        elif key in _COMPLEX_KEYS:
            cfg[key] = parse_complex(val)
        elif key in _STR_KEYS:
            cfg[key] = val
        elif key == "source_params":
            cfg[key] = _parse_source_params(val)
        else:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
    return cfg


def load_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())
