"""Canonical JSON/CSV rendering, config parsing, atomic writes."""

import math
import os

import numpy as np
import pytest
from hypothesis import given, strategies as st

from deadcore import RadialDomain, build_mesh
from deadcore.ioutil import (
    atomic_write_text,
    dumps_canonical,
    fmt_float,
    format_complex,
    load_config,
    parse_complex,
    parse_config_text,
    read_field_csv,
    write_field_csv,
    write_json,
    write_profiles_csv,
    write_region_csv,
)
from deadcore.mesh import GridField
from deadcore.support import EnergyProfiles


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_float_round_trips(x):
    assert float(fmt_float(x)) == x


def test_fmt_float_examples():
    assert fmt_float(1.0) == "1"
    assert fmt_float(0.1) == "0.10000000000000001"
    assert fmt_float(-2.5) == "-2.5"


def test_parse_complex():
    assert parse_complex("1.5,-2") == 1.5 - 2j
    assert parse_complex("3") == 3 + 0j
    assert parse_complex(" 1 , 2 ") == 1 + 2j
    with pytest.raises(ValueError):
        parse_complex("1,2,3")


@given(st.complex_numbers(allow_nan=False, allow_infinity=False))
def test_complex_round_trips(z):
    assert parse_complex(format_complex(z)) == z


def test_format_complex_examples():
    assert format_complex(1.5 - 2j) == "1.5,-2"
    assert format_complex(0) == "0,0"


def test_dumps_canonical_layout():
    obj = {
        "name": "run",
        "vals": [1.0, float("inf"), float("-inf"), float("nan")],
        "z": 1 + 2j,
        "flag": True,
        "n": 3,
        "none": None,
        "empty": {},
        "arr": np.array([1.0, 2.5]),
    }
    want = (
        '{\n'
        '  "name": "run",\n'
        '  "vals": [\n'
        '    1,\n'
        '    "inf",\n'
        '    "-inf",\n'
        '    "nan"\n'
        '  ],\n'
        '  "z": {"re": 1, "im": 2},\n'
        '  "flag": true,\n'
        '  "n": 3,\n'
        '  "none": null,\n'
        '  "empty": {},\n'
        '  "arr": [\n'
        '    1,\n'
        '    2.5\n'
        '  ]\n'
        '}\n'
    )
    assert dumps_canonical(obj) == want


def test_dumps_canonical_numpy_scalars_and_keys():
    assert dumps_canonical(np.float64(0.5)) == "0.5\n"
    assert dumps_canonical(np.int64(7)) == "7\n"
    assert dumps_canonical(np.bool_(False)) == "false\n"
    assert dumps_canonical({1: 2}) == '{\n  "1": 2\n}\n'
    assert dumps_canonical([]) == "[]\n"
    with pytest.raises(TypeError):
        dumps_canonical({"bad": object()})


def test_atomic_write_text(tmp_path):
    target = tmp_path / "sub" / "out.txt"
    atomic_write_text(str(target), "first\n")
    assert target.read_text() == "first\n"
    atomic_write_text(str(target), "second\n")
    assert target.read_text() == "second\n"
    # no temp droppings left behind
    assert os.listdir(target.parent) == ["out.txt"]


def test_write_json(tmp_path):
    path = tmp_path / "r.json"
    obj = {"x": 0.1, "ok": True}
    write_json(str(path), obj)
    assert path.read_text() == dumps_canonical(obj)


def test_field_csv_round_trip(tmp_path):
    mesh = build_mesh(RadialDomain(1, 0.0, 2.0), 17)
    rng = np.random.default_rng(11)
    vals = rng.standard_normal(mesh.n) + 1j * rng.standard_normal(mesh.n)
    field = GridField(mesh, vals * math.pi)
    path = tmp_path / "field.csv"
    write_field_csv(str(path), field)
    text = path.read_text()
    assert text.splitlines()[0] == "r,re_u,im_u"
    rs, vs = read_field_csv(str(path))
    assert np.array_equal(rs, mesh.nodes)
    assert np.array_equal(vs, field.values)
    # trailing blank lines are tolerated
    path.write_text(text + "\n\n")
    rs2, vs2 = read_field_csv(str(path))
    assert np.array_equal(vs2, field.values)


def test_read_field_csv_rejects_foreign_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("radius,real,imag\n0,1,2\n")
    with pytest.raises(ValueError):
        read_field_csv(str(path))


def test_write_region_csv(tmp_path):
    rows = [
        (1.0, 2.0, -0.5, 0.25,
         {"in_A": True, "in_B": False, "exists": True, "unique": False}),
        (0.0, -1.0, 0.0, 0.0,
         {"in_A": False, "in_B": False, "exists": False, "unique": False}),
    ]
    path = tmp_path / "region.csv"
    write_region_csv(str(path), rows)
    assert path.read_text() == (
        "re_a,im_a,re_b,im_b,in_A,in_B,exists,unique\n"
        "1,2,-0.5,0.25,1,0,1,0\n"
        "0,-1,0,0,0,0,0,0\n"
    )


def test_write_profiles_csv(tmp_path):
    # dyadic values so the 17-digit rendering stays short and exact
    profiles = EnergyProfiles(
        rho_grid=np.array([0.0, 0.5, 1.0]),
        E=np.array([0.0, 0.25, 1.0]),
        b=np.array([0.0, 0.125, 0.25]),
        m2=np.array([0.0, 0.0625, 0.25]),
        I=np.array([0.0, 0.0, 0.0]),
        J=np.array([0.0, 0.5, 0.5]),
    )
    path = tmp_path / "profiles.csv"
    write_profiles_csv(str(path), profiles)
    assert path.read_text() == (
        "rho,E,b,m2,I,J\n"
        "0,0,0,0,0,0\n"
        "0.5,0.25,0.125,0.0625,0,0.5\n"
        "1,1,0.25,0.25,0,0.5\n"
    )


CONFIG_TEXT = """
# coefficients
a = 1,0
b = 0,1     # purely imaginary
m = 0.5
dim_N = 1
r_inner = 0.0
r_outer = 2.0
n_nodes = 33   # coarse
source_kind = plateau
source_params = r0=0; r1=0.3; height=0.1
solver = newton
tol = 1e-9
max_iter = 500
damping = 1.0
delta = 1.0
"""


def test_parse_config_text_types():
    cfg = parse_config_text(CONFIG_TEXT)
    assert cfg["a"] == 1 + 0j and isinstance(cfg["a"], complex)
    assert cfg["b"] == 1j
    assert cfg["m"] == 0.5 and isinstance(cfg["m"], float)
    assert cfg["dim_N"] == 1 and isinstance(cfg["dim_N"], int)
    assert cfg["n_nodes"] == 33
    assert cfg["max_iter"] == 500
    assert cfg["source_kind"] == "plateau"
    assert cfg["solver"] == "newton"
    sp = cfg["source_params"]
    assert sp == {"r0": 0j, "r1": 0.3 + 0j, "height": 0.1 + 0j}


def test_parse_config_rejections():
    with pytest.raises(ValueError, match="unknown key"):
        parse_config_text("mystery = 3\n")
    with pytest.raises(ValueError, match="key = value"):
        parse_config_text("just words\n")
    with pytest.raises(ValueError, match="source_params"):
        parse_config_text("source_params = r0\n")


def test_load_config(tmp_path):
    path = tmp_path / "case.cfg"
    path.write_text(CONFIG_TEXT)
    cfg = load_config(str(path))
    assert cfg["b"] == 1j and cfg["n_nodes"] == 33
