"""Radial source term builders keyed by the config vocabulary.

Kinds:
  zero                      -- F identically 0
  plateau  (r0, r1, height) -- sharp indicator of [r0, r1] times height
  bump     (center, width, height) -- C^2 bump height*(1-s^2)^3, s=(r-center)/width
  ring                      -- alias of bump (annular support away from 0)
Heights may be complex; config files encode them as "re,im" when needed.
"""

from __future__ import annotations

import numpy as np

from .mesh import GridField, RadialMesh

SOURCE_KINDS = ("zero", "plateau", "bump", "ring")


def plateau_profile(r, r0, r1, height):
    r = np.asarray(r, dtype=float)
    return np.where((r >= r0) & (r <= r1), height, 0.0 + 0.0j)


def bump_profile(r, center, width, height):
    r = np.asarray(r, dtype=float)
    s = (r - center) / width
    core = np.where(np.abs(s) < 1.0, (1.0 - np.minimum(s * s, 1.0)) ** 3, 0.0)
    return height * core


def _need(params: dict, kind: str, keys):
    try:
        return [complex(params[k]) for k in keys]
    except KeyError as exc:
        raise ValueError(f"{kind} needs source params {keys}") from exc


def build_source(mesh: RadialMesh, kind: str, params=None) -> GridField:
    """Construct a source field on the mesh from kind and a param mapping."""
    kind = str(kind).strip().lower()
    params = dict(params or {})
    if kind == "zero":
        vals = np.zeros(mesh.n, dtype=np.complex128)
    elif kind == "plateau":
        r0c, r1c, height = _need(params, kind, ("r0", "r1", "height"))
        r0, r1 = r0c.real, r1c.real
        if not r0 < r1:
            raise ValueError(f"plateau needs r0 < r1, got ({r0}, {r1})")
        vals = plateau_profile(mesh.nodes, r0, r1, height)
    elif kind in ("bump", "ring"):
        cc, wc, height = _need(params, kind, ("center", "width", "height"))
        center, width = cc.real, wc.real
        if width <= 0.0:
            raise ValueError(f"{kind} width must be positive, got {width}")
        vals = bump_profile(mesh.nodes, center, width, height)
    else:
        raise ValueError(f"unknown source kind {kind!r}; choose from {SOURCE_KINDS}")
    return GridField(mesh, vals)


def support_outer_radius(field: GridField) -> float:
    """Largest node radius where the field is nonzero (r_inner if none)."""
    nz = np.nonzero(np.abs(field.values) > 0.0)[0]
    if len(nz) == 0:
        return field.mesh.domain.r_inner
    return float(field.mesh.nodes[nz[-1]])
