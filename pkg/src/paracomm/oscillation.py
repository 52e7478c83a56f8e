"""Oscillation functionals: anisotropic BMO, slice BMO and the testing norm.

All suprema are taken over a finite cube family and are therefore lower
estimates of the true norms ("family-relative").
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import curves as C
from .cubes import AnisoCube, CubeFamily
from .grid import ScalarField2D, axis_weights, rect_weights, sample_many
from .transforms import QuadratureSpec


class GeometryError(RuntimeError):
    pass


@dataclass
class OscillationReport:
    value: float
    argmax_cube: AnisoCube | None
    per_scale: list = field(default_factory=list)
    rows: list = field(default_factory=list, repr=False)
    kind: str = "bmo"
    family_relative: bool = True

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["scale", "corner_x", "corner_y", "ell", "oscillation"])
        for s, q, v in self.rows:
            w.writerow([s, repr(q.corner[0]), repr(q.corner[1]), repr(q.ell), repr(v)])
        return out.getvalue()

    def summary(self) -> dict:
        q = self.argmax_cube
        return {
            "schema_version": 1,
            "kind": self.kind,
            "value": self.value,
            "family_relative": self.family_relative,
            "argmax_cube": None if q is None else
            {"corner": list(q.corner), "ell": q.ell, "alpha": list(q.alpha)},
            "per_scale": self.per_scale,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def _report(fam: CubeFamily, values, kind) -> OscillationReport:
    values = np.asarray(values, float)
    per = []
    for k in range(len(fam.scales)):
        sel = [v for v, s in zip(values, fam.scale_index) if s == k and not np.isnan(v)]
        per.append(max(sel) if sel else float("nan"))
    ok = ~np.isnan(values)
    if not ok.any():
        raise GeometryError("no cube of the family could be evaluated")
    i = int(np.nanargmax(values))
    rows = [(s, q, float(v)) for s, q, v in zip(fam.scale_index, fam.cubes, values) if not np.isnan(v)]
    return OscillationReport(float(values[i]), fam.cubes[i], per, rows, kind)


def mean_oscillation(b: ScalarField2D, rect) -> float:
    """``(1/|R|) int_R |b - b_R|`` with cell-clipped weights."""
    ix, wx, iy, wy = rect_weights(b.spec, rect)
    blk = b.values[np.ix_(ix, iy)]
    area = wx.sum() * wy.sum()
    avg = wx @ blk @ wy / area
    return float(wx @ np.abs(blk - avg) @ wy / area)


def bmo_norm(b: ScalarField2D, fam: CubeFamily) -> OscillationReport:
    vals = [mean_oscillation(b, q.rect) for q in fam.cubes]
    return _report(fam, vals, "bmo")


def dyadic_intervals(x0: float, x1: float, m_min: int, m_max: int):
    """Dyadic sub-intervals of ``[x0, x1]`` with lengths ``(x1 - x0) 2**-m``."""
    L = x1 - x0
    out = []
    for m in range(m_min, m_max + 1):
        k = 2 ** m
        out.extend((x0 + i * L / k, x0 + (i + 1) * L / k) for i in range(k))
    return out


def slice_bmo_inf(b: ScalarField2D, intervals) -> float:
    """Max over rows ``y`` of the 1-D BMO of ``x -> b(x, y)``."""
    spec = b.spec
    lo = spec.lower[0]
    V = b.values
    best = np.zeros(spec.ny)
    for a, c in intervals:
        ix, wx = axis_weights(a, c, lo, spec.dx, spec.nx)
        blk = V[ix, :]
        avg = wx @ blk / wx.sum()
        osc = wx @ np.abs(blk - avg) / wx.sum()
        best = np.maximum(best, osc)
    return float(best.max())


def slice_profile(b: ScalarField2D, intervals) -> np.ndarray:
    """Per-row 1-D BMO estimates (the function ``y -> ||b^y||_BMO``)."""
    spec = b.spec
    best = np.zeros(spec.ny)
    for a, c in intervals:
        ix, wx = axis_weights(a, c, spec.lower[0], spec.dx, spec.nx)
        blk = b.values[ix, :]
        avg = wx @ blk / wx.sum()
        best = np.maximum(best, wx @ np.abs(blk - avg) / wx.sum())
    return best


# testing norm ----------------------------------------------------------------

def curve_averages(b: ScalarField2D, c, px, py, rows, lo, hi, mu, nodes_per_dyad=32):
    """Haar averages ``(1/mu) int_I b(x - gamma(t)) dt/t`` per base point.

    Each interval is integrated by the trapezoid rule in ``log t`` with a
    common node count set by ``nodes_per_dyad``.
    """
    span = np.log(hi / lo)
    n = max(8, int(math.ceil(nodes_per_dyad * span.max() / math.log(2)))) if len(span) else 8
    s = np.linspace(0.0, 1.0, n + 1)
    wt = np.full(n + 1, 1.0 / n)
    wt[[0, -1]] *= 0.5
    t = lo[:, None] * np.exp(span[:, None] * s[None, :])
    g = C.eval_curve(c, t)
    vals = sample_many(b, px[rows][:, None] - g[..., 0], py[rows][:, None] - g[..., 1])
    integ = (vals @ wt) * span
    tot = np.zeros(len(px))
    np.add.at(tot, rows, integ)
    with np.errstate(invalid="ignore", divide="ignore"):
        return tot / mu


def _time_key(spec, Q: AnisoCube):
    # time sets only depend on the cube's position relative to the grid lattice
    fx = ((Q.corner[0] - spec.origin[0]) / spec.dx) % 1.0
    fy = ((Q.corner[1] - spec.origin[1]) / spec.dy) % 1.0
    return (Q.ell, Q.alpha, round(fx, 9) % 1.0, round(fy, 9) % 1.0)


def testing_deviation(b: ScalarField2D, Q: AnisoCube, c, nodes_per_dyad=32,
                      periodic=True, cache=None):
    """Mean over the grid points of ``Q`` of ``|b(x) - Haar average along I_{x,E_Q}|``.

    Returns ``nan`` when ``Q`` contains no grid point.  ``cache`` (a dict)
    shares time sets between translated cubes.
    """
    spec = b.spec
    px, py = Q.grid_points(spec)
    if px.size == 0:
        return float("nan")
    key = _time_key(spec, Q) if cache is not None else None
    hit = cache.get(key) if key is not None else None
    if hit is not None and hit[0] == px.size:
        _, rows, lo, hi, mu = hit
    else:
        E = C.flow_set(c, Q, refinement=2)
        if periodic:
            E = E.with_period((spec.lx, spec.ly))
        rows, lo, hi, mu = C.time_sets(c, px, py, E)
        if np.any(mu <= 0):
            k = int(np.argmin(mu))
            raise GeometryError(f"empty time set at x = ({px[k]!r}, {py[k]!r}) for cube {Q}")
        if key is not None:
            cache[key] = (px.size, rows, lo, hi, mu)
    avg = curve_averages(b, c, px, py, rows, lo, hi, mu, nodes_per_dyad)
    bx = sample_many(b, px, py)
    return float(np.mean(np.abs(bx - avg)))


def testing_norm(b: ScalarField2D, fam: CubeFamily, c, quad: QuadratureSpec | None = None,
                 periodic: bool = True) -> OscillationReport:
    """Family maximum of ``testing_deviation``.

    Translation sharing of time sets is only valid on the torus, so it is
    switched on with ``periodic``.
    """
    npd = quad.nodes_per_dyad if quad is not None else 32
    cache = {} if periodic else None
    vals = [testing_deviation(b, q, c, npd, periodic, cache) for q in fam.cubes]
    return _report(fam, vals, "testing")
