"""Curves, flow sets ``E_Q`` and time sets ``I_{x,E}``.

A flow set is the image of a cube pushed backwards along the curve,
``E_Q = {x - gamma(t) : x in Q, t0 <= t <= t1}`` with ``[t0, t1] =
[9 ell(Q), 10 ell(Q)]``.  Membership of a point ``p`` is decided exactly: for
``t > 0`` each coordinate of ``gamma`` is a signed monotone power of ``t``, so
the admissible ``t`` for which ``p + gamma(t)`` lands in ``Q`` form one
interval per coordinate and ``p`` belongs to ``E_Q`` iff their intersection
with ``[t0, t1]`` is non-empty.  Rasters are this predicate evaluated at cell
centres.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .cubes import AnisoCube
from .grid import GridSpec

PARABOLA = "parabola"
MONOMIAL = "monomial"
LINE = "line"
TORSION = "torsion"


class CurveError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CurveSpec:
    kind: str
    alpha: tuple[float, ...] = (1.0, 2.0)
    eps: tuple[int, ...] = (1, 1)
    eps_neg: tuple[int, ...] = (-1, 1)
    nodes: np.ndarray | None = field(default=None, repr=False)
    derivs: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind in (PARABOLA, MONOMIAL):
            if len(self.alpha) != len(self.eps) or len(self.eps) != len(self.eps_neg):
                raise CurveError("exponents and sign vectors must have equal length")
            if any(a <= 0 for a in self.alpha):
                raise CurveError("exponents must be positive")
            if any(e not in (-1, 1) for e in self.eps + self.eps_neg):
                raise CurveError("signs must be +1 or -1")
            if all(e == f for e, f in zip(self.eps, self.eps_neg)):
                raise CurveError("a monomial curve needs a sign change in some component")
        elif self.kind == TORSION:
            self._check_torsion()
        elif self.kind != LINE:
            raise CurveError(f"unknown curve kind {self.kind!r}")

    def _check_torsion(self):
        s = np.asarray(self.nodes, dtype=float)
        d = np.asarray(self.derivs, dtype=float)
        n = d.shape[-1]
        if d.shape != (n + 1, len(s), n):
            raise CurveError("torsion derivs must have shape (n + 1, nodes, n)")
        if s[0] > -1 or s[-1] < 1 or np.any(np.diff(s) <= 0):
            raise CurveError("torsion nodes must increase and cover [-1, 1]")
        det = np.linalg.det(np.moveaxis(d[1:], 0, 1))
        bad = np.abs(det) <= 1e-8
        if bad.any():
            raise CurveError(f"torsion vanishes at s = {s[bad][0]!r}")
        object.__setattr__(self, "_spline", CubicHermiteSpline(s, d[0], d[1], axis=0))

    @property
    def dim(self) -> int:
        if self.kind == TORSION:
            return np.asarray(self.derivs).shape[-1]
        return 2 if self.kind == LINE else len(self.alpha)

    @property
    def label(self) -> str:
        if self.kind == MONOMIAL:
            return f"monomial{tuple(self.alpha)}"
        return self.kind

    def positive_branch(self):
        """``(coefficient, exponent)`` per coordinate for ``t > 0``."""
        if self.kind == LINE:
            return [(1.0, 1.0), (0.0, 1.0)]
        if self.kind == TORSION:
            raise CurveError("torsion curves have no monomial branch")
        return [(float(e), float(a)) for e, a in zip(self.eps, self.alpha)]

    def fingerprint(self) -> str:
        if self.kind == TORSION:
            return f"torsion:{hash(np.asarray(self.derivs).tobytes()):x}"
        return f"{self.kind}:{self.alpha}:{self.eps}:{self.eps_neg}"


def parabola() -> CurveSpec:
    return CurveSpec(PARABOLA, (1.0, 2.0), (1, 1), (-1, 1))


def monomial(alpha, eps=None, eps_neg=None) -> CurveSpec:
    alpha = tuple(float(a) for a in alpha)
    eps = tuple(eps) if eps is not None else (1,) * len(alpha)
    eps_neg = tuple(eps_neg) if eps_neg is not None else (-1,) + (1,) * (len(alpha) - 1)
    return CurveSpec(MONOMIAL, alpha, eps, eps_neg)


def line() -> CurveSpec:
    return CurveSpec(LINE, (1.0,), (1,), (-1,))


def torsion(nodes, derivs) -> CurveSpec:
    """Sampled curve on ``[-1, 1]``; ``derivs[k]`` holds the k-th derivative."""
    return CurveSpec(TORSION, nodes=np.asarray(nodes, float), derivs=np.asarray(derivs, float))


def torsion_from_fn(fn, dfns, n_nodes: int = 65) -> CurveSpec:
    s = np.linspace(-1.0, 1.0, n_nodes)
    d = [np.stack([np.broadcast_to(c, s.shape) for c in fn(s)], axis=-1)]
    d += [np.stack([np.broadcast_to(c, s.shape) for c in g(s)], axis=-1) for g in dfns]
    return torsion(s, np.array(d))


def eval_curve(c: CurveSpec, t):
    """Point(s) on the curve; output has shape ``t.shape + (dim,)``."""
    t = np.asarray(t, dtype=float)
    if c.kind == LINE:
        return np.stack([t, np.zeros_like(t)], axis=-1)
    if c.kind == TORSION:
        if np.any(np.abs(t) > 1):
            raise CurveError("torsion curves are only defined on [-1, 1]")
        return c._spline(t)
    a = np.abs(t)[..., None] ** np.asarray(c.alpha)
    sign = np.where(t[..., None] >= 0, np.asarray(c.eps, float), np.asarray(c.eps_neg, float))
    return sign * a


def reflected(c: CurveSpec) -> CurveSpec:
    """The curve ``t -> -gamma(-t)``; the transform along it is minus the adjoint."""
    if c.kind == LINE:
        return c
    if c.kind == TORSION:
        s = c.nodes
        d = np.asarray(c.derivs)
        k = np.arange(d.shape[0])
        # derivative k of -g(-t) is (-1)**(k+1) g^(k)(-t)
        nd = np.array([(-1.0) ** (kk + 1) * d[kk, ::-1] for kk in k])
        return torsion(-s[::-1], nd)
    eps = tuple(-e for e in c.eps_neg)
    eps_neg = tuple(-e for e in c.eps)
    return CurveSpec(MONOMIAL, c.alpha, eps, eps_neg)


def is_odd(c: CurveSpec) -> bool:
    """True when ``gamma(-t) = -gamma(t)``, i.e. the transform is skew-adjoint."""
    if c.kind == LINE:
        return True
    if c.kind == TORSION:
        return False
    return all(e == -f for e, f in zip(c.eps, c.eps_neg))


# flow sets ----------------------------------------------------------------

class FlowError(ValueError):
    pass


def flow_window(Q: AnisoCube):
    return 9.0 * Q.ell, 10.0 * Q.ell


def admissible_times(c: CurveSpec, Q: AnisoCube, px, py, t0, t1):
    """Interval ``[lo, hi]`` of ``t in [t0, t1]`` with ``p + gamma(t) in Q``.

    Empty where ``lo > hi``.
    """
    px = np.asarray(px, float)
    py = np.asarray(py, float)
    lo = np.full(np.broadcast(px, py).shape, float(t0))
    hi = np.full_like(lo, float(t1))
    for (coef, a), p, c0, w in zip(c.positive_branch(), (px, py), Q.corner, Q.sides):
        L = c0 - p
        U = c0 + w - p
        if coef == 0:
            inside = (L <= 0) & (U >= 0)
            hi = np.where(inside, hi, -np.inf)
            continue
        if coef < 0:
            L, U = -U, -L
        ok = U >= 0
        tl = np.maximum(L, 0.0) ** (1.0 / a)
        tu = np.where(ok, np.maximum(U, 0.0), 0.0) ** (1.0 / a)
        lo = np.maximum(lo, tl)
        hi = np.where(ok, np.minimum(hi, tu), -np.inf)
    return lo, hi


def flow_bbox(c: CurveSpec, Q: AnisoCube, t0=None, t1=None):
    """Axis-aligned bounding box ``(x0, y0, x1, y1)`` of ``E_Q``."""
    if t0 is None:
        t0, t1 = flow_window(Q)
    out_lo, out_hi = [], []
    for (coef, a), c0, w in zip(c.positive_branch(), Q.corner, Q.sides):
        g = sorted((coef * t0 ** a, coef * t1 ** a))
        out_lo.append(c0 - g[1])
        out_hi.append(c0 + w - g[0])
    return out_lo[0], out_lo[1], out_hi[0], out_hi[1]


@dataclass(frozen=True, eq=False)
class FlowSet:
    curve: CurveSpec
    cube: AnisoCube
    t0: float
    t1: float
    lower: tuple[float, float]
    spacing: tuple[float, float]
    mask: np.ndarray = field(repr=False)
    period: tuple[float, float] | None = None

    @property
    def measure(self) -> float:
        return float(self.mask.sum()) * self.spacing[0] * self.spacing[1]

    def with_period(self, period) -> "FlowSet":
        return FlowSet(self.curve, self.cube, self.t0, self.t1, self.lower,
                       self.spacing, self.mask, tuple(period))

    def _contains_r2(self, px, py):
        lo, hi = admissible_times(self.curve, self.cube, px, py, self.t0, self.t1)
        return lo <= hi

    def contains(self, px, py):
        """Exact membership; on a torus any periodic image counts."""
        px = np.asarray(px, float)
        py = np.asarray(py, float)
        if self.period is None:
            return self._contains_r2(px, py)
        Lx, Ly = self.period
        x0, y0, x1, y1 = flow_bbox(self.curve, self.cube, self.t0, self.t1)
        kx = np.arange(math.floor((x0 - px.max()) / Lx), math.ceil((x1 - px.min()) / Lx) + 1)
        ky = np.arange(math.floor((y0 - py.max()) / Ly), math.ceil((y1 - py.min()) / Ly) + 1)
        out = np.zeros(np.broadcast(px, py).shape, dtype=bool)
        for i in kx:
            qx = px + i * Lx
            mx = (qx >= x0) & (qx <= x1)
            if not mx.any():
                continue
            for j in ky:
                qy = py + j * Ly
                m = mx & (qy >= y0) & (qy <= y1)
                if m.any():
                    out |= m & self._contains_r2(qx, qy)
        return out

    def occupied_bounds(self):
        """Extent of the set cells, measured at cell edges."""
        ii, jj = np.nonzero(self.mask)
        hx, hy = self.spacing
        return (self.lower[0] + ii.min() * hx, self.lower[1] + jj.min() * hy,
                self.lower[0] + (ii.max() + 1) * hx, self.lower[1] + (jj.max() + 1) * hy)

    def x_extent(self) -> float:
        x0, _, x1, _ = self.occupied_bounds()
        return x1 - x0

    def to_pgm(self) -> bytes:
        """Binary PGM, rows running top (large y) to bottom."""
        img = np.where(self.mask.T[::-1], 255, 0).astype(np.uint8)
        h, w = img.shape
        return f"P5\n{w} {h}\n255\n".encode() + img.tobytes()


def flow_set(c: CurveSpec, Q: AnisoCube, refinement: int = 16,
             grid: GridSpec | None = None, check_domain: bool = True) -> FlowSet:
    """Rasterize ``E_Q``.

    Without ``grid`` the raster cell is the cube's own side lengths divided by
    ``refinement``, aligned to the bounding box; with ``grid`` it is the grid
    spacing divided by ``refinement``, aligned to the grid, and the set must
    fit inside the grid's (unwrapped) domain.
    """
    if c.kind == TORSION:
        raise FlowError("flow sets are defined for monomial curves and lines")
    if refinement < 1:
        raise FlowError("refinement must be a positive integer")
    t0, t1 = flow_window(Q)
    x0, y0, x1, y1 = flow_bbox(c, Q, t0, t1)
    if grid is None:
        hx, hy = (s / refinement for s in Q.sides)
        ox, oy = x0, y0
    else:
        hx, hy = grid.dx / refinement, grid.dy / refinement
        gx, gy = grid.lower
        if check_domain:
            need = max(gx - x0, gy - y0, x1 - (gx + grid.lx), y1 - (gy + grid.ly))
            if need > 0:
                raise FlowError(f"flow set leaves the domain; pad the grid by at least {need:.6g}")
        ox = gx + math.floor((x0 - gx) / hx) * hx
        oy = gy + math.floor((y0 - gy) / hy) * hy
    nx = max(1, int(math.ceil((x1 - ox) / hx - 1e-9)))
    ny = max(1, int(math.ceil((y1 - oy) / hy - 1e-9)))
    cx = ox + (np.arange(nx) + 0.5) * hx
    cy = oy + (np.arange(ny) + 0.5) * hy
    lo, hi = admissible_times(c, Q, cx[:, None], cy[None, :], t0, t1)
    mask = lo <= hi
    if not mask.any():
        raise FlowError("flow set raster is empty; increase the refinement")
    return FlowSet(c, Q, t0, t1, (ox, oy), (hx, hy), mask)


# time sets ----------------------------------------------------------------

@dataclass
class TimeSet:
    x: tuple[float, float]
    intervals: list
    mu: float


def _runs(inside):
    """Start/end sample indices of True runs, row by row."""
    P, S = inside.shape
    pad = np.zeros((P, 1), dtype=bool)
    d = np.diff(np.concatenate([pad, inside, pad], axis=1).astype(np.int8), axis=1)
    rs, ss = np.nonzero(d == 1)
    re, se = np.nonzero(d == -1)
    return rs, ss, se - 1


def _bisect(E: FlowSet, c: CurveSpec, px, py, t_in, t_out, iters=32):
    for _ in range(iters):
        mid = 0.5 * (t_in + t_out)
        g = eval_curve(c, mid)
        m = E.contains(px - g[..., 0], py - g[..., 1])
        t_in = np.where(m, mid, t_in)
        t_out = np.where(m, t_out, mid)
    return t_in


def time_sets(c: CurveSpec, px, py, E: FlowSet, window=None, step=None, refine=True):
    """Time sets for many base points at once.

    Returns ``(rows, lo, hi, mu)``: interval ``k`` belongs to point ``rows[k]``
    and ``mu[i]`` is the Haar measure of point ``i``'s time set.  Intervals
    come from scanning ``window`` (default ``[8 ell, 11 ell]``) at ``step``
    (default ``ell / 1024``); with ``refine`` each endpoint is then bisected
    against the exact membership test.
    """
    ell = E.cube.ell
    if window is None:
        window = (8.0 * ell, 11.0 * ell)
    if step is None:
        step = ell / 1024
    px = np.atleast_1d(np.asarray(px, float))
    py = np.atleast_1d(np.asarray(py, float))
    n = int(round((window[1] - window[0]) / step))
    ts = window[0] + step * np.arange(n + 1)
    g = eval_curve(c, ts)
    inside = E.contains(px[:, None] - g[None, :, 0], py[:, None] - g[None, :, 1])
    rows, s_lo, s_hi = _runs(inside)
    lo = ts[s_lo]
    hi = ts[s_hi]
    if refine and len(rows):
        a = s_lo > 0
        if a.any():
            lo[a] = _bisect(E, c, px[rows[a]], py[rows[a]], lo[a], ts[s_lo[a] - 1])
        b = s_hi < n
        if b.any():
            hi[b] = _bisect(E, c, px[rows[b]], py[rows[b]], hi[b], ts[s_hi[b] + 1])
    mu = np.zeros(len(px))
    np.add.at(mu, rows, np.log(hi / lo))
    return rows, lo, hi, mu


def time_set(c: CurveSpec, x, E: FlowSet, **kw) -> TimeSet:
    rows, lo, hi, mu = time_sets(c, [x[0]], [x[1]], E, **kw)
    return TimeSet((float(x[0]), float(x[1])), list(zip(lo.tolist(), hi.tolist())), float(mu[0]))


def time_sets_csv(sets) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["x", "y", "interval_lo", "interval_hi", "mu"])
    for s in sets:
        for lo, hi in s.intervals:
            w.writerow([repr(s.x[0]), repr(s.x[1]), repr(lo), repr(hi), repr(s.mu)])
    return out.getvalue()
