"""Sampled scalar fields on uniform periodic 2-D grids.

Sample ``(i, j)`` sits at ``origin + (i*dx, j*dy)`` and represents the cell of
size ``dx x dy`` centred on it.  All integrals are Riemann sums over these
cells; partial cells are weighted by their overlap fraction.
"""
from __future__ import annotations

import csv
import io
import struct
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class GridError(ValueError):
    pass


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    lx: float = 1.0
    ly: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        for n in (self.nx, self.ny):
            if not isinstance(n, (int, np.integer)) or n < 4 or not _is_pow2(int(n)):
                raise GridError(f"sample counts must be powers of two >= 4, got {n}")
        if not (self.lx > 0 and self.ly > 0):
            raise GridError("domain lengths must be positive")
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @classmethod
    def cell_centered(cls, nx, ny=None, lx=1.0, ly=None, corner=(0.0, 0.0)):
        """Grid whose cells tile ``[corner, corner + (lx, ly))`` exactly."""
        ny = nx if ny is None else ny
        ly = lx if ly is None else ly
        return cls(nx, ny, lx, ly, (corner[0] + 0.5 * lx / nx, corner[1] + 0.5 * ly / ny))

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def lower(self) -> tuple[float, float]:
        """Lower-left corner of the cell tiling."""
        return (self.origin[0] - 0.5 * self.dx, self.origin[1] - 0.5 * self.dy)

    def axes(self):
        x = self.origin[0] + self.dx * np.arange(self.nx)
        y = self.origin[1] + self.dy * np.arange(self.ny)
        return x, y

    def mesh(self):
        x, y = self.axes()
        return np.meshgrid(x, y, indexing="ij")

    def scaled(self, sx: float, sy: float) -> "GridSpec":
        return GridSpec(self.nx, self.ny, self.lx * sx, self.ly * sy,
                        (self.origin[0] * sx, self.origin[1] * sy))


@dataclass(frozen=True, eq=False)
class ScalarField2D:
    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, copy=True)
        if not np.iscomplexobj(v):
            v = v.astype(float)
        if v.shape != self.spec.shape:
            raise GridError(f"values shape {v.shape} does not match grid {self.spec.shape}")
        if not np.all(np.isfinite(v)):
            raise GridError("field contains non-finite values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    # arithmetic -------------------------------------------------------
    def _other(self, other):
        if isinstance(other, ScalarField2D):
            _check_same(self, other)
            return other.values
        return other

    def __add__(self, other):
        return ScalarField2D(self.spec, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ScalarField2D(self.spec, self.values - self._other(other))

    def __rsub__(self, other):
        return ScalarField2D(self.spec, self._other(other) - self.values)

    def __mul__(self, other):
        return ScalarField2D(self.spec, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ScalarField2D(self.spec, self.values / self._other(other))

    def __neg__(self):
        return ScalarField2D(self.spec, -self.values)

    def map(self, fn):
        return ScalarField2D(self.spec, fn(self.values))

    @property
    def real(self):
        return ScalarField2D(self.spec, self.values.real)

    @property
    def imag(self):
        return ScalarField2D(self.spec, self.values.imag)

    def integrate(self):
        return self.values.sum() * self.spec.cell_area

    def max_abs(self) -> float:
        return float(np.abs(self.values).max())


def _check_same(f: ScalarField2D, g: ScalarField2D):
    if f.spec != g.spec:
        raise GridError(f"mismatched grids: {f.spec} vs {g.spec}")


def zeros(spec: GridSpec) -> ScalarField2D:
    return ScalarField2D(spec, np.zeros(spec.shape))


def constant(spec: GridSpec, c: float) -> ScalarField2D:
    return ScalarField2D(spec, np.full(spec.shape, float(c)))


def field_from_fn(spec: GridSpec, fn: Callable) -> ScalarField2D:
    """Sample ``fn(x, y)`` at every grid point.

    ``fn`` is called once with the full meshgrid arrays; scalar-only callables
    are retried point by point.
    """
    X, Y = spec.mesh()
    try:
        v = np.asarray(fn(X, Y))
        if v.shape != spec.shape:
            v = np.broadcast_to(v, spec.shape)
    except (TypeError, ValueError):
        v = np.vectorize(fn, otypes=[float])(X, Y)
    v = np.array(v)
    bad = ~np.isfinite(v)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise GridError(f"non-finite sample at grid point ({X[i, j]!r}, {Y[i, j]!r})")
    return ScalarField2D(spec, v)


# interpolation --------------------------------------------------------------

def _snap(u):
    r = np.rint(u)
    return np.where(np.abs(u - r) < 1e-9, r, u)


def _bilinear(values, spec: GridSpec, px, py):
    u = (np.asarray(px, dtype=float) - spec.origin[0]) / spec.dx
    v = (np.asarray(py, dtype=float) - spec.origin[1]) / spec.dy
    u = _snap(u)
    v = _snap(v)
    i0 = np.floor(u)
    j0 = np.floor(v)
    fu = u - i0
    fv = v - j0
    i0 = i0.astype(np.int64) % spec.nx
    j0 = j0.astype(np.int64) % spec.ny
    i1 = (i0 + 1) % spec.nx
    j1 = (j0 + 1) % spec.ny
    a = values[i0, j0]
    out = a * ((1 - fu) * (1 - fv))
    out = out + values[i1, j0] * (fu * (1 - fv))
    out = out + values[i0, j1] * ((1 - fu) * fv)
    out = out + values[i1, j1] * (fu * fv)
    exact = (fu == 0) & (fv == 0)
    if np.ndim(out) == 0:
        return a if exact else out
    return np.where(exact, a, out)


def sample_at(f: ScalarField2D, point) -> float:
    """Bilinear interpolation with periodic wrap; exact at grid points."""
    return float(_bilinear(f.values, f.spec, point[0], point[1]))


def sample_many(f: ScalarField2D, px, py) -> np.ndarray:
    return _bilinear(f.values, f.spec, px, py)


def shifted(f: ScalarField2D, sx: float, sy: float) -> np.ndarray:
    """Values of ``x -> f(x - (sx, sy))`` on the grid, by bilinear interpolation.

    A constant shift has the same fractional offset at every grid point, so the
    result is a fixed blend of four rolled copies.
    """
    spec = f.spec
    u = -sx / spec.dx
    v = -sy / spec.dy
    i0 = np.floor(u)
    j0 = np.floor(v)
    fu = u - i0
    fv = v - j0
    a = np.roll(f.values, (-int(i0), -int(j0)), axis=(0, 1))
    if fu == 0 and fv == 0:
        return a
    b = np.roll(a, -1, axis=0)
    c = np.roll(a, -1, axis=1)
    d = np.roll(b, -1, axis=1)
    return (a * ((1 - fu) * (1 - fv)) + b * (fu * (1 - fv))
            + c * ((1 - fu) * fv) + d * (fu * fv))


# rectangles and averages ----------------------------------------------------

@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def width(self):
        return self.x1 - self.x0

    @property
    def height(self):
        return self.y1 - self.y0

    @property
    def area(self):
        return self.width * self.height


def axis_weights(a: float, b: float, lo: float, h: float, n: int):
    """Overlap lengths of ``[a, b]`` with the periodic cells ``[lo + k h, lo + (k+1) h)``.

    Returns ``(index, length)`` arrays; indices are reduced mod ``n`` and may
    repeat when the interval is longer than the period.
    """
    k0 = int(np.floor((a - lo) / h))
    k1 = int(np.ceil((b - lo) / h))
    ks = np.arange(k0, max(k1, k0 + 1))
    left = lo + ks * h
    ov = np.minimum(b, left + h) - np.maximum(a, left)
    keep = ov > 0
    return ks[keep] % n, ov[keep]


def rect_weights(spec: GridSpec, rect: Rect):
    lx, ly = spec.lower
    ix, wx = axis_weights(rect.x0, rect.x1, lx, spec.dx, spec.nx)
    iy, wy = axis_weights(rect.y0, rect.y1, ly, spec.dy, spec.ny)
    return ix, wx, iy, wy


def average_over_rect(f: ScalarField2D, rect: Rect) -> float:
    if not rect.area > 0:
        raise GridError(f"rectangle {rect} has no area")
    ix, wx, iy, wy = rect_weights(f.spec, rect)
    block = f.values[np.ix_(ix, iy)]
    return float(wx @ block @ wy / (wx.sum() * wy.sum()))


def integrate(f: ScalarField2D) -> float:
    return float(f.integrate())


def inner_product(f: ScalarField2D, g: ScalarField2D) -> float:
    _check_same(f, g)
    return float(np.vdot(g.values, f.values).real * f.spec.cell_area)


def lp_norm(f: ScalarField2D, p: float = 2.0) -> float:
    if p < 1:
        raise GridError("p must be >= 1")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max())
    return float((np.sum(a ** p) * f.spec.cell_area) ** (1.0 / p))


# serialization ---------------------------------------------------------------

_HEADER = struct.Struct("<qqdddd")


def to_bytes(f: ScalarField2D) -> bytes:
    s = f.spec
    head = _HEADER.pack(s.nx, s.ny, s.lx, s.ly, s.origin[0], s.origin[1])
    return head + np.ascontiguousarray(f.values.real, dtype="<f8").tobytes()


def from_bytes(buf: bytes) -> ScalarField2D:
    nx, ny, lx, ly, ox, oy = _HEADER.unpack_from(buf)
    vals = np.frombuffer(buf, dtype="<f8", offset=_HEADER.size, count=nx * ny)
    return ScalarField2D(GridSpec(nx, ny, lx, ly, (ox, oy)), vals.reshape(nx, ny))


def to_csv(f: ScalarField2D) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["i", "j", "x", "y", "value"])
    X, Y = f.spec.mesh()
    for i in range(f.spec.nx):
        for j in range(f.spec.ny):
            w.writerow([i, j, repr(float(X[i, j])), repr(float(Y[i, j])),
                        repr(float(f.values[i, j].real))])
    return out.getvalue()
