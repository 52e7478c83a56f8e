"""Anisotropic cubes, dyadic cube families and sparse collections."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec, Rect

PARABOLIC = (1.0, 2.0)
SQUARE = (1.0, 1.0)


class CubeError(ValueError):
    pass


@dataclass(frozen=True)
class AnisoCube:
    """Product of intervals ``I_k`` with ``|I_k| = ell ** alpha_k``."""

    corner: tuple[float, float]
    ell: float
    alpha: tuple[float, float] = PARABOLIC

    def __post_init__(self):
        if not self.ell > 0:
            raise CubeError("cube side length must be positive")
        object.__setattr__(self, "corner", tuple(float(c) for c in self.corner))
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))

    @property
    def sides(self) -> tuple[float, ...]:
        return tuple(self.ell ** a for a in self.alpha)

    @property
    def measure(self) -> float:
        return self.ell ** sum(self.alpha)

    @property
    def rect(self) -> Rect:
        w, h = self.sides
        x, y = self.corner
        return Rect(x, y, x + w, y + h)

    @property
    def center(self):
        w, h = self.sides
        return (self.corner[0] + w / 2, self.corner[1] + h / 2)

    def contains(self, px, py):
        """Half-open membership ``[x, x + w) x [y, y + h)``."""
        r = self.rect
        return (px >= r.x0) & (px < r.x1) & (py >= r.y0) & (py < r.y1)

    def children(self):
        """The ``2 ** n`` dyadic sub-cubes of half the side length."""
        half = self.ell / 2
        w, h = (half ** a for a in self.alpha)
        nx = int(round(self.sides[0] / w))
        ny = int(round(self.sides[1] / h))
        return [AnisoCube((self.corner[0] + i * w, self.corner[1] + j * h), half, self.alpha)
                for i in range(nx) for j in range(ny)]

    def grid_points(self, spec: GridSpec):
        """Sample points of ``spec`` lying in the cube, as ``(px, py)`` arrays."""
        x, y = spec.axes()
        r = self.rect
        xs = x[(x >= r.x0) & (x < r.x1)]
        ys = y[(y >= r.y0) & (y < r.y1)]
        PX, PY = np.meshgrid(xs, ys, indexing="ij")
        return PX.ravel(), PY.ravel()


def centered_cube(center, ell, alpha=PARABOLIC) -> AnisoCube:
    w, h = (ell ** a for a in alpha)
    return AnisoCube((center[0] - w / 2, center[1] - h / 2), ell, alpha)


@dataclass(frozen=True)
class CubeFamily:
    window: Rect
    scales: tuple[float, ...]
    cubes: tuple[AnisoCube, ...]
    scale_index: tuple[int, ...] = field(repr=False, default=())

    def __post_init__(self):
        if not self.cubes:
            raise CubeError("empty cube family")
        if not self.scale_index:
            idx = tuple(self.scales.index(q.ell) if q.ell in self.scales else -1
                        for q in self.cubes)
            object.__setattr__(self, "scale_index", idx)

    def __len__(self):
        return len(self.cubes)

    def __iter__(self):
        return iter(self.cubes)

    def at_scale(self, k: int):
        return [q for q, s in zip(self.cubes, self.scale_index) if s == k]

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["corner_x", "corner_y", "ell", "scale_index"])
        for q, s in zip(self.cubes, self.scale_index):
            w.writerow([repr(q.corner[0]), repr(q.corner[1]), repr(q.ell), s])
        return out.getvalue()


def _tile(window: Rect, ell: float, alpha, offset=(0.0, 0.0)):
    w, h = (ell ** a for a in alpha)
    nx = int(math.floor((window.width - offset[0]) / w + 1e-9))
    ny = int(math.floor((window.height - offset[1]) / h + 1e-9))
    return [AnisoCube((window.x0 + offset[0] + i * w, window.y0 + offset[1] + j * h), ell, alpha)
            for i in range(nx) for j in range(ny)]


def enumerate_family(window: Rect, m_min: int, m_max: int, alpha=PARABOLIC,
                     dither: bool = False) -> CubeFamily:
    """Dyadic tiling of ``window`` by cubes of side ``2**-m`` for each ``m``.

    Cubes crossing the window boundary are dropped.  With ``dither`` each
    scale is tiled three more times, shifted by a third, half and two thirds
    of a cube along the diagonal.
    """
    if m_min > m_max:
        raise CubeError("m_min must not exceed m_max")
    scales = tuple(2.0 ** -m for m in range(m_min, m_max + 1))
    cubes, index = [], []
    shifts = [0.0, 1 / 3, 1 / 2, 2 / 3] if dither else [0.0]
    for k, ell in enumerate(scales):
        w, h = (ell ** a for a in alpha)
        for s in shifts:
            tiles = _tile(window, ell, alpha, (s * w, s * h))
            cubes.extend(tiles)
            index.extend([k] * len(tiles))
    if not cubes:
        raise CubeError(f"window {window} is smaller than the coarsest cube")
    return CubeFamily(window, scales, tuple(cubes), tuple(index))


def centered_family(center, m_min: int, m_max: int, alpha=SQUARE) -> CubeFamily:
    """Cubes of dyadic side lengths all centred on one point."""
    scales = tuple(2.0 ** -m for m in range(m_min, m_max + 1))
    cubes = tuple(centered_cube(center, s, alpha) for s in scales)
    big = cubes[0].rect
    return CubeFamily(big, scales, cubes, tuple(range(len(scales))))


def family_from_cubes(cubes, window: Rect | None = None) -> CubeFamily:
    cubes = tuple(cubes)
    if not cubes:
        raise CubeError("empty cube family")
    scales = tuple(sorted({q.ell for q in cubes}, reverse=True))
    if window is None:
        rs = [q.rect for q in cubes]
        window = Rect(min(r.x0 for r in rs), min(r.y0 for r in rs),
                      max(r.x1 for r in rs), max(r.y1 for r in rs))
    return CubeFamily(window, scales, cubes, tuple(scales.index(q.ell) for q in cubes))


# sparse collections ----------------------------------------------------------

def cube_mask(spec: GridSpec, cube: AnisoCube) -> np.ndarray:
    """Cells of ``spec`` whose centre lies in ``cube``."""
    x, y = spec.axes()
    r = cube.rect
    mx = (x >= r.x0) & (x < r.x1)
    my = (y >= r.y0) & (y < r.y1)
    return mx[:, None] & my[None, :]


@dataclass(frozen=True)
class SparseCollection:
    spec: GridSpec
    cubes: tuple[AnisoCube, ...]
    masks: tuple[np.ndarray, ...] = field(repr=False)
    delta: float = 0.5

    def __post_init__(self):
        if len(self.cubes) != len(self.masks):
            raise CubeError("one mask per cube required")
        if not 0 < self.delta < 1:
            raise CubeError("delta must lie in (0, 1)")

    def __len__(self):
        return len(self.cubes)


@dataclass
class SparsityReport:
    ok: bool
    worst_ratio: float
    overlap_cells: int = 0
    outside_cells: int = 0
    failing: list = field(default_factory=list)


def verify_sparsity(S: SparseCollection) -> SparsityReport:
    if not len(S):
        return SparsityReport(True, math.inf)
    cell = S.spec.cell_area
    cover = np.zeros(S.spec.shape, dtype=np.int64)
    worst = math.inf
    outside = 0
    failing = []
    for k, (q, m) in enumerate(zip(S.cubes, S.masks)):
        cover += m
        outside += int((m & ~cube_mask(S.spec, q)).sum())
        ratio = m.sum() * cell / q.measure
        worst = min(worst, ratio)
        if ratio < S.delta * (1 - 1e-12):
            failing.append(k)
    overlap = int(np.maximum(cover - 1, 0).sum())
    ok = overlap == 0 and outside == 0 and not failing
    return SparsityReport(ok, float(worst), overlap, outside, failing)


# testing sub-cubes -----------------------------------------------------------

def find_testing_subcube(Q: AnisoCube, R: AnisoCube, curve, max_depth: int = 6,
                         refinement: int = 8, margin=(0.0, 0.0)):
    """Largest dyadic sub-cube of ``Q`` whose flow set lies inside ``R``.

    Searches levels 1..max_depth below ``Q``.  At each level the admissible
    corners follow from the analytic bounding box of the flow set; the first
    candidate is then re-checked against its rasterized flow set.  Returns
    ``None`` if nothing fits.  ``margin`` shrinks ``R`` on every side.
    """
    from .curves import flow_bbox, flow_set

    r0 = R.rect
    r = Rect(r0.x0 + margin[0], r0.y0 + margin[1], r0.x1 - margin[0], r0.y1 - margin[1])
    for depth in range(1, max_depth + 1):
        ell = Q.ell / 2 ** depth
        w, h = (ell ** a for a in Q.alpha)
        probe = AnisoCube((0.0, 0.0), ell, Q.alpha)
        bx0, by0, bx1, by1 = flow_bbox(curve, probe)
        nx = int(round(Q.sides[0] / w))
        ny = int(round(Q.sides[1] / h))
        # corner c must satisfy r.x0 <= c + bx0 and c + bx1 <= r.x1
        i_lo = max(0, math.ceil((r.x0 - bx0 - Q.corner[0]) / w - 1e-9))
        i_hi = min(nx - 1, math.floor((r.x1 - bx1 - Q.corner[0]) / w + 1e-9))
        j_lo = max(0, math.ceil((r.y0 - by0 - Q.corner[1]) / h - 1e-9))
        j_hi = min(ny - 1, math.floor((r.y1 - by1 - Q.corner[1]) / h + 1e-9))
        for i in range(i_lo, i_hi + 1):
            for j in range(j_lo, j_hi + 1):
                c = AnisoCube((Q.corner[0] + i * w, Q.corner[1] + j * h), ell, Q.alpha)
                x0, y0, x1, y1 = flow_set(curve, c, refinement).occupied_bounds()
                if x0 >= r.x0 and x1 <= r.x1 and y0 >= r.y0 and y1 <= r.y1:
                    return c
    return None
