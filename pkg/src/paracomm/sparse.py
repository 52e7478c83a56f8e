"""Sparse forms, greedy sparse families and domination ratios."""
from __future__ import annotations

import csv
import io
import logging
import math

import numpy as np

from .commutator import OperatorHandle
from .cubes import CubeFamily, SparseCollection, cube_mask
from .grid import GridSpec, ScalarField2D, inner_product, rect_weights

log = logging.getLogger(__name__)

TRIANGLE = ((0.0, 0.0), (1.0, 0.0), (2.0 / 3.0, 1.0 / 3.0))
TRIANGLE_ALT = ((0.0, 0.0), (1.0, 1.0), (2.0 / 3.0, 1.0 / 3.0))


class SparseError(ValueError):
    pass


def _power_average(values: np.ndarray, spec: GridSpec, rect, r: float) -> float:
    ix, wx, iy, wy = rect_weights(spec, rect)
    blk = np.abs(values[np.ix_(ix, iy)]) ** r
    return float(wx @ blk @ wy / (wx.sum() * wy.sum())) ** (1.0 / r)


def sparse_form(S: SparseCollection, f: ScalarField2D, g: ScalarField2D,
                r: float = 1.0, s: float = 1.0) -> float:
    """``sum_P |P| <|f|^r>_P^{1/r} <|g|^s>_P^{1/s}``."""
    if r < 1 or s < 1:
        raise SparseError("exponents must be at least 1")
    total = 0.0
    for q in S.cubes:
        a = _power_average(f.values, f.spec, q.rect, r)
        if a == 0:
            continue
        total += q.measure * a * _power_average(g.values, g.spec, q.rect, s)
    return total


# greedy families ---------------------------------------------------------------

def _bitrev(v: np.ndarray, bits: int) -> np.ndarray:
    out = np.zeros_like(v)
    for k in range(bits):
        out |= ((v >> k) & 1) << (bits - 1 - k)
    return out


def _stratified_key(i: np.ndarray, j: np.ndarray, bx: int, by: int) -> np.ndarray:
    """Interleaved bit-reversed indices: every prefix spreads evenly over dyadic blocks."""
    ri, rj = _bitrev(i, bx), _bitrev(j, by)
    key = np.zeros_like(i)
    pos = 0
    for k in range(max(bx, by)):
        # least significant bits of the reversed index are the coarse blocks
        if k < bx:
            key |= ((ri >> k) & 1) << pos
            pos += 1
        if k < by:
            key |= ((rj >> k) & 1) << pos
            pos += 1
    return key


def _claim_order(ii: np.ndarray, jj: np.ndarray, rng) -> np.ndarray:
    i = ii - ii.min()
    j = jj - jj.min()
    bx = max(1, int(i.max()).bit_length())
    by = max(1, int(j.max()).bit_length())
    i = i ^ int(rng.integers(0, 2 ** bx))
    j = j ^ int(rng.integers(0, 2 ** by))
    return np.argsort(_stratified_key(i, j, bx, by), kind="stable")


def generate_sparse_family(fam: CubeFamily, delta: float, seed: int = 0,
                           spec: GridSpec | None = None) -> SparseCollection:
    """Greedy coarse-to-fine selection.

    A cube of a non-finest scale claims ``ceil(delta N)`` of its unclaimed
    cells in a stratified order; a cube of the finest scale claims all of
    them.  Cubes that cannot reach ``delta N`` are skipped.
    """
    if not 0 < delta < 1:
        raise SparseError("delta must lie in (0, 1)")
    if spec is None:
        raise SparseError("a raster grid is required")
    rng = np.random.default_rng(seed)
    claimed = np.zeros(spec.shape, dtype=bool)
    finest = max(fam.scale_index)
    order = sorted(range(len(fam)), key=lambda k: (fam.scale_index[k], k))
    cubes, masks = [], []
    for k in order:
        q = fam.cubes[k]
        own = cube_mask(spec, q)
        n_own = int(own.sum())
        if n_own == 0:
            continue
        # cells needed so that the claimed area reaches delta |P|
        need = int(math.ceil(delta * q.measure / spec.cell_area - 1e-9))
        free = own & ~claimed
        ii, jj = np.nonzero(free)
        if len(ii) < need:
            continue
        if fam.scale_index[k] == finest:
            take = np.arange(len(ii))
        else:
            take = _claim_order(ii, jj, rng)[:need]
        m = np.zeros(spec.shape, dtype=bool)
        m[ii[take], jj[take]] = True
        claimed |= m
        cubes.append(q)
        masks.append(m)
    return SparseCollection(spec, tuple(cubes), tuple(masks), delta)


# domination ------------------------------------------------------------------

def domination_ratio(f: ScalarField2D, g: ScalarField2D, S: SparseCollection,
                     r: float, s: float, T: OperatorHandle) -> float:
    """``|<T f, g>| / Lambda_{S,r,s}(f, g)``; ``inf`` when the form misses the pairing."""
    pair = abs(inner_product(T.apply(f), g))
    if pair == 0:
        return 0.0
    lam = sparse_form(S, f, g, r, s)
    if lam == 0:
        log.debug("sparse form vanishes on a nonzero pairing; family too small")
        return math.inf
    return pair / lam


def in_triangle(point, vertices=TRIANGLE, strict: bool = True) -> bool:
    """Barycentric membership of ``(1/r, 1/s')``."""
    (x1, y1), (x2, y2), (x3, y3) = vertices
    x, y = point
    den = (y2 - y3) * (x1 - x3) + (x3 - x2) * (y1 - y3)
    a = ((y2 - y3) * (x - x3) + (x3 - x2) * (y - y3)) / den
    b = ((y3 - y1) * (x - x3) + (x1 - x3) * (y - y3)) / den
    c = 1.0 - a - b
    tol = 1e-12
    if strict:
        return a > tol and b > tol and c > tol
    return a >= -tol and b >= -tol and c >= -tol


def exponent_point(r: float, s: float):
    """``(1/r, 1/s')`` with ``s'`` the dual exponent of ``s``."""
    return (1.0 / r, 1.0 - 1.0 / s)


def random_pair(spec: GridSpec, rng, coarse: int = 16, support: int = 4):
    """Random fields constant on a ``coarse x coarse`` lattice, supported in ``support^2`` blocks.

    The draws do not depend on the grid, so refining ``spec`` samples the
    same pair of functions.
    """
    if spec.nx % coarse or spec.ny % coarse:
        raise SparseError("grid must refine the coarse lattice")
    out = []
    for _ in range(2):
        blocks = np.zeros((coarse, coarse))
        i0, j0 = rng.integers(0, coarse - support + 1, size=2)
        blocks[i0:i0 + support, j0:j0 + support] = rng.standard_normal((support, support))
        v = np.kron(blocks, np.ones((spec.nx // coarse, spec.ny // coarse)))
        out.append(ScalarField2D(spec, v))
    return out


def ratio_study_csv(rows) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["r", "s", "grid", "max_ratio", "median_ratio"])
    for r, s, n, mx, med in rows:
        w.writerow([repr(r), repr(s), n, repr(mx), repr(med)])
    return out.getvalue()
