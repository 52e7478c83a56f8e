"""Muckenhoupt and reverse Hoelder characteristics, exponential weights."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from .commutator import NormEstimate, OperatorHandle, operator_norm_upper
from .cubes import CubeFamily
from .grid import ScalarField2D, rect_weights

log = logging.getLogger(__name__)


class WeightError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Weight:
    """Positive weight stored through its logarithm."""

    log_values: ScalarField2D = field(repr=False)

    @property
    def field(self) -> ScalarField2D:
        return self.log_values.map(np.exp)

    @property
    def spec(self):
        return self.log_values.spec

    @property
    def floor(self) -> float:
        return float(np.exp(self.log_values.values.min()))

    @property
    def dynamic_range(self) -> float:
        v = self.log_values.values
        return float(np.exp(v.max() - v.min()))

    def power(self, a: float) -> np.ndarray:
        return np.exp(a * self.log_values.values)

    def inverse(self) -> "Weight":
        return Weight(-self.log_values)

    @classmethod
    def from_field(cls, w: ScalarField2D) -> "Weight":
        if np.any(w.values.real <= 0):
            raise WeightError("weight must be strictly positive")
        return cls(w.map(np.log))


def exp_weight(lam: float, b: ScalarField2D) -> Weight:
    m = abs(lam) * float(np.abs(b.values).max())
    if m > 80:
        raise WeightError(f"|lambda| max|b| = {m:.4g} exceeds 80 (overflow guard)")
    w = Weight(b * float(lam))
    log.debug("exp weight lambda=%g dynamic range %.3g", lam, w.dynamic_range)
    return w


def _averages(values: np.ndarray, spec, fam: CubeFamily) -> np.ndarray:
    out = np.empty(len(fam))
    for k, q in enumerate(fam.cubes):
        ix, wx, iy, wy = rect_weights(spec, q.rect)
        out[k] = wx @ values[np.ix_(ix, iy)] @ wy / (wx.sum() * wy.sum())
    return out


def ap_table(w: Weight, p: float, fam: CubeFamily) -> np.ndarray:
    if not p > 1:
        raise WeightError("p must exceed 1")
    a = _averages(w.power(1.0), w.spec, fam)
    d = _averages(w.power(1.0 / (1.0 - p)), w.spec, fam)
    return a * d ** (p - 1)


def ap_characteristic(w: Weight, p: float, fam: CubeFamily) -> float:
    """``max_Q <w>_Q <w^{1/(1-p)}>_Q^{p-1}`` over the family."""
    return float(ap_table(w, p, fam).max())


def rh_table(w: Weight, q: float, fam: CubeFamily) -> np.ndarray:
    if not q > 1:
        raise WeightError("q must exceed 1")
    top = _averages(w.power(q), w.spec, fam) ** (1.0 / q)
    return top / _averages(w.power(1.0), w.spec, fam)


def rh_characteristic(w: Weight, q: float, fam: CubeFamily) -> float:
    """``max_Q <w^q>_Q^{1/q} / <w>_Q`` over the family."""
    return float(rh_table(w, q, fam).max())


def characteristic_csv(fam: CubeFamily, values) -> str:
    out = io.StringIO()
    wr = csv.writer(out, lineterminator="\n")
    wr.writerow(["corner_x", "corner_y", "ell", "characteristic"])
    for q, v in zip(fam.cubes, values):
        wr.writerow([repr(q.corner[0]), repr(q.corner[1]), repr(q.ell), repr(float(v))])
    return out.getvalue()


def weighted_handle(T: OperatorHandle, w: Weight) -> OperatorHandle:
    """``f -> w^{1/2} T(w^{-1/2} f)``; its L2 norm is the L2(w) norm of ``T``."""
    up = w.power(0.5)
    down = w.power(-0.5)

    def fwd(f):
        return ScalarField2D(f.spec, up * T.apply(f * down).values)

    def adj(g):
        return ScalarField2D(g.spec, down * T.adjoint_apply(g * up).values)

    return OperatorHandle(fwd, adj, f"w^1/2 {T.label} w^-1/2", T.spec or w.spec)


def weighted_operator_norm(T: OperatorHandle, w: Weight, iters: int = 200,
                           seed: int = 0) -> NormEstimate:
    return operator_norm_upper(weighted_handle(T, w), iters, seed, spec=w.spec)
