"""Commutators with a symbol, their contour representation and norm estimates."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import curves as C
from . import transforms as TR
from .cubes import CubeFamily
from .grid import GridSpec, ScalarField2D, average_over_rect, lp_norm, shifted


class CommutatorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OperatorHandle:
    """A real-linear operator on fields over ``spec`` together with its adjoint."""

    apply: Callable[[ScalarField2D], ScalarField2D]
    adjoint_apply: Callable[[ScalarField2D], ScalarField2D]
    label: str = "T"
    spec: GridSpec | None = None

    def __call__(self, f: ScalarField2D) -> ScalarField2D:
        return self.apply(f)

    @property
    def adjoint(self) -> "OperatorHandle":
        return OperatorHandle(self.adjoint_apply, self.apply, self.label + "*", self.spec)


# handle factories --------------------------------------------------------------

def identity_handle(spec: GridSpec, scale: float = 1.0) -> OperatorHandle:
    op = lambda f: f * scale  # noqa: E731
    return OperatorHandle(op, op, f"{scale:g}*I", spec)


def fourier_handle(c, spec: GridSpec, q: TR.QuadratureSpec | None = None,
                   cache: TR.MultiplierCache | None = None) -> OperatorHandle:
    q = q or TR.QuadratureSpec.default(spec)
    cache = cache or TR.default_cache
    m = cache.get(c, spec, q)
    ma = m.adjoint()
    return OperatorHandle(lambda f: TR.curved_hilbert_fourier(f, m),
                          lambda f: TR.curved_hilbert_fourier(f, ma),
                          f"H[{c.label}]/fourier", spec)


def _node_sum_adjoint(g: ScalarField2D, c, q: TR.QuadratureSpec) -> ScalarField2D:
    # the transpose of a bilinear shift by s is the bilinear shift by -s
    t, w = q.nodes()
    gp = C.eval_curve(c, t)
    gm = C.eval_curve(c, -t)
    acc = np.zeros(g.spec.shape, dtype=g.values.dtype)
    for k in range(len(t)):
        acc += w[k] * (shifted(g, *(-gp[k])) - shifted(g, *(-gm[k])))
    return ScalarField2D(g.spec, acc)


def direct_handle(c, spec: GridSpec, q: TR.QuadratureSpec | None = None,
                  allow_wrap: bool = False) -> OperatorHandle:
    q = q or TR.QuadratureSpec.default(spec)
    return OperatorHandle(lambda f: TR.curved_hilbert_direct(f, c, q, allow_wrap),
                          lambda g: _node_sum_adjoint(g, c, q),
                          f"H[{c.label}]/direct", spec)


def torsion_handle(c, spec: GridSpec, q: TR.QuadratureSpec) -> OperatorHandle:
    return OperatorHandle(lambda f: TR.torsion_hilbert_truncated(f, c, q),
                          lambda g: _node_sum_adjoint(g, c, q),
                          f"H[{c.label}]/truncated", spec)


def line_handle(spec: GridSpec) -> OperatorHandle:
    return OperatorHandle(TR.line_hilbert, lambda g: -TR.line_hilbert(g), "H[line]", spec)


def commutator_handle(b: ScalarField2D, T: OperatorHandle, k: int = 1) -> OperatorHandle:
    """``T^k_b`` as a handle; its adjoint is ``(-1)**k (T*)^k_b`` for real ``b``."""
    Ta = T.adjoint
    sign = (-1.0) ** k
    return OperatorHandle(lambda f: higher_commutator_apply(k, b, f, T),
                          lambda g: higher_commutator_apply(k, b, g, Ta) * sign,
                          f"[b,{T.label}]^{k}", T.spec)


# commutators -----------------------------------------------------------------

def _check(b: ScalarField2D, f: ScalarField2D):
    if b.spec != f.spec:
        raise CommutatorError("symbol and input live on different grids")


def commutator_apply(b: ScalarField2D, T: OperatorHandle, f: ScalarField2D) -> ScalarField2D:
    """``b T(f) - T(b f)``."""
    _check(b, f)
    return ScalarField2D(f.spec, b.values * T.apply(f).values - T.apply(b * f).values)


def higher_commutator_apply(k: int, b: ScalarField2D, f: ScalarField2D,
                            T: OperatorHandle) -> ScalarField2D:
    """``T^0_b = T`` and ``T^{k+1}_b = [b, T^k_b]``, unrolled literally."""
    if not 0 <= k <= 4:
        raise CommutatorError("order k must lie in 0..4")
    _check(b, f)
    if k == 0:
        return T.apply(f)
    lower = lambda g: higher_commutator_apply(k - 1, b, g, T)  # noqa: E731
    return ScalarField2D(f.spec, b.values * lower(f).values - lower(b * f).values)


def _apply_split(T: OperatorHandle, v: np.ndarray, spec: GridSpec) -> np.ndarray:
    re = T.apply(ScalarField2D(spec, v.real)).values
    im = T.apply(ScalarField2D(spec, v.imag)).values
    return re + 1j * im


def conjugated_apply(z: complex, b: ScalarField2D, T: OperatorHandle,
                     f: ScalarField2D) -> ScalarField2D:
    """``e^{zb/2} T(e^{-zb/2} f)`` with ``T`` applied to real and imaginary parts."""
    _check(b, f)
    z = complex(z)
    bmax = float(np.abs(b.values).max())
    if abs(z.real) * bmax > 80:
        raise CommutatorError(
            f"|Re z| max|b| = {abs(z.real) * bmax:.4g} exceeds 80 (exponential overflow guard)")
    if z == 0:
        return T.apply(f)
    half = 0.5 * z * b.values
    inner = np.exp(-half) * f.values
    return ScalarField2D(f.spec, np.exp(half) * _apply_split(T, inner, f.spec))


@dataclass(frozen=True)
class ContourSpec:
    radius: float
    nodes: int = 32
    order: int = 1

    def __post_init__(self):
        if not self.radius > 0:
            raise CommutatorError("contour radius must be positive")
        if self.nodes < 8 or self.nodes % 2:
            raise CommutatorError("contour node count must be even and at least 8")
        if self.order < 1:
            raise CommutatorError("contour order must be at least 1")

    @classmethod
    def for_symbol(cls, b: ScalarField2D, nodes: int = 32, order: int = 1, scale: float = 0.1):
        return cls(scale / max(float(np.abs(b.values).max()), 1e-300), nodes, order)


@dataclass
class ContourResult:
    field: ScalarField2D
    residue: float


def contour_commutator(spec: ContourSpec, b: ScalarField2D, f: ScalarField2D,
                       T: OperatorHandle, rtol: float = 1e-6,
                       return_residue: bool = False):
    """Trapezoid rule on ``|z| = eps`` for ``(2^k k! / 2 pi i) oint F(z) z^{-k-1} dz``.

    With ``z = eps e^{i theta}`` this is ``2^k k! mean_j F(z_j) z_j^{-k}``.
    """
    _check(b, f)
    k, M, eps = spec.order, spec.nodes, spec.radius
    if eps * float(np.abs(b.values).max()) > 40:
        raise CommutatorError("contour radius too large for this symbol (eps max|b| > 40)")
    theta = 2 * np.pi * np.arange(M) / M
    acc = np.zeros(f.spec.shape, dtype=complex)
    fmax = 0.0
    for th in theta:
        z = eps * np.exp(1j * th)
        F = conjugated_apply(z, b, T, f).values
        fmax = max(fmax, float(np.sqrt(np.sum(np.abs(F) ** 2) * f.spec.cell_area)))
        acc += F * z ** (-k)
    coef = 2.0 ** k * math.factorial(k)
    out = coef * acc / M
    res = float(np.sqrt(np.sum(out.imag ** 2) * f.spec.cell_area))
    real = ScalarField2D(f.spec, out.real)
    # rounding in F is amplified by coef / eps^k; allow for it
    floor = 1e-12 * coef * eps ** (-k) * fmax
    if res > rtol * lp_norm(real) + floor:
        raise CommutatorError(f"imaginary residue {res:.3g}: increase the node count or shrink eps")
    return ContourResult(real, res) if return_residue else real


# norms -------------------------------------------------------------------------

@dataclass
class NormEstimate:
    upper: float
    lower: float = 0.0
    iterations: int = 0
    residual: float = 0.0
    converged: bool = True
    history: list = field(default_factory=list, repr=False)
    table: list = field(default_factory=list, repr=False)

    def summary(self) -> dict:
        return {"upper": self.upper, "lower": self.lower, "iterations": self.iterations,
                "residual": self.residual, "converged": self.converged}

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)

    def table_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["corner_x", "corner_y", "ell", "rayleigh", "chain"])
        for q, r, ch in self.table:
            w.writerow([repr(q.corner[0]), repr(q.corner[1]), repr(q.ell), repr(r), repr(ch)])
        return out.getvalue()


def _l2(v: np.ndarray, spec: GridSpec) -> float:
    return float(np.sqrt(np.sum(np.abs(v) ** 2) * spec.cell_area))


def operator_norm_upper(T: OperatorHandle, iters: int = 100, seed: int = 0,
                        spec: GridSpec | None = None, tol: float = 1e-4) -> NormEstimate:
    """Power iteration on ``T* T`` from a seeded Gaussian start."""
    spec = spec or T.spec
    if spec is None:
        raise CommutatorError("operator norm needs a grid")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(spec.shape)
    v /= _l2(v, spec)
    hist = []
    for _ in range(iters):
        Tv = T.apply(ScalarField2D(spec, v)).values
        lam = _l2(Tv, spec) ** 2
        w = T.adjoint_apply(ScalarField2D(spec, Tv)).values
        hist.append(math.sqrt(lam))
        nw = _l2(w, spec)
        if nw == 0:
            break
        v = w / nw
    top = hist[-1] ** 2
    res = 0.0 if top == 0 else abs(top - (hist[-2] ** 2 if len(hist) > 1 else 0.0)) / top
    return NormEstimate(hist[-1], 0.0, len(hist), res, res <= tol, hist)


def dense_matrix(T: OperatorHandle, spec: GridSpec | None = None) -> np.ndarray:
    """Matrix of ``T`` in the sample basis (columns are images of unit samples)."""
    spec = spec or T.spec
    N = spec.nx * spec.ny
    if N > 4096:
        raise CommutatorError("dense matrix limited to 4096 unknowns")
    A = np.empty((N, N))
    e = np.zeros(N)
    for j in range(N):
        e[j] = 1.0
        A[:, j] = T.apply(ScalarField2D(spec, e.reshape(spec.shape))).values.ravel()
        e[j] = 0.0
    return A


def dense_norm(T: OperatorHandle, spec: GridSpec | None = None) -> float:
    """Largest singular value; equals the L2 operator norm on a uniform grid."""
    return float(np.linalg.norm(dense_matrix(T, spec), 2))


def operator_norm_lower_testing(b: ScalarField2D, T: OperatorHandle, fam: CubeFamily,
                                c, periodic: bool = True) -> NormEstimate:
    """Rayleigh quotients ``||[b,T] chi_E||_2 / ||chi_E||_2`` over the flow sets of ``fam``."""
    spec = b.spec
    X, Y = spec.mesh()
    table = []
    for q in fam.cubes:
        E = C.flow_set(c, q, refinement=2)
        if periodic:
            E = E.with_period((spec.lx, spec.ly))
        chi = E.contains(X, Y).astype(float)
        n = chi.sum()
        if n == 0:
            continue
        out = commutator_apply(b, T, ScalarField2D(spec, chi))
        ray = lp_norm(out) / math.sqrt(n * spec.cell_area)
        absout = ScalarField2D(spec, np.abs(out.values))
        chain = math.sqrt(q.measure / (n * spec.cell_area)) * average_over_rect(absout, q.rect)
        table.append((q, ray, chain))
    if not table:
        raise CommutatorError("no flow set of the family contains a grid point")
    lower = max(r for _, r, _ in table)
    return NormEstimate(math.nan, lower, 0, 0.0, True, [], table)
