"""Hilbert transforms along curves.

Every curved transform is the truncated principal value

    H f(x) = sum_k w_k [f(x - gamma(t_k)) - f(x - gamma(-t_k))]

over log-spaced nodes ``t_k`` in ``[eps, T]`` with trapezoid weights ``w_k`` in
``u = log t`` (so ``dt/t = du``).  Pairing ``t`` with ``-t`` before summing
makes the cancellation exact rather than a limit.

Two evaluation routes exist: the direct route shifts the sampled field by
bilinear interpolation, and the Fourier route applies the exact symbol of the
same node sum on the grid's frequency lattice.
"""
from __future__ import annotations

import hashlib
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import curves as C
from .grid import GridSpec, ScalarField2D, shifted


class TransformError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    eps: float
    T: float
    nodes_per_dyad: int = 32

    def __post_init__(self):
        if not (0 < self.eps < self.T):
            raise TransformError("need 0 < eps < T")
        if self.nodes_per_dyad < 8:
            raise TransformError("nodes_per_dyad must be at least 8")

    @classmethod
    def default(cls, spec: GridSpec, nodes_per_dyad: int = 32):
        return cls(spec.dx / 16, min(spec.lx, spec.ly) / 4, nodes_per_dyad)

    def nodes(self):
        """Nodes ``t_k`` and weights in ``du = dt/t``."""
        span = math.log(self.T / self.eps)
        n = max(1, int(math.ceil(self.nodes_per_dyad * span / math.log(2))))
        u = np.linspace(math.log(self.eps), math.log(self.T), n + 1)
        w = np.full(n + 1, span / n)
        w[[0, -1]] *= 0.5
        return np.exp(u), w

    def scaled(self, lam: float) -> "QuadratureSpec":
        return QuadratureSpec(self.eps * lam, self.T * lam, self.nodes_per_dyad)


# 1-D -------------------------------------------------------------------------

def hilbert_symbol_1d(n: int, d: float) -> np.ndarray:
    """``-i pi sign(xi)`` on the FFT lattice; zero at the Nyquist mode."""
    k = np.fft.fftfreq(n, d)
    m = -1j * math.pi * np.sign(k)
    if n % 2 == 0:
        m[n // 2] = 0.0
    return m


def hilbert_1d(f, axis: int = -1) -> np.ndarray:
    """Periodic ``p.v. int f(x - t) dt/t`` of samples along ``axis``."""
    f = np.asarray(f)
    n = f.shape[axis]
    shape = [1] * f.ndim
    shape[axis] = n
    m = hilbert_symbol_1d(n, 1.0).reshape(shape)
    out = np.fft.ifft(m * np.fft.fft(f, axis=axis), axis=axis)
    return out if np.iscomplexobj(f) else out.real


def line_hilbert(f: ScalarField2D) -> ScalarField2D:
    """Transform along horizontal lines: every row ``f(., y)`` gets ``hilbert_1d``."""
    return ScalarField2D(f.spec, hilbert_1d(f.values, axis=0))


# direct route ------------------------------------------------------------------

def _wrap_check(c, spec: GridSpec, T: float, allow_wrap: bool):
    if allow_wrap:
        return
    g = np.abs(C.eval_curve(c, np.array([-T, T])))
    reach = g.max(axis=0)
    half = np.array([spec.lx, spec.ly]) / 2
    if np.any(reach > half):
        raise TransformError(
            f"curve displacement {reach.tolist()} at T = {T} exceeds half the domain "
            f"{half.tolist()} (wrap contamination)")


def curved_hilbert_direct(f: ScalarField2D, c, q: QuadratureSpec,
                          allow_wrap: bool = False) -> ScalarField2D:
    if c.kind == C.TORSION:
        raise TransformError("use torsion_hilbert_truncated for sampled curves")
    _wrap_check(c, f.spec, q.T, allow_wrap)
    t, w = q.nodes()
    gp = C.eval_curve(c, t)
    gm = C.eval_curve(c, -t)
    acc = np.zeros(f.spec.shape, dtype=f.values.dtype)
    for k in range(len(t)):
        acc += w[k] * (shifted(f, *gp[k]) - shifted(f, *gm[k]))
    return ScalarField2D(f.spec, acc)


def torsion_hilbert_truncated(f: ScalarField2D, c, q: QuadratureSpec) -> ScalarField2D:
    if c.kind != C.TORSION:
        raise TransformError("torsion transform needs a sampled torsion curve")
    if q.T > 1:
        raise TransformError("the torsion transform is truncated to |t| <= 1")
    t, w = q.nodes()
    gp = C.eval_curve(c, t)
    gm = C.eval_curve(c, -t)
    acc = np.zeros(f.spec.shape, dtype=f.values.dtype)
    for k in range(len(t)):
        acc += w[k] * (shifted(f, *gp[k]) - shifted(f, *gm[k]))
    return ScalarField2D(f.spec, acc)


# Fourier route -----------------------------------------------------------------

def frequencies(spec: GridSpec):
    xi1 = 2 * np.pi * np.fft.fftfreq(spec.nx, spec.dx)
    xi2 = 2 * np.pi * np.fft.fftfreq(spec.ny, spec.dy)
    return xi1, xi2


@dataclass(frozen=True, eq=False)
class MultiplierTable:
    spec: GridSpec
    values: np.ndarray = field(repr=False)
    curve_tag: str = ""
    quad: QuadratureSpec | None = None

    @property
    def max_abs(self) -> float:
        return float(np.abs(self.values).max())

    def adjoint(self) -> "MultiplierTable":
        return MultiplierTable(self.spec, np.conj(self.values), self.curve_tag + "*", self.quad)

    def fingerprint(self) -> str:
        return multiplier_key(self.curve_tag, self.spec, self.quad)

    def to_bytes(self) -> bytes:
        buf = io.BytesIO()
        xi1, xi2 = frequencies(self.spec)
        np.savez(buf, xi1=xi1, xi2=xi2, re=self.values.real, im=self.values.imag,
                 grid=np.array([self.spec.nx, self.spec.ny, self.spec.lx, self.spec.ly,
                                *self.spec.origin]),
                 quad=np.array([self.quad.eps, self.quad.T, self.quad.nodes_per_dyad]),
                 tag=np.array(self.curve_tag))
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "MultiplierTable":
        z = np.load(io.BytesIO(data))
        g = z["grid"]
        spec = GridSpec(int(g[0]), int(g[1]), float(g[2]), float(g[3]), (g[4], g[5]))
        qa = z["quad"]
        quad = QuadratureSpec(float(qa[0]), float(qa[1]), int(qa[2]))
        return cls(spec, z["re"] + 1j * z["im"], str(z["tag"]), quad)


def multiplier_key(tag: str, spec: GridSpec, q: QuadratureSpec) -> str:
    raw = f"{tag}|{spec}|{q}".encode()
    return hashlib.sha1(raw).hexdigest()[:16]


def build_multiplier(c, spec: GridSpec, q: QuadratureSpec, chunk: int = 64) -> MultiplierTable:
    """Symbol of the node sum on the frequency lattice.

    ``m(xi) = sum_k w_k [exp(-i xi.gamma(t_k)) - exp(-i xi.gamma(-t_k))]``
    """
    if c.kind not in (C.PARABOLA, C.MONOMIAL, C.LINE):
        raise TransformError(f"no multiplier for curve kind {c.kind!r}")
    t, w = q.nodes()
    gp = C.eval_curve(c, t)
    gm = C.eval_curve(c, -t)
    xi1, xi2 = frequencies(spec)
    m = np.zeros(spec.shape, dtype=complex)
    for s in range(0, len(t), chunk):
        sl = slice(s, s + chunk)
        # separable phases: exp(-i xi1 g1) exp(-i xi2 g2)
        ep1 = np.exp(-1j * np.outer(gp[sl, 0], xi1))
        ep2 = np.exp(-1j * np.outer(gp[sl, 1], xi2))
        em1 = np.exp(-1j * np.outer(gm[sl, 0], xi1))
        em2 = np.exp(-1j * np.outer(gm[sl, 1], xi2))
        ws = w[sl]
        m += np.einsum("k,ki,kj->ij", ws, ep1, ep2) - np.einsum("k,ki,kj->ij", ws, em1, em2)
    # m(-xi) = conj(m(xi)) holds off the Nyquist lines already; this fixes those
    flip = np.roll(m[::-1, ::-1], (1, 1), axis=(0, 1))
    m = 0.5 * (m + np.conj(flip))
    return MultiplierTable(spec, m, c.fingerprint(), q)


def curved_hilbert_fourier(f: ScalarField2D, m: MultiplierTable,
                           residue_tol: float = 1e-9) -> ScalarField2D:
    if m.spec != f.spec:
        raise TransformError("multiplier was built for a different grid")
    out = np.fft.ifft2(m.values * np.fft.fft2(f.values))
    if np.iscomplexobj(f.values):
        return ScalarField2D(f.spec, out)
    res = np.abs(out.imag).max()
    scale = max(np.abs(out.real).max(), np.abs(f.values).max(), 1.0)
    if res > residue_tol * scale:
        raise TransformError(f"imaginary residue {res:.3g}: multiplier is not Hermitian")
    return ScalarField2D(f.spec, out.real)


class MultiplierCache:
    """In-memory cache of multiplier tables keyed by curve, grid and quadrature."""

    def __init__(self):
        self._tables = {}

    def get(self, c, spec: GridSpec, q: QuadratureSpec) -> MultiplierTable:
        key = multiplier_key(c.fingerprint(), spec, q)
        if key not in self._tables:
            self._tables[key] = build_multiplier(c, spec, q)
        return self._tables[key]


default_cache = MultiplierCache()
