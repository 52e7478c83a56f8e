"""Named symbol presets used by the experiments."""
from __future__ import annotations

import numpy as np

from .cubes import PARABOLIC, AnisoCube, CubeFamily, enumerate_family
from .grid import GridSpec, Rect, ScalarField2D, field_from_fn


class PresetError(KeyError):
    pass


def default_family(spec: GridSpec, m_min: int = 1, m_max: int = 3, alpha=PARABOLIC) -> CubeFamily:
    lo = spec.lower
    return enumerate_family(Rect(lo[0], lo[1], lo[0] + spec.lx, lo[1] + spec.ly),
                            m_min, m_max, alpha)


def band_limited(spec: GridSpec, rng, cutoff: int | None = None, sigma: float | None = None):
    """Random real field with Gaussian-decaying Fourier coefficients.

    Modes with ``|k| > cutoff`` (integer wavenumbers per axis) are zero.
    """
    cutoff = cutoff or max(2, min(spec.nx, spec.ny) // 8)
    sigma = sigma or cutoff / 3
    kx = np.fft.fftfreq(spec.nx, 1.0 / spec.nx)
    ky = np.fft.fftfreq(spec.ny, 1.0 / spec.ny)
    K = np.hypot(kx[:, None], ky[None, :])
    amp = np.exp(-0.5 * (K / sigma) ** 2) * (K <= cutoff) * (K > 0)
    c = amp * (rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape))
    v = np.fft.ifft2(c).real
    return ScalarField2D(spec, v / np.abs(v).max())


def smooth_random(spec: GridSpec, rng, fam: CubeFamily | None = None, **kw) -> ScalarField2D:
    """Band-limited field normalized to family-BMO 1."""
    from .oscillation import bmo_norm

    b = band_limited(spec, rng, **kw)
    fam = fam or default_family(spec)
    return b * (1.0 / bmo_norm(b, fam).value)


def two_level(spec: GridSpec, Q: AnisoCube, R: AnisoCube, low: float = 0.0,
              high: float = 1.0) -> ScalarField2D:
    """``high`` on the rectangle of ``R``, ``low`` elsewhere (in particular on ``Q``)."""
    r = R.rect
    return field_from_fn(spec, lambda x, y: np.where(
        (x >= r.x0) & (x < r.x1) & (y >= r.y0) & (y < r.y1), high, low))


def log_parabolic(spec: GridSpec, center=(0.5, 0.5)) -> ScalarField2D:
    """``log(|x| + |y|^{1/2})`` around ``center``, truncated at half a cell."""
    h = 0.5 * min(spec.dx, spec.dy ** 0.5)
    return field_from_fn(spec, lambda x, y: np.log(np.maximum(
        np.abs(x - center[0]) + np.abs(y - center[1]) ** 0.5, h)))


def section5_sum(spec: GridSpec) -> ScalarField2D:
    """``sign(x) + (log|y|)^2``; in slice BMO but not planar BMO."""
    t = 0.5 * spec.dy
    return field_from_fn(spec, lambda x, y: np.sign(x) + np.log(np.maximum(np.abs(y), t)) ** 2)


def section5_product(spec: GridSpec) -> ScalarField2D:
    """``cos(2 pi x) log(1 + log(1/|y|))``; planar BMO but unbounded slice BMO."""
    t = 0.5 * spec.dy
    return field_from_fn(spec, lambda x, y: np.cos(2 * np.pi * x)
                         * np.log1p(np.log(1.0 / np.maximum(np.abs(y), t))))


def centered_spec(n: int) -> GridSpec:
    """Cell-centred ``n x n`` grid on ``[-1/2, 1/2)^2``."""
    return GridSpec.cell_centered(n, n, 1.0, 1.0, corner=(-0.5, -0.5))


PRESETS = {
    "smooth-random": "band-limited Gaussian field normalized to family-BMO 1",
    "two-level": "piecewise constant across a flow pair (Q, R)",
    "log-parabolic": "log of the parabolic quasi-norm",
    "section5-sum": "sign(x) + (log|y|)^2",
    "section5-product": "cos(2 pi x) log(1 + log(1/|y|))",
}


def make_preset(name: str, spec: GridSpec, rng=None, **params) -> ScalarField2D:
    if name not in PRESETS:
        raise PresetError(f"unknown preset {name!r}; valid: {', '.join(sorted(PRESETS))}")
    if name == "smooth-random":
        return smooth_random(spec, rng if rng is not None else np.random.default_rng(0), **params)
    if name == "two-level":
        return two_level(spec, **params)
    if name == "log-parabolic":
        return log_parabolic(spec, **params)
    if name == "section5-sum":
        return section5_sum(spec)
    return section5_product(spec)
