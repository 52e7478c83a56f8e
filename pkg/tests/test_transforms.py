import math

import numpy as np
import pytest

from paracomm import curves as C
from paracomm import grid as G
from paracomm import symbols as S
from paracomm import transforms as TR

ODD_CUBIC = C.monomial((1, 3), (1, 1), (-1, -1))


@pytest.fixture(scope="module")
def spec64():
    return G.GridSpec.cell_centered(64)


@pytest.fixture(scope="module")
def pair64(spec64):
    rng = np.random.default_rng(3)
    return S.band_limited(spec64, rng), S.band_limited(spec64, rng)


def test_hilbert_1d_on_cosine():
    x = np.arange(256) / 256
    out = TR.hilbert_1d(np.cos(2 * np.pi * x))
    assert np.abs(out - math.pi * np.sin(2 * np.pi * x)).max() < 1e-10


def test_hilbert_1d_constant_and_linearity():
    rng = np.random.default_rng(0)
    assert np.abs(TR.hilbert_1d(np.full(32, 2.5))).max() < 1e-12
    a, b = rng.standard_normal((2, 64))
    lhs = TR.hilbert_1d(2 * a - 3 * b)
    assert np.abs(lhs - 2 * TR.hilbert_1d(a) + 3 * TR.hilbert_1d(b)).max() < 1e-12


def test_quadrature_spec_validation():
    with pytest.raises(TR.TransformError):
        TR.QuadratureSpec(1.0, 0.5)
    with pytest.raises(TR.TransformError):
        TR.QuadratureSpec(0.1, 1.0, 4)
    t, w = TR.QuadratureSpec(1e-3, 1.0, 16).nodes()
    assert w.sum() == pytest.approx(math.log(1e3))
    assert t[0] == pytest.approx(1e-3) and t[-1] == pytest.approx(1.0)


@pytest.mark.parametrize("c", [C.parabola(), C.line(), C.monomial((1, 3))])
def test_constants_are_annihilated(spec64, c):
    f = G.constant(spec64, 4.0)
    q = TR.QuadratureSpec.default(spec64)
    assert TR.curved_hilbert_direct(f, c, q).max_abs() < 1e-12
    assert TR.curved_hilbert_fourier(f, TR.build_multiplier(c, spec64, q)).max_abs() < 1e-12


def test_line_direct_matches_rowwise_symbol():
    spec = G.GridSpec(4096, 4)
    f = G.field_from_fn(spec, lambda x, y: np.cos(2 * np.pi * x) + 0 * y)
    q = TR.QuadratureSpec.default(spec)
    d = TR.curved_hilbert_direct(f, C.line(), q)
    # oracle: the same truncated kernel applied row by row through its 1-D symbol
    k = 2 * np.pi * np.fft.fftfreq(spec.nx, spec.dx)
    t, w = q.nodes()
    sym = (w[None, :] * (-2j) * np.sin(np.outer(k, t))).sum(axis=1)
    ref = np.fft.ifft(sym[:, None] * np.fft.fft(f.values, axis=0), axis=0).real
    assert G.lp_norm(d - G.ScalarField2D(spec, ref)) / G.lp_norm(d) < 1e-6


def test_line_hilbert_rows():
    spec = G.GridSpec(32, 8)
    f = G.field_from_fn(spec, lambda x, y: np.sin(2 * np.pi * x) + 0 * y)
    out = TR.line_hilbert(f)
    assert np.allclose(out.values, out.values[:, :1])
    g = G.field_from_fn(spec, lambda x, y: np.cos(2 * np.pi * y) + 0 * x)
    assert TR.line_hilbert(g).max_abs() < 1e-12


def test_odd_curve_is_antisymmetric(spec64, pair64):
    f, g = pair64
    q = TR.QuadratureSpec.default(spec64)
    m = TR.build_multiplier(ODD_CUBIC, spec64, q)
    assert np.abs(m.values.real).max() < 1e-10
    lhs = G.inner_product(TR.curved_hilbert_fourier(f, m), g)
    rhs = G.inner_product(f, TR.curved_hilbert_fourier(g, m))
    assert abs(lhs + rhs) < 1e-10 * max(1.0, abs(lhs))
    d = TR.curved_hilbert_direct
    lhs = G.inner_product(d(f, ODD_CUBIC, q), g)
    assert abs(lhs + G.inner_product(f, d(g, ODD_CUBIC, q))) < 1e-8 * max(1.0, abs(lhs))


def test_parabola_adjoint_is_reflected_transform(spec64, pair64):
    f, g = pair64
    q = TR.QuadratureSpec.default(spec64)
    m = TR.build_multiplier(C.parabola(), spec64, q)
    mr = TR.build_multiplier(C.reflected(C.parabola()), spec64, q)
    lhs = G.inner_product(TR.curved_hilbert_fourier(f, m), g)
    rhs = -G.inner_product(f, TR.curved_hilbert_fourier(g, mr))
    assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))
    assert np.allclose(mr.values, -np.conj(m.values), atol=1e-10)


def test_parabola_symbol_real_part_closed_form():
    # Re m = -2 sum_k w_k sin(xi1 t_k) sin(xi2 t_k^2): the even second component breaks oddness
    spec = G.GridSpec(16, 16, 2 * np.pi, 2 * np.pi)
    q = TR.QuadratureSpec(0.05, 1.0, 16)
    m = TR.build_multiplier(C.parabola(), spec, q)
    xi1, xi2 = TR.frequencies(spec)
    t, w = q.nodes()
    re = -2 * np.einsum("k,ik,jk->ij", w, np.sin(np.outer(xi1, t)), np.sin(np.outer(xi2, t * t)))
    im = -2 * np.einsum("k,ik,jk->ij", w, np.sin(np.outer(xi1, t)), np.cos(np.outer(xi2, t * t)))
    # lattice lines through the Nyquist mode are symmetrized; compare the interior
    sl = (slice(1, 8), slice(1, 8))
    assert np.allclose(m.values.real[sl], re[sl], atol=1e-10)
    assert np.allclose(m.values.imag[sl], im[sl], atol=1e-10)


def test_multiplier_zero_axes():
    spec = G.GridSpec(32, 32, 2 * np.pi, 2 * np.pi)
    m = TR.build_multiplier(C.parabola(), spec, TR.QuadratureSpec(1e-3, 10.0, 16))
    assert m.values[0, 0] == 0
    assert np.abs(m.values[0, :]).max() < 1e-10


def test_multiplier_one_dimensional_limit():
    spec = G.GridSpec(32, 4, 2 * np.pi, 2 * np.pi)
    m = TR.build_multiplier(C.parabola(), spec, TR.QuadratureSpec(1e-4, 1e3, 1024))
    xi1, _ = TR.frequencies(spec)
    sel = (np.abs(xi1) >= 1) & (np.abs(xi1) <= 8)
    want = -1j * np.pi * np.sign(xi1[sel])
    assert np.abs(m.values[sel, 0] - want).max() / np.pi < 0.02


def test_multiplier_hermitian(spec64):
    m = TR.build_multiplier(C.parabola(), spec64, TR.QuadratureSpec.default(spec64)).values
    flip = np.roll(m[::-1, ::-1], (1, 1), axis=(0, 1))
    assert np.abs(m - np.conj(flip)).max() < 1e-12


def test_plancherel_bound(spec64, pair64):
    f, _ = pair64
    m = TR.build_multiplier(C.parabola(), spec64, TR.QuadratureSpec.default(spec64))
    assert G.lp_norm(TR.curved_hilbert_fourier(f, m)) <= m.max_abs * G.lp_norm(f) * (1 + 1e-12)


def test_routes_agree_on_band_limited_field():
    spec = G.GridSpec.cell_centered(128)
    f = S.band_limited(spec, np.random.default_rng(0))
    q = TR.QuadratureSpec.default(spec, 16)
    d = TR.curved_hilbert_direct(f, C.parabola(), q)
    r = TR.curved_hilbert_fourier(f, TR.build_multiplier(C.parabola(), spec, q))
    assert G.lp_norm(d - r) / G.lp_norm(r) < 1e-2


def test_dilation_covariance(spec64, pair64):
    f, _ = pair64
    q = TR.QuadratureSpec.default(spec64)
    lam = 2.0
    fs = G.ScalarField2D(spec64.scaled(lam, lam ** 2), f.values)
    a = TR.curved_hilbert_direct(f, C.parabola(), q)
    b = TR.curved_hilbert_direct(fs, C.parabola(), q.scaled(lam))
    assert np.abs(a.values - b.values).max() < 1e-10 * a.max_abs()


def test_wrap_contamination_rejected(spec64, pair64):
    with pytest.raises(TR.TransformError, match="wrap"):
        TR.curved_hilbert_direct(pair64[0], C.parabola(), TR.QuadratureSpec(0.01, 0.9))


def test_torsion_matches_monomial_path(pair64, spec64):
    f, _ = pair64
    nu = C.torsion_from_fn(lambda s: (s, s * s), [lambda s: (1.0, 2 * s), lambda s: (0.0, 2.0)])
    spec = G.GridSpec.cell_centered(64, 64, 4.0, 4.0)
    g = G.ScalarField2D(spec, f.values)
    q = TR.QuadratureSpec(spec.dx / 16, 1.0)
    a = TR.torsion_hilbert_truncated(g, nu, q)
    b = TR.curved_hilbert_direct(g, C.parabola(), q)
    assert np.abs(a.values - b.values).max() < 1e-8
    with pytest.raises(TR.TransformError):
        TR.torsion_hilbert_truncated(g, nu, TR.QuadratureSpec(0.01, 2.0))


def test_residue_guard(spec64, pair64):
    bad = TR.MultiplierTable(spec64, np.ones(spec64.shape) * 1j, "bad",
                             TR.QuadratureSpec.default(spec64))
    with pytest.raises(TR.TransformError, match="residue"):
        TR.curved_hilbert_fourier(pair64[0], bad)


def test_multiplier_serialization_and_cache(spec64):
    q = TR.QuadratureSpec.default(spec64)
    cache = TR.MultiplierCache()
    m = cache.get(C.parabola(), spec64, q)
    assert cache.get(C.parabola(), spec64, q) is m
    back = TR.MultiplierTable.from_bytes(m.to_bytes())
    assert back.spec == spec64 and back.quad == q
    assert np.array_equal(back.values, m.values)
    assert back.fingerprint() == m.fingerprint()
