import json

import numpy as np
import pytest

from paracomm import curves as C
from paracomm import oscillation as O
from paracomm import symbols as S
from paracomm.cubes import centered_family, enumerate_family
from paracomm.experiments import adjacent_instance
from paracomm.grid import GridSpec, Rect, ScalarField2D, constant, field_from_fn


@pytest.fixture(scope="module")
def torus():
    spec = GridSpec.cell_centered(64, 64, 1.0, 0.25)
    fam = enumerate_family(Rect(0, 0, 1, 0.25), 2, 3)
    return spec, fam


def test_bmo_of_constant_is_zero(torus):
    spec, fam = torus
    assert O.bmo_norm(constant(spec, 2.0), fam).value == 0.0


def test_bmo_of_balanced_sign():
    spec = S.centered_spec(64)
    b = field_from_fn(spec, lambda x, y: np.sign(x) + 0 * y)
    fam = centered_family((0.0, 0.0), 1, 3)
    assert O.bmo_norm(b, fam).value == pytest.approx(1.0, abs=1e-12)


def test_bmo_affine_covariance(torus):
    spec, fam = torus
    b = S.band_limited(spec, np.random.default_rng(0))
    base = O.bmo_norm(b, fam).value
    assert O.bmo_norm(b * -3.0 + 7.0, fam).value == pytest.approx(3 * base, abs=1e-12)


def test_report_exports(torus):
    spec, fam = torus
    rep = O.bmo_norm(S.band_limited(spec, np.random.default_rng(1)), fam)
    assert rep.value >= 0 and len(rep.per_scale) == 2
    assert rep.to_csv().splitlines()[0] == "scale,corner_x,corner_y,ell,oscillation"
    doc = json.loads(rep.to_json())
    assert doc["schema_version"] == 1 and doc["family_relative"] is True


def test_slice_sum_ignores_row_constants():
    spec = S.centered_spec(64)
    g = lambda x: np.where(x < 0.1, -1.0, 2.0)  # noqa: E731
    iv = O.dyadic_intervals(-0.5, 0.5, 0, 3)
    b1 = field_from_fn(spec, lambda x, y: g(x) + 0 * y)
    b2 = field_from_fn(spec, lambda x, y: g(x) + np.log(np.abs(y)))
    assert O.slice_bmo_inf(b2, iv) == pytest.approx(O.slice_bmo_inf(b1, iv), abs=1e-12)


def test_slice_product_scales_with_sup():
    spec = S.centered_spec(64)
    iv = O.dyadic_intervals(-0.5, 0.5, 0, 3)
    psi = lambda y: 1 + np.cos(3 * y)  # noqa: E731
    b1 = field_from_fn(spec, lambda x, y: np.cos(2 * np.pi * x) + 0 * y)
    b2 = field_from_fn(spec, lambda x, y: np.cos(2 * np.pi * x) * psi(y))
    _, y = spec.axes()
    want = np.abs(psi(y)).max() * O.slice_bmo_inf(b1, iv)
    assert O.slice_bmo_inf(b2, iv) == pytest.approx(want, rel=1e-12)
    assert O.slice_bmo_inf(constant(spec, 1.0), iv) == 0.0


def test_testing_norm_constant(torus):
    spec, fam = torus
    assert O.testing_norm(constant(spec, -2.0), fam, C.parabola()).value < 1e-12


def test_testing_norm_homogeneous(torus):
    spec, fam = torus
    b = S.band_limited(spec, np.random.default_rng(2))
    base = O.testing_norm(b, fam, C.parabola()).value
    assert O.testing_norm(b * 2.0 - 1.0, fam, C.parabola()).value == pytest.approx(2 * base,
                                                                                   rel=1e-10)


def test_testing_norm_cache_matches_uncached(torus):
    spec, fam = torus
    b = S.band_limited(spec, np.random.default_rng(4))
    cube = fam.at_scale(1)[5]
    fresh = O.testing_deviation(b, cube, C.parabola())
    cached = O.testing_norm(b, fam, C.parabola())
    assert any(q == cube and v == pytest.approx(fresh, abs=1e-12) for _, q, v in cached.rows)


def test_simple_symbol_single_cube_deviation():
    spec = GridSpec.cell_centered(64, 256)
    b, q, r, sub, jump = adjacent_instance(0, spec)
    assert O.testing_deviation(b, sub, C.parabola()) == pytest.approx(jump, abs=1e-12)


def test_testing_bounded_by_bmo_on_random_suite(torus):
    spec, fam = torus
    rng = np.random.default_rng(5)
    ratios = []
    for _ in range(6):
        b = S.smooth_random(spec, rng, fam=fam)
        ratios.append(O.testing_norm(b, fam, C.parabola()).value / O.bmo_norm(b, fam).value)
    K = max(ratios)
    assert np.isfinite(K) and K > 0


def test_testing_norm_in_the_plane():
    spec = GridSpec.cell_centered(16)
    fam = enumerate_family(Rect(0, 0, 1, 1), 1, 1)
    b = ScalarField2D(spec, np.zeros(spec.shape))
    assert O.testing_norm(b, fam, C.parabola(), periodic=False).value == 0.0
