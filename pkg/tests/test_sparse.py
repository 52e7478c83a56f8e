import math

import numpy as np
import pytest

from paracomm import commutator as K
from paracomm import curves as C
from paracomm import grid as G
from paracomm import sparse as SP
from paracomm import transforms as TR
from paracomm.cubes import AnisoCube, SparseCollection, cube_mask, enumerate_family, verify_sparsity


@pytest.fixture(scope="module")
def spec():
    return G.GridSpec.cell_centered(32)


def single(spec, q):
    return SparseCollection(spec, (q,), (cube_mask(spec, q),), 0.5)


def test_form_on_single_cube_of_ones(spec):
    q = AnisoCube((0.25, 0.25), 0.5)
    one = G.constant(spec, 1.0)
    assert SP.sparse_form(single(spec, q), one, one) == pytest.approx(q.measure, rel=1e-12)
    assert SP.sparse_form(single(spec, q), G.zeros(spec), one) == 0.0


def test_form_homogeneous_and_monotone_in_r(spec):
    rng = np.random.default_rng(0)
    f, g = (G.ScalarField2D(spec, rng.standard_normal(spec.shape)) for _ in range(2))
    S = SP.generate_sparse_family(enumerate_family(G.Rect(0, 0, 1, 1), 0, 2), 0.5, spec=spec)
    base = SP.sparse_form(S, f, g)
    assert SP.sparse_form(S, f * 2.0, g * -3.0) == pytest.approx(6 * base, rel=1e-12)
    vals = [SP.sparse_form(S, f, g, r, 1.5) for r in (1.0, 1.5, 2.0, 4.0)]
    assert all(y >= x * (1 - 1e-12) for x, y in zip(vals, vals[1:]))
    with pytest.raises(SP.SparseError):
        SP.sparse_form(S, f, g, 0.5, 1.0)


def test_single_scale_family_keeps_everything(spec):
    fam = enumerate_family(G.Rect(0, 0, 1, 1), 1, 1)
    S = SP.generate_sparse_family(fam, 0.5, spec=spec)
    assert len(S) == len(fam) == 8
    assert all(m.sum() == cube_mask(spec, q).sum() for q, m in zip(S.cubes, S.masks))


@pytest.mark.parametrize("delta,scales", [(0.5, {0, 1}), (0.9, {0})])
def test_nested_generation(spec, delta, scales):
    fam = enumerate_family(G.Rect(0, 0, 1, 1), 0, 1)
    S = SP.generate_sparse_family(fam, delta, seed=3, spec=spec)
    assert {round(-math.log2(q.ell)) for q in S.cubes} == scales
    rep = verify_sparsity(S)
    assert rep.ok and rep.worst_ratio >= delta - 1e-12


def test_generation_is_seeded(spec):
    fam = enumerate_family(G.Rect(0, 0, 1, 1), 0, 2)
    a = SP.generate_sparse_family(fam, 0.5, seed=1, spec=spec)
    b = SP.generate_sparse_family(fam, 0.5, seed=1, spec=spec)
    assert all(np.array_equal(x, y) for x, y in zip(a.masks, b.masks))
    assert verify_sparsity(a).ok


def test_generation_errors(spec):
    fam = enumerate_family(G.Rect(0, 0, 1, 1), 0, 1)
    with pytest.raises(SP.SparseError):
        SP.generate_sparse_family(fam, 1.0, spec=spec)
    with pytest.raises(SP.SparseError):
        SP.generate_sparse_family(fam, 0.5)


def test_triangle_membership():
    assert SP.in_triangle((0.5, 0.1))
    assert not SP.in_triangle((0.5, 0.4))
    edge = (10 / 11, 1 / 11)  # on the edge from (1, 0) to (2/3, 1/3)
    assert not SP.in_triangle(edge) and SP.in_triangle(edge, strict=False)
    assert SP.in_triangle((0.7, 0.5), SP.TRIANGLE_ALT) and not SP.in_triangle((0.7, 0.5))
    assert SP.exponent_point(2.0, 2.0) == (0.5, 0.5)


def test_domination_ratio_zero_input(spec):
    T = K.fourier_handle(C.parabola(), spec)
    S = single(spec, AnisoCube((0.0, 0.0), 1.0))
    assert SP.domination_ratio(G.zeros(spec), G.constant(spec, 1.0), S, 1, 1, T) == 0.0


def test_domination_ratio_dilation_invariant():
    lam = 2.0
    rng = np.random.default_rng(4)
    base = G.GridSpec.cell_centered(32)
    f, g = SP.random_pair(base, rng)
    out = []
    for s, m0 in ((1.0, 0), (lam, -1)):
        spec = G.GridSpec.cell_centered(32, 32, s, s * s)
        q = TR.QuadratureSpec.default(base).scaled(s)
        T = K.fourier_handle(C.parabola(), spec, q)
        fam = enumerate_family(G.Rect(0, 0, s, s * s), m0, m0 + 2)
        S = SP.generate_sparse_family(fam, 0.5, seed=0, spec=spec)
        fs, gs = G.ScalarField2D(spec, f.values), G.ScalarField2D(spec, g.values)
        out.append(SP.domination_ratio(fs, gs, S, 1.5, 1.5, T))
    assert out[1] == pytest.approx(out[0], rel=0.05)


def test_random_pair_is_grid_independent():
    a = SP.random_pair(G.GridSpec.cell_centered(32), np.random.default_rng(5))
    b = SP.random_pair(G.GridSpec.cell_centered(64), np.random.default_rng(5))
    for x, y in zip(a, b):
        assert np.array_equal(x.values, y.values[::2, ::2])
    with pytest.raises(SP.SparseError):
        SP.random_pair(G.GridSpec.cell_centered(8), np.random.default_rng(0))


def test_ratio_csv():
    text = SP.ratio_study_csv([(1.5, 1.5, 32, 0.3, 0.1)])
    assert text.splitlines() == ["r,s,grid,max_ratio,median_ratio", "1.5,1.5,32,0.3,0.1"]
