import json

import numpy as np
import pytest

from paracomm import cli
from paracomm import experiments as E
from paracomm import symbols as S
from paracomm.cubes import AnisoCube
from paracomm.grid import GridSpec
from paracomm.oscillation import bmo_norm


@pytest.fixture(scope="module")
def spec():
    return GridSpec.cell_centered(32)


def test_smooth_random_is_normalized(spec):
    fam = S.default_family(spec)
    b = S.make_preset("smooth-random", spec, np.random.default_rng(0))
    assert bmo_norm(b, fam).value == pytest.approx(1.0, rel=1e-12)


def test_band_limited_is_max_normalized(spec):
    b = S.band_limited(spec, np.random.default_rng(1))
    assert b.max_abs() == pytest.approx(1.0)
    spectrum = np.abs(np.fft.fft2(b.values))
    assert spectrum[spec.nx // 2, :].max() < 1e-10 * spectrum.max()


def test_two_level_values(spec):
    Q, R = AnisoCube((0.0, 0.0), 0.5), AnisoCube((0.5, 0.5), 0.5)
    b = S.make_preset("two-level", spec, Q=Q, R=R, low=-1.0, high=2.0)
    assert set(np.unique(b.values)) == {-1.0, 2.0}
    assert (b.values == 2.0).sum() == 16 * 8


def test_deterministic_presets(spec):
    for name in ["log-parabolic", "section5-sum", "section5-product"]:
        a = S.make_preset(name, spec)
        assert np.all(np.isfinite(a.values))
        assert np.array_equal(a.values, S.make_preset(name, spec).values)


def test_unknown_preset(spec):
    with pytest.raises(S.PresetError, match="valid"):
        S.make_preset("nope", spec)


def test_run_rejects_unknown_names():
    with pytest.raises(E.ConfigError, match="valid"):
        E.run({"experiment": "nope"})
    with pytest.raises(E.ConfigError, match="preset"):
        E.run({"experiment": "cauchy-check", "symbol": {"preset": "nope"}})


def test_list_command(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    assert "chain" in out and "smooth-random" in out


def test_run_is_deterministic(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "adjacent-cubes", "count": 2}))
    outs = []
    for k in range(2):
        d = tmp_path / f"out{k}"
        assert cli.main(["run", "--config", str(cfg), "--out", str(d)]) == 0
        outs.append(d)
    for name in ["adjacent-cubes_adjacent.csv", "adjacent-cubes_summary.json"]:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    doc = json.loads((outs[0] / "adjacent-cubes_summary.json").read_text())
    assert doc["schema_version"] == 1 and doc["flags"] == {"adjacent-bound": True}


def test_exit_codes(tmp_path, monkeypatch, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["run", "--config", str(bad)]) == 2
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"experiment": "nope"}))
    assert cli.main(["run", "--config", str(unknown)]) == 2

    def failing(cfg):
        rep = E.ExperimentReport("failing", cfg)
        rep.flags["always"] = False
        return rep

    monkeypatch.setitem(E.EXPERIMENTS, "failing", failing)
    cfg = tmp_path / "fail.json"
    cfg.write_text(json.dumps({"experiment": "failing"}))
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "[FAIL] always" in capsys.readouterr().out


def test_seed_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "adjacent-cubes", "count": 1}))
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path), "--seed", "4"]) == 0
    doc = json.loads((tmp_path / "adjacent-cubes_summary.json").read_text())
    assert doc["config"]["seed"] == 4


def test_symbol_search_reports_ratios():
    rep = E.run({"experiment": "symbol-search", "cutoffs": [4], "per_cutoff": 1})
    assert rep.passed
    assert 0 < rep.results["min_ratio"] <= rep.results["max_ratio"]
    assert len(rep.tables["search"].splitlines()) == 3


def test_weights_sigma_sweep():
    rep = E.run({"experiment": "weights", "count": 1, "lambda_points": 3,
                 "sigmas": [0.01, 0.5], "power_iters": 20})
    worst = dict(map(tuple, rep.results["rh_worst_by_sigma"]))
    assert worst[0.01] <= worst[0.5]
    assert rep.results["rh_sigma_threshold"] in (0.0, 0.01, 0.5)
