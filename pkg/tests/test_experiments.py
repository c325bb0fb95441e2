import math

import numpy as np
import pytest

from mixlab.errors import ConfigError, TooFewPoints
from mixlab.experiments import (
    CSV_COLUMNS,
    SweepConfig,
    fit_exponent,
    fit_loglog,
    format_rows,
    kesten_depth_for,
    read_config,
    run_sweep,
    theorem_a_recipes,
)


def test_path_gamma_inverse():
    rows = run_sweep(SweepConfig("path", (8, 16, 32), "gamma_inverse"))
    for r in rows:
        n = r["n"]
        assert r["value"] == pytest.approx(2 * (n - 1) / (2 * (1 - math.cos(math.pi / n))), rel=1e-10)
    fit = fit_exponent(rows)
    assert 2.8 < fit.slope < 3.1


def test_complete_gamma_inverse():
    rows = run_sweep(SweepConfig("complete", (4, 8, 16), "gamma_inverse"))
    assert [r["value"] for r in rows] == pytest.approx([3, 7, 15], rel=1e-12)


@pytest.mark.parametrize("kw", [dict(family="blob"), dict(sizes=(8, 8)), dict(seeds=0), dict(quantity="nope")])
def test_bad_config(kw):
    args = dict(family="path", sizes=(4, 8), quantity="gamma_inverse")
    args.update(kw)
    with pytest.raises(ConfigError):
        SweepConfig(**args)


def test_row_errors_do_not_abort():
    rows = run_sweep(SweepConfig("path", (4, 12), "exact_tau"))
    assert rows[0]["error"] == "" and rows[0]["value"] == 11.0
    assert rows[1]["error"] == "BadParams" and math.isnan(rows[1]["value"])


def test_csv_schema_and_determinism():
    cfg = SweepConfig("uniform_labelled_tree", (10, 20, 40), "gamma_inverse", seeds=3, seed=5)
    a = format_rows(run_sweep(cfg), with_wall=False)
    b = format_rows(run_sweep(cfg, jobs=2), with_wall=False)
    assert a == b
    assert a.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(a.splitlines()) == 10
    other = format_rows(run_sweep(SweepConfig("uniform_labelled_tree", (10, 20, 40), "gamma_inverse",
                                              seeds=3, seed=6)), with_wall=False)
    assert other != a


@pytest.mark.parametrize("quantity", ["gap_upper_bound", "a_star", "prop_a", "wilson_time", "stick_count",
                                      "unmoved_fraction"])
def test_quantities_run(quantity):
    rows = run_sweep(SweepConfig("regular_tree", (2, 3), quantity, params={"r": 3}))
    assert all(r["error"] == "" and r["value"] >= 0 for r in rows)


def test_mc_curve_rows():
    rows = run_sweep(SweepConfig("path", (6,), "mc_tv_curve", params={"reps": 200, "t_factors": "0.5,1"}))
    assert [r["quantity"].split("@")[0] for r in rows] == ["mc_tv_curve"] * 2
    assert all(0 <= r["value"] <= 1 for r in rows)


def test_gap_upper_bound_dominates_gap():
    for fam, size in [("regular_tree", 4), ("kesten_iic", 12), ("uniform_labelled_tree", 50)]:
        ub = run_sweep(SweepConfig(fam, (size,), "gap_upper_bound"))[0]["value"]
        gi = run_sweep(SweepConfig(fam, (size,), "gamma_inverse"))[0]["value"]
        assert ub >= 1 / gi - 1e-12


def test_fit_examples(rng):
    xs = np.array([10, 20, 40, 80, 160.0])
    fit = fit_loglog(xs, xs**2)
    assert abs(fit.slope - 2) <= 1e-9 and fit.r2 == pytest.approx(1) and fit.points == 5
    noisy = xs**2.5 * (1 + 0.05 * rng.standard_normal(len(xs)))
    assert abs(fit_loglog(xs, noisy).slope - 2.5) <= 0.1
    assert fit_loglog(xs, np.full(5, 7.0)).slope == pytest.approx(0, abs=1e-12)
    with pytest.raises(TooFewPoints):
        fit_loglog([1, 2], [1, 2])


def test_fit_exponent_groups_and_scale():
    rows = [{"n": n, "value": n**1.5 * f, "error": ""} for n in (10, 20, 40) for f in (0.5, 2.0)]
    rows.append({"n": 80, "value": float("nan"), "error": "NoConvergence"})
    fit = fit_exponent(rows)
    assert fit.points == 3 and fit.slope == pytest.approx(1.5)
    scaled = [dict(r, value=r["value"] * 123.0) for r in rows]
    assert abs(fit_exponent(scaled).slope - fit.slope) <= 1e-12
    with pytest.raises(TooFewPoints):
        fit_exponent(rows[:4])


def test_read_config(tmp_path):
    f = tmp_path / "c.txt"
    f.write_text("# sweep\nfamily = regular_tree\nsizes=2,3,4\nquantity=gamma_inverse\nseeds=2\nr=4\n")
    cfg = read_config(f)
    assert cfg.sizes == (2, 3, 4) and cfg.seeds == 2 and cfg.params == {"r": 4}
    f.write_text("family=regular_tree\nquantity=gamma_inverse\n")
    with pytest.raises(ConfigError):
        read_config(f)
    f.write_text("family=regular_tree\nsizes 2\n")
    with pytest.raises(ConfigError, match="line 2"):
        read_config(f)


def test_presets():
    rec = theorem_a_recipes()
    assert sorted(rec) == list("abcdefg")
    rows = run_sweep(rec["g"][0])
    for r, d in zip(rows, range(3, 9)):
        assert abs(r["value"] - 2**d * d / 2) <= 1e-9
    fit = fit_exponent(run_sweep(rec["a"][0]), by="size")
    assert 1.8 <= fit.slope <= 2.2


def test_kesten_depth_for():
    for d in range(1, 60):
        n = d * d / 2 + 1.5 * d + 1
        assert kesten_depth_for(round(n)) == d


@pytest.mark.slow
def test_unmoved_census():
    cfg = SweepConfig("random_regular", (512,), "unmoved_fraction", seeds=50, params={"r": 3, "t_factor": 0.3})
    rows = run_sweep(cfg)
    assert all(r["value"] > 512**0.1 / 512 for r in rows)
