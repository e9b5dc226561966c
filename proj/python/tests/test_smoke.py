import math

import pytest

import pchaos


def test_version_matches_package():
    assert pchaos.__version__ == "0.3.0"


def test_block_norms_exact():
    for n in (1, 10, 50):
        d = pchaos.block_norms(n)
        assert d["norm2_doubled"] == pytest.approx(1.0, abs=1e-12)
        assert d["n11"] == pytest.approx(1 / (4 * n), abs=1e-12)
        assert d["n21"] == pytest.approx(1 / (4 * n), abs=1e-12)
        assert abs(d["fourth_moment_identity"] - d["fourth_moment_identity_from_orders"]) < 1e-9


def charlier(u, x, n):
    counts = [0] * n
    for xi in x:
        counts[int(math.floor(xi))] += 1
    return sum((c - 1) ** 2 - (c - 1) - 1 for c in counts) / math.sqrt(2 * n)


def test_block_integral_matches_block_counts():
    n = 8
    for seed in range(20):
        u, x = pchaos.sample_pattern([1.0], t_lo=0.0, t_hi=float(n), seed=seed)
        assert all(ui == 1.0 for ui in u)
        assert pchaos.block_I2(n, u, x) == pytest.approx(charlier(u, x, n), rel=1e-12, abs=1e-12)


def test_sampling_is_reproducible():
    a = pchaos.sample_pattern([1.0, -1.0], t_hi=50.0, seed=9)
    b = pchaos.sample_pattern([1.0, -1.0], t_hi=50.0, seed=9)
    assert a == b
    assert set(a[0]) <= {1.0, -1.0}
    assert all(0.0 <= xi < 50.0 for xi in a[1])


def test_ou_linear_variance_limit():
    assert pchaos.ou_linear_variance(1.0, 800.0) == pytest.approx(2.0, rel=2e-3)
    assert pchaos.ou_linear_variance(2.0, 800.0) == pytest.approx(1.0, rel=2e-3)


def test_thm8_constants():
    k = pchaos.thm8_constants(1.0)
    assert k["c2"] == pytest.approx(44 / 3)
    assert k["c1_stated"] == pytest.approx(140 / 3)
    assert k["c1"] == pytest.approx(332 / 3)


def test_criterion_verdicts():
    assert "block" in pchaos.criterion_families()
    verdict, report = pchaos.criterion("block")
    assert verdict == "PASS"
    assert report["family"] == "block"
    assert pchaos.criterion("fixed")[0] == "FAIL"
    with pytest.raises(ValueError):
        pchaos.criterion("no-such-family")


def test_block_experiment_report():
    r = pchaos.run_block(10, reps=2000, seed=3)
    stat = r["reports"][0]
    assert stat["replications"] == 2000
    assert stat["mean"] == pytest.approx(0.0, abs=5 * stat["mean_se"])
    assert stat["variance"] == pytest.approx(1.0, abs=5 * stat["variance_se"])
    assert r["info"]["exact_fourth_moment"] == pytest.approx(8.0)


def test_experiments_ignore_worker_count():
    a = pchaos.run_ou(4, 1.0, 50.0, reps=300, seed=5, workers=1)
    b = pchaos.run_ou(4, 1.0, 50.0, reps=300, seed=5, workers=3)
    assert a == b


def test_hazard_interior_case():
    r = pchaos.run_hazard(7, T=100.0, reps=500, case=1, seed=2)
    stat = r["reports"][0]
    assert stat["variance"] == pytest.approx(4.0, abs=5 * stat["variance_se"])


def test_bad_arguments_raise():
    with pytest.raises(ValueError):
        pchaos.run_ou(3, 1.0, 10.0, reps=200)
    with pytest.raises(ValueError):
        pchaos.block_I2(2, [1.0], [])
