import math

import numpy as np
import pytest

import kpz_exactlab as kx


def test_png_void_probability():
    r = kx.joint_prob_png([(0.0, 1.0)], [0])
    assert abs(r["probability"] - math.exp(-2.0)) < 1e-6
    assert r["converged"]


def test_tasep_tail_is_monotone():
    probs = [kx.joint_prob_tasep([(1, 8)], [a], q=0.5)["probability"] for a in range(-4, 8)]
    assert all(b <= a + 1e-14 for a, b in zip(probs, probs[1:]))
    assert probs[0] == pytest.approx(1.0)


def test_finite_start_matches_brute_force():
    law = kx.brute_force_law([-2, -4], 1, 0.5)
    assert sum(law.values()) == pytest.approx(1.0, abs=1e-14)
    brute = sum(w for x, w in law.items() if x[0] >= -1 and x[1] >= -4)
    exact = kx.joint_prob_tasep([(1, 1), (2, 1)], [-1, -4], q=0.5, N=2)["probability"]
    assert abs(brute - exact) < 1e-9


def test_airy_kernel_equal_times():
    assert kx.K_airy1(0.3, 0.4, 0.3, -1.1) == pytest.approx(kx.airy_ai(-0.7), abs=1e-13)


def test_sampler_shape_and_determinism():
    a = kx.sample_tasep_points([(1, 4), (2, 4)], 256, 0.5, seed=3)
    b = kx.sample_tasep_points([(1, 4), (2, 4)], 256, 0.5, seed=3, threads=2)
    assert a.shape == (2, 256)
    assert np.array_equal(a, b)
    assert np.all(a[0] > a[1])


def test_png_samples_match_exact():
    h = kx.sample_png_heights(0.0, 1.0, 20000, seed=5)
    emp = np.mean(h <= 1)
    exact = kx.joint_prob_png([(0.0, 1.0)], [1])["probability"]
    assert abs(emp - exact) < 4 * math.sqrt(exact * (1 - exact) / h.size)


def test_scaling_coefficients_at_quarter():
    s = kx.scaling_coeffs(0.25)
    assert s["v"] == pytest.approx(0.5)


def test_run_exact_command(tmp_path):
    out = str(tmp_path / "png")
    res = kx.run({"command": "exact", "model": "png", "points": [{"x": 0, "t": 1, "cuts": [0, 1]}], "out": out})
    assert res["exit_code"] == 0
    lines = open(out + ".exact.csv").read().splitlines()
    assert lines[0] == "# kpz-exactlab v1"
    assert len(lines) == 4


def test_errors_are_raised():
    with pytest.raises(kx.KpzError, match="q must"):
        kx.run({"command": "exact", "q": 2.0, "points": [{"n": 1, "t": 1, "cuts": [0]}]})
    with pytest.raises(kx.KpzError):
        kx.joint_prob_tasep([(2, 5), (1, 5)], [0, 0], q=0.5)
