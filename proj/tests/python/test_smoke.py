import math
import os
import tempfile

import numpy as np
import pytest

import ptolearn


def test_rate_exponents():
    exponent, log = ptolearn.ee_rate_optimal(ptolearn.RateSpec(alpha=1, alpha_prime=1, s=1, p=1.5))
    assert exponent == pytest.approx(0.8) and not log
    exponent, log = ptolearn.ee_rate_optimal(ptolearn.RateSpec(alpha=1, alpha_prime=1.5, s=1))
    assert exponent == pytest.approx(1.0) and log
    exponent, _ = ptolearn.ff_rate_powerlaw(ptolearn.RateSpec(alpha=1, alpha_prime=1, beta=0, r=-0.25))
    assert exponent == pytest.approx(2.5 / 3)
    with pytest.raises(ValueError):
        ptolearn.ee_rate_optimal(ptolearn.RateSpec(alpha=0.6, s=0.1))


def test_crossing_table():
    table = ptolearn.compare_exponents(1.0, [-0.5, 1.0])
    assert table["r0"] == pytest.approx(-1.5)
    r, ee, ff, admissible = table["rows"][0]
    assert abs(ee - 2 / 3) < 1e-12 and abs(ff - 2 / 3) < 1e-12 and admissible
    assert ptolearn.rho_ff(1.0, 1.0) == 1.0 > ptolearn.rho_ee(1.0, 1.0)


def test_posterior_mean_matches_numpy():
    j, n, gamma = 12, 30, 0.4
    u = ptolearn.sample_inputs(1.0, n, j, seed=3)
    assert u.shape == (n, j)
    prior = ptolearn.spectrum(1.5, j)
    y = np.random.default_rng(0).normal(size=n)
    mean = ptolearn.e2e_posterior_mean(u, y, prior, gamma)
    lam = np.diag(prior)
    expected = lam @ u.T @ np.linalg.solve(u @ lam @ u.T + gamma**2 * np.eye(n), y)
    np.testing.assert_allclose(mean, expected, rtol=1e-10, atol=1e-12)


def test_risks_decompose():
    j = 16
    u = ptolearn.sample_inputs(1.0, 20, j, seed=1)
    truth = np.arange(1, j + 1) ** -1.6
    risk = ptolearn.e2e_risk(truth, u, 1.0, ptolearn.spectrum(1.5, j), ptolearn.spectrum(1.0, j))
    assert risk["total"] == pytest.approx(risk["bias"] + risk["variance"], rel=1e-12)
    q = ptolearn.qoi_coefficients("synthetic", j, r=0.5)
    ff = ptolearn.ff_risk(truth, q, u, ptolearn.spectrum(1.0, j), ptolearn.spectrum(1.0, j))
    assert ff["total"] > 0


def test_qoi_catalog():
    q = ptolearn.qoi_coefficients("mean_on_interval", 8)
    assert abs(q[0] ** 2 - 8 / math.pi**2) < 1e-12
    assert abs(ptolearn.fitted_qoi_decay("derivative_point_evaluation", 1 << 12, x0=0.3) + 1.5) < 0.15
    with pytest.raises(ValueError):
        ptolearn.qoi_coefficients("nonsense", 8)


def test_lemmas():
    checks = ptolearn.verify_lemmas(1)
    assert len(checks) == 7 and all(passed for _, _, passed in checks)


def test_small_sweep_and_reproducibility():
    config = {"kind": "ee", "nGrid": [16, 32, 64, 128, 256], "truncation": 128, "trials": 3, "seed": 5}
    a = ptolearn.run_sweep(config)
    b = ptolearn.run_sweep(config)
    assert a["csv"] == b["csv"]
    assert a["csv"].startswith("experiment,N,trial,risk,slope,slopeStdErr,theoryExponent,logFlag")
    assert a["slope"] < 0
    with pytest.raises(ValueError):
        ptolearn.run_sweep({"kind": "ee", "nGrid": [32, 16], "seed": 1})


def test_fnm_model_roundtrip():
    model = ptolearn.fnm_model({"variant": "F2V", "inputDim": 1, "outputDim": 2, "width": 4, "modes": 3}, seed=2)
    x = np.sin(2 * np.pi * np.arange(32) / 32)[:, None]
    y = model.forward(x)
    assert y.shape == (1, 2)
    history = model.fit([x, 2 * x], [np.zeros((1, 2)), np.ones((1, 2))], learning_rate=1e-2, epochs=5, batch_size=2)
    assert len(history) == 5
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "m.ckpt")
        model.save(path)
        again = ptolearn.FnmModel.load(path)
        np.testing.assert_array_equal(again.forward(x), model.forward(x))
