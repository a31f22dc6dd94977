import os
import pathlib

import numpy as np
import pytest

import compos

ROOT = pathlib.Path(__file__).resolve().parents[2]

SCENARIO = """
N = 400
D = 3
p = 1
seed = 11
true_B = 0.4, 0.6; 0.1, -0.2; -0.5, -0.4
covariates = normal(0, 1)
errors = lognormal
sigma_diag = 0.02, 0.03, 0.02
"""


def test_variance_identities():
    rng = np.random.default_rng(0)
    pi = rng.dirichlet(np.ones(4))
    a = rng.normal(size=(4, 2))
    phi = a @ a.T
    C = compos.centering_matrix(4)
    G = compos.multinomial_pinv(pi)
    V = compos.wedderburn_cov(pi, phi)
    np.testing.assert_allclose(G @ V @ G, C @ phi @ C, atol=1e-10)
    np.testing.assert_allclose(compos.stabilize(pi, V), C @ phi @ C, atol=1e-10)


def test_fit_recovers_simulated_coefficients():
    raw, x, truth = compos.simulate(SCENARIO)
    assert raw.shape == (400, 3) and x.shape == (400, 1)
    res = compos.fit(raw, x, method="both")
    assert res["converged"]
    assert res["crosscheck_difference"] < 1e-8
    centered = truth - truth.mean(axis=0)
    assert np.max(np.abs(res["coefficients"] - centered)) < 5 * np.max(res["se_model"])
    assert res["se_model"].shape == (3, 2)
    score = compos.quasi_score(res["coefficients"], raw, x)
    assert np.max(np.abs(score)) < 1e-6


def test_intercept_only_is_the_mean():
    raw = np.array([[1.0, 0.0, 3.0], [2.0, 2.0, 1.0], [0.5, 1.0, 0.5]])
    res = compos.fit(raw)
    p = raw / raw.sum(axis=1, keepdims=True)
    np.testing.assert_allclose(res["fitted"][0], p.mean(axis=0), atol=1e-10)


def test_zeros_and_errors():
    raw = np.array([[1.0, 0.0, 3.0], [2.0, 2.0, 1.0], [0.5, 1.0, 0.5], [1.0, 1.0, 1.0]])
    with pytest.raises(compos.CompositionError, match="zeros_unsupported"):
        compos.fit_logratio(raw)
    with pytest.raises(compos.CompositionError, match="zeros_unsupported"):
        compos.distances(raw, kind="aitchison")
    assert np.isfinite(compos.distances(raw, kind="identity")).all()
    assert compos.fit_logratio(raw, zero_adjust=1e-3)["coefficients"].shape == (2, 1)
    with pytest.raises(compos.CompositionError, match="contract_violation"):
        compos.wedderburn_cov(np.array([0.5, 0.5]), np.array([[1.0, 0.0], [0.0, -1.0]]))


def test_lake_data():
    d = compos.read_csv(str(ROOT / "data" / "arctic_lake.csv"), ["sand", "silt", "clay"], ["depth"], ["depth"])
    assert d["covariate_names"] == ["log(depth)"]
    res = compos.fit(d["raw"], d["covariates"])
    assert res["converged"]
    ratio = compos.fit_logratio(d["raw"], d["covariates"])
    assert ratio["logit_coefficients"].shape == (3, 2)


def test_null_correlation():
    C = compos.centering_matrix(4)
    S = C @ np.diag([1.0, 2.0, 3.0, 4.0]) @ C
    out = compos.null_correlation(S)
    assert out["structure_residual"] < 1e-10
    np.testing.assert_allclose(out["variances"], [1, 2, 3, 4], atol=1e-10)
    assert out["bootstrap_p"] is None
