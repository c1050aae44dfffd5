import json
import math

import numpy as np
import pytest

import cvmet


def test_version():
    assert cvmet.__version__ == "0.1.0"


def test_switch_linear_qfi():
    n, t1 = 4, 0.1
    for method in ("generator_exact", "finite_difference", "asymptotic"):
        est = cvmet.qfi(strategy="switch", theta1=t1, theta2=0.1, n_queries=n, method=method)
        expected = t1**2 * n**4 + 2 * n**2
        assert est["value"] == pytest.approx(expected, rel=1e-6)


def test_state_is_normalized():
    psi = cvmet.strategy_state(strategy="cs", theta1=0.05, theta2=0.05, n_queries=2, m=2, dim=96)
    assert psi.shape == (192,)
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)


def test_expansion_terms_exact():
    terms = cvmet.expansion_terms(2, "AB")
    assert (2, 1, "0", "-1") in terms
    assert (3, 0, "-1/3", "0") in terms
    with pytest.raises(cvmet.ValidationError):
        cvmet.expansion_terms(2, "CA")


def test_factorization_and_envelope():
    residual, mass = cvmet.verify_factorization(1, 0.2, dim=64)
    assert residual < 1e-9
    assert mass < 1e-12
    with pytest.raises(cvmet.EnvelopeViolation):
        cvmet.verify_factorization(3, 0.3, dim=128)


def test_ratio_formula():
    assert cvmet.ratio_formula(1) == 0.25
    assert cvmet.ratio_formula(3) == 0.125


def test_fit_scaling():
    pts = [(n, 5.0 * n**-2) for n in (2.0, 4.0, 8.0, 16.0)]
    fit = cvmet.fit_scaling(pts)
    assert fit["slope"] == pytest.approx(-2.0, abs=1e-12)
    assert fit["power_law_ok"]


def test_homodyne():
    h = cvmet.homodyne_g_variance(n_steps=6)
    assert h["delta2_g"] > 0
    assert h["second_x"] == pytest.approx(1.0, abs=1e-12)


def test_run_matches_csv():
    out = cvmet.run("qfi", ["strategy.n_queries=2"])
    assert out["status"] == 0
    assert out["rows"][0]["F"] == pytest.approx(8 * 4 * (2 * 4 * 0.01 + 1))
    assert out["csv"].startswith("# cvmet 0.1.0\n")
    assert json.loads(cvmet.default_config())["command"] == "qfi"


def test_validation_errors_map():
    with pytest.raises(cvmet.ValidationError):
        cvmet.run("sweep", ["sweep.values=[]"])
    with pytest.raises(cvmet.UnsupportedConfiguration):
        cvmet.qfi(m=2, parameter="theta1")
    assert issubclass(cvmet.EnvelopeViolation, cvmet.NonConvergence)
    assert not math.isnan(cvmet.qfi()["value"])
