import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from fourierpulse.estimator import PulseDesigner
from fourierpulse.notation import serialize_program


def test_default_fit_reproduces_heuristic_design():
    est = PulseDesigner(method="dmod", n_terms=2).fit()
    np.testing.assert_allclose(est.gammas_, [90.0, 270.0])
    np.testing.assert_allclose(est.alphas_, [105.5, 16.7], atol=0.1)
    assert serialize_program(est.program_).startswith("[(90.0)_0(180.0)_{175.6}(90.0)_0]^{×12}")
    eps = np.linspace(0.5, 1.5, 11)[:, None]
    assert est.transform(eps).shape == (11, 2)
    assert np.max(np.abs(est.predict(eps) - np.pi / 2)) < 0.1


def test_fit_on_sampled_profile_matches_builtin_target():
    eps = np.linspace(0.5, 1.5, 401)
    fsm = PulseDesigner(method="fsm", n_terms=2).fit(eps[:, None], np.full_like(eps, np.pi / 2))
    builtin = PulseDesigner(method="fsm", n_terms=2).fit()
    np.testing.assert_allclose(fsm.alphas_, builtin.alphas_, rtol=1e-6)
    assert fsm.score(eps[:, None], np.full_like(eps, np.pi / 2) + 0.01 * np.sin(6 * eps)) < 1.0


def test_params_and_clone():
    est = PulseDesigner(method="fsm", n_terms=3, selection="greedy")
    assert est.get_params()["n_terms"] == 3
    cloned = clone(est.set_params(n_terms=4))
    assert cloned.n_terms == 4 and not hasattr(cloned, "design_")


def test_errors():
    with pytest.raises(NotFittedError):
        PulseDesigner().predict([[1.0]])
    with pytest.raises(ValueError):
        PulseDesigner(n_terms=0).fit()
    with pytest.raises(ValueError):
        PulseDesigner(method="nope").fit()
    with pytest.raises(ValueError):
        PulseDesigner().fit([[1.0], [1.1]])
    est = PulseDesigner().fit([[0.9], [1.1]], [1.5, 1.5])
    with pytest.raises(ValueError):
        est.predict([[1.0, 2.0]])
