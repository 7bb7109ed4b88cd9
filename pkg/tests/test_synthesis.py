import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from fourierpulse.records import Method
from fourierpulse.synthesis import (
    BasisSpec, IllConditionedError, TargetProfile, effective_profile, gram_matrix, gram_solve,
    hamiltonian_state_error, projection_vector, residual_functional, target_norm_sq,
)

THETA = np.pi / 2


def numeric_gram(basis):
    f = np.cos if basis.method is Method.FSM else np.sin
    g = basis.gammas
    return np.array([[quad(lambda e: f(a * e) * f(b * e), basis.lo, basis.hi, limit=200)[0] for b in g] for a in g])


@pytest.mark.parametrize("method", [Method.FSM, Method.DMOD])
@pytest.mark.parametrize("delta", [0.2, 0.5, 0.8])
def test_gram_matches_quadrature(method, delta):
    basis = BasisSpec(method, [0.86, 3.43, 6.44, 9.53], delta)
    np.testing.assert_allclose(gram_matrix(basis), numeric_gram(basis), atol=1e-12)


@pytest.mark.parametrize("method", [Method.FSM, Method.DMOD])
@pytest.mark.parametrize("kind", ["constant", "inverse"])
def test_projection_and_norm_match_quadrature(method, kind):
    basis = BasisSpec(method, [1.5, 4.6, 7.8], 0.5)
    target = getattr(TargetProfile, kind)(THETA)
    f = np.cos if method is Method.FSM else np.sin
    expected = [quad(lambda e: f(w * e) * target(e), 0.5, 1.5)[0] for w in basis.gammas]
    np.testing.assert_allclose(projection_vector(basis, target), expected, atol=1e-12)
    assert target_norm_sq(basis, target) == pytest.approx(quad(lambda e: target(e) ** 2, 0.5, 1.5)[0], abs=1e-12)


def test_custom_target_uses_quadrature_path():
    basis = BasisSpec(Method.DMOD, [1.5, 4.6], 0.5)
    custom = TargetProfile(lambda e: THETA * np.ones_like(e))
    np.testing.assert_allclose(
        projection_vector(basis, custom), projection_vector(basis, TargetProfile.constant(THETA)), atol=1e-12
    )


def test_residual_matches_direct_integral():
    basis = BasisSpec(Method.FSM, [0.86, 3.43], 0.5)
    alphas = gram_solve(basis)
    prof = effective_profile(basis, alphas)
    direct = np.sqrt(quad(lambda e: (prof(e) / e - THETA / e) ** 2, 0.5, 1.5)[0])
    assert residual_functional(basis) == pytest.approx(direct, rel=1e-8)


@given(st.lists(st.floats(0.3, 12.0), min_size=1, max_size=4, unique=True), st.sampled_from(list(Method)))
@settings(max_examples=60, deadline=None)
def test_least_squares_beats_perturbations(gammas, method):
    gammas = sorted(gammas)
    if len(gammas) > 1 and np.min(np.diff(gammas)) < 0.05:
        return
    basis = BasisSpec(method, gammas, 0.5)
    try:
        a = gram_solve(basis)
    except IllConditionedError:
        return
    best = residual_functional(basis, alphas=a)
    rng = np.random.default_rng(0)
    for _ in range(5):
        assert residual_functional(basis, alphas=a + rng.normal(0, 1e-2, a.size)) >= best - 1e-12


def test_condition_guard_names_pair():
    basis = BasisSpec(Method.DMOD, [1.0, 1.0 + 1e-7, 4.0], 0.5)
    with pytest.raises(IllConditionedError) as info:
        gram_solve(basis)
    assert info.value.pair == (0, 1)


def test_validation():
    with pytest.raises(ValueError):
        BasisSpec(Method.FSM, [2.0, 1.0])
    with pytest.raises(ValueError):
        BasisSpec(Method.FSM, [1.0], delta=1.0)
    with pytest.raises(ValueError):
        gram_solve(BasisSpec(Method.FSM, []))
    with pytest.raises(ValueError):
        effective_profile(BasisSpec(Method.FSM, [1.0]), [1.0, 2.0])
    with pytest.raises(ValueError):
        TargetProfile(lambda e: e, kind="weird")


def test_exact_single_term_target_is_recovered():
    # a single sine term approximating itself: target is alpha * sin(g eps)
    basis = BasisSpec(Method.DMOD, [np.pi / 2], 0.5)
    target = TargetProfile(lambda e: 0.3 * np.sin(np.pi / 2 * e))
    a = gram_solve(basis, target)
    assert a[0] == pytest.approx(0.3, abs=1e-10)
    assert residual_functional(basis, target) < 1e-7


def test_ideal_state_error_matches_quadrature():
    # state is (sin f, 0, cos f), so |state - x|^2 = 2 - 2 sin f
    basis = BasisSpec(Method.FSM, [0.86, 3.43], 0.5)
    a = gram_solve(basis)
    prof = effective_profile(basis, a)
    exact = np.sqrt(quad(lambda e: 2 - 2 * np.sin(prof(e)), 0.5, 1.5)[0])
    assert hamiltonian_state_error(basis, a, count=2001) == pytest.approx(exact, rel=1e-8)
