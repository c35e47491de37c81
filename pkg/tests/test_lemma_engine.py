import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bounds import BoundInputs, theorem1_average
from geometry import inertia_floor
from lemma_engine import (
    FProfileInputs,
    LemmaInputs,
    RadialProfile,
    base_case_rhs,
    f_profile,
    f_profile_derivative,
    f_profile_scan,
    fuzz_lemma1,
    lemma1_rhs,
    moment_integrals,
    physical_eta,
    sample_admissible_profile,
)


def tent():
    return RadialProfile(np.array([0.0, 1.0]), np.array([1.0, 0.0]), eta=1.0)


@pytest.mark.parametrize("q", [0, 1, 2.5, 7])
def test_moments_are_exact_on_linear_pieces(q):
    assert tent().moment(q) == pytest.approx(1.0 / ((q + 1) * (q + 2)), rel=1e-13)


def test_moment_integrals_pair():
    A, A_l = moment_integrals(tent(), b=2, l=1)
    assert A == pytest.approx(1 / 6)
    assert A_l == pytest.approx(1 / 20)
    with pytest.raises(ValueError):
        moment_integrals(tent(), b=0.5, l=1)


def test_profile_validation():
    with pytest.raises(ValueError):
        RadialProfile(np.array([0.0, 1.0]), np.array([0.5, 1.0]))
    with pytest.raises(ValueError):
        RadialProfile(np.array([0.1, 1.0]), np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        RadialProfile(np.array([0.0, 0.5]), np.array([1.0, 0.0]), eta=1.0)
    with pytest.raises(ValueError):
        RadialProfile(np.array([0.0, 1.0]), np.array([1.0, -0.1]))


def test_profile_evaluation_is_zero_beyond_support():
    profile = tent()
    assert profile(0.25) == pytest.approx(0.75)
    assert profile(3.0) == 0.0
    assert profile.support == 1.0
    assert profile.psi0 == 1.0


@pytest.mark.parametrize("b", [1.0, 1.5, 2.0, 3.0, 5.0])
def test_base_case_matches_general_formula(b):
    inputs = LemmaInputs(b, 1, 0.3, 1.2, 0.8)
    assert lemma1_rhs(inputs) == pytest.approx(base_case_rhs(b, 0.3, 1.2, 0.8), rel=1e-13)


def test_lemma_inputs_validation():
    with pytest.raises(ValueError):
        LemmaInputs(0.5, 1, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        LemmaInputs(1.0, 0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        LemmaInputs(1.0, 1, 1.0, 0.0, 1.0)


def test_tent_satisfies_the_moment_bound():
    profile = tent()
    for b in (1.0, 2.0, 3.0):
        for l in range(1, 5):
            A, A_l = moment_integrals(profile, b, l)
            assert A_l >= lemma1_rhs(LemmaInputs(b, l, A, profile.psi0, profile.eta))


@pytest.mark.parametrize("seed", range(20))
def test_sampled_profiles_are_admissible(seed):
    profile = sample_admissible_profile(seed, eta=1.0, psi0=1.0, support=2.0, pieces=6)
    assert profile.psi0 == 1.0
    assert profile.values[-1] == 0.0
    assert profile.support <= 2.0 + 1e-12
    assert np.all(profile.slopes <= 0)
    assert np.all(profile.slopes >= -1.0 * (1 + 1e-12))


def test_infeasible_sampler_parameters():
    with pytest.raises(ValueError, match="infeasible"):
        sample_admissible_profile(0, eta=0.1, psi0=1.0, support=2.0, pieces=3)


def test_fuzz_campaign_has_no_violations():
    summary = fuzz_lemma1(seeds=1000, b_grid=[1.0, 1.5, 2.0, 3.0, 5.0], l_max=4)
    assert len(summary) == 20
    assert (summary["samples"] == 1000).all()
    assert summary["violations"].sum() == 0
    assert (summary["min_ratio"] >= 1.0).all()


def test_fuzz_is_deterministic():
    first = fuzz_lemma1(seeds=50, b_grid=[2.0], l_max=2, first_seed=100)
    second = fuzz_lemma1(seeds=50, b_grid=[2.0], l_max=2, first_seed=100)
    assert first.equals(second)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("l", [1, 2, 3])
@pytest.mark.parametrize("k", [1, 10, 100])
def test_f_is_strictly_decreasing_for_physical_eta(n, l, k):
    V = 1.0
    for eta in (physical_eta(n, V), physical_eta(n, V, inertia_floor(n, V))):
        verdict = f_profile_scan(FProfileInputs(n, l, k, V, eta), samples=1000)
        assert verdict.eta_admissible
        assert verdict.decreasing
        assert verdict.derivative_negative


@pytest.mark.parametrize("n, l, k", [(1, 1, 1), (1, 2, 1), (2, 1, 7), (2, 2, 10), (3, 3, 100)])
def test_f_at_the_bessel_ceiling_is_k_times_theorem1(n, l, k):
    V = 2.0
    I = inertia_floor(n, V) * 1.7
    inputs = FProfileInputs(n, l, k, V, physical_eta(n, V, I))
    value = f_profile(inputs.at(inputs.t_max))
    assert value == pytest.approx(k * theorem1_average(BoundInputs(n, l, V, I, k)).value, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 200), st.floats(0.01, 0.99))
def test_derivative_matches_difference_quotient(n, l, k, fraction):
    inputs = FProfileInputs(n, l, k, 1.0, physical_eta(n, 1.0))
    t = fraction * inputs.t_max
    step = 1e-6 * t
    quotient = (f_profile(inputs.at(t + step)) - f_profile(inputs.at(t - step))) / (2 * step)
    assert f_profile_derivative(inputs.at(t)) == pytest.approx(quotient, rel=1e-5)


def test_f_requires_t_in_range():
    inputs = FProfileInputs(2, 1, 1, 1.0, 1.0)
    with pytest.raises(ValueError):
        f_profile(inputs)
    with pytest.raises(ValueError):
        inputs.at(2 * inputs.t_max)
    assert inputs.t_max == pytest.approx((2 * math.pi) ** -2)


def test_triangle_profile_example():
    A, A_1 = moment_integrals(tent(), b=1, l=1)
    assert (A, A_1) == (pytest.approx(0.5), pytest.approx(1 / 12))
    rhs = lemma1_rhs(LemmaInputs(1.0, 1, A, 1.0, 1.0))
    assert rhs == pytest.approx(5 / 72, rel=1e-14)
    assert A_1 >= rhs


def test_higher_order_example():
    rhs = lemma1_rhs(LemmaInputs(1.0, 2, 0.5, 1.0, 1.0))
    assert rhs == pytest.approx(67 / 4320, rel=1e-14)
    assert rhs == pytest.approx(0.01551, abs=5e-6)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(1.0, 6.0),
    st.integers(1, 4),
    st.floats(0.01, 10.0),
    st.floats(0.1, 10.0),
    st.floats(0.1, 10.0),
    st.floats(0.2, 5.0),
)
def test_rhs_scales_with_the_profile(b, l, A, psi0, eta, c):
    base = lemma1_rhs(LemmaInputs(b, l, A, psi0, eta))
    stretched = lemma1_rhs(LemmaInputs(b, l, c ** b * A, psi0, eta / c))
    assert stretched == pytest.approx(c ** (b + 2 * l) * base, rel=1e-10)


def test_sampler_covers_gentle_and_steep_chords():
    slopes = np.concatenate([
        sample_admissible_profile(seed, eta=1.0, psi0=1.0, support=2.0, pieces=6).slopes
        for seed in range(200)
    ])
    assert np.any((slopes < 0) & (slopes > -0.5))
    assert np.any(slopes < -0.9)


def test_single_piece_profile_reaches_zero_within_support():
    for seed in range(20):
        profile = sample_admissible_profile(seed, eta=1.0, psi0=1.0, support=2.0, pieces=1)
        assert profile.values.tolist() == [1.0, 0.0]
        assert 1.0 <= profile.support <= 2.0 + 1e-12
