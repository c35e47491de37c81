import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bounds import (
    ASYMPTOTIC,
    AVERAGE,
    INDIVIDUAL,
    BoundInputs,
    asymptotic_leading,
    classical_average_bound,
    conjectural_bounds,
    evaluate_all,
    gamma_constant,
    individual_bound,
    melas_average,
    polya_tiling_bound,
    theorem1_average,
    theorem1_correction,
)
from geometry import inertia_floor, unit_ball_volume


def interval_inputs(k=1, l=1):
    return BoundInputs(1, l, math.pi, math.pi ** 3 / 12, k)


def test_interval_membrane_value():
    bound = theorem1_average(interval_inputs())
    assert bound.kind == AVERAGE
    assert bound.value == pytest.approx(1 / 3 + 1 / (6 * math.pi ** 2), rel=1e-12)
    assert 1.0 / bound.value == pytest.approx(2.855, rel=5e-3)


def test_clamped_beam_value():
    inputs = BoundInputs(1, 2, 1.0, 1.0 / 12, 1)
    expected = (math.pi ** 4 + math.pi ** 2 + 1.0 / 12) / 5
    assert theorem1_average(inputs).value == pytest.approx(expected, rel=1e-12)
    assert classical_average_bound(inputs).value == pytest.approx(math.pi ** 4 / 5, rel=1e-12)
    assert theorem1_correction(inputs) == pytest.approx((math.pi ** 2 + 1.0 / 12) / 5, rel=1e-12)


def test_individual_and_asymptotic_values():
    inputs = BoundInputs(1, 2, 1.0, 1.0 / 12, 1)
    individual = individual_bound(inputs)
    assert individual.kind == INDIVIDUAL
    assert individual.value == pytest.approx(16 * math.pi ** 4 / 80, rel=1e-12)

    leading = asymptotic_leading(inputs)
    assert leading.kind == ASYMPTOTIC
    assert leading.value == pytest.approx(math.pi ** 4, rel=1e-12)
    assert asymptotic_leading(inputs, average=True).value == pytest.approx(
        classical_average_bound(inputs).value, rel=1e-12)


def test_disk_membrane_bounds():
    inputs = BoundInputs(2, 1, math.pi, math.pi / 2, 1)
    assert classical_average_bound(inputs).value == pytest.approx(2.0, rel=1e-12)
    assert melas_average(inputs).value == pytest.approx(2.0 + 1.0 / 48, rel=1e-12)
    polya = polya_tiling_bound(inputs)
    assert polya.conjectural
    assert polya.value == pytest.approx(4.0, rel=1e-12)


def test_membrane_only_bounds_reject_higher_order():
    inputs = BoundInputs(2, 2, 1.0, 1.0, 3)
    with pytest.raises(ValueError):
        melas_average(inputs)
    with pytest.raises(ValueError):
        polya_tiling_bound(inputs)
    assert set(evaluate_all(inputs)) == {"theorem1", "classical", "individual", "asymptotic", "asymptotic_individual"}


def test_melas_identity_for_random_inputs():
    rng = np.random.default_rng(20240101)
    for _ in range(10_000):
        n = int(rng.integers(1, 11))
        V = float(rng.uniform(0.1, 10.0))
        I = inertia_floor(n, V) * float(rng.uniform(1.0, 100.0))
        k = int(rng.integers(1, 1001))
        inputs = BoundInputs(n, 1, V, I, k)
        theorem1 = theorem1_average(inputs).value
        assert abs(theorem1 - melas_average(inputs).value) <= 1e-12 * theorem1


@pytest.mark.parametrize("n", range(1, 51))
def test_gamma_constant_below_one_half(n):
    assert unit_ball_volume(n) ** (4.0 / n) < 2 * math.pi ** 2
    assert gamma_constant(n) < 0.5


@pytest.mark.parametrize("field, value", [("n", 0), ("l", 1.5), ("k", 0), ("V", -1.0), ("I", 0.0)])
def test_invalid_inputs(field, value):
    data = {"n": 2, "l": 1, "V": 1.0, "I": 1.0, "k": 1, field: value}
    with pytest.raises(ValueError, match=field):
        BoundInputs(**data)


def test_inertia_below_floor_is_flagged(caplog):
    with caplog.at_level(logging.WARNING, logger="bounds"):
        inputs = BoundInputs(2, 1, math.pi, 0.5, 1)
    assert not inputs.inertia_admissible
    assert "rearrangement floor" in caplog.text


def test_polya_is_conjectural_off_tiling_domains():
    disk = BoundInputs(2, 1, math.pi, math.pi / 2, 1)
    assert polya_tiling_bound(disk).conjectural
    assert conjectural_bounds(disk) == ["polya"]
    assert conjectural_bounds(disk, "ball") == ["polya"]
    assert conjectural_bounds(disk, "mask") == ["polya"]
    assert conjectural_bounds(interval_inputs(), "interval") == []
    assert conjectural_bounds(BoundInputs(2, 1, 1.0, 1 / 6, 1), "box") == []
    assert conjectural_bounds(interval_inputs(l=2)) == []


def test_large_dimension_stays_finite():
    n = 200
    V = unit_ball_volume(n)
    inputs = BoundInputs(n, 3, V, inertia_floor(n, V) * 2, 10_000)
    values = evaluate_all(inputs)
    assert all(math.isfinite(v) and v > 0 for v in values.values())


admissible = st.tuples(
    st.integers(1, 6),
    st.integers(1, 4),
    st.floats(0.1, 10.0),
    st.floats(1.0, 100.0),
    st.integers(1, 1000),
)


@settings(max_examples=300, deadline=None)
@given(admissible)
def test_theorem1_strictly_improves_classical(params):
    n, l, V, ratio, k = params
    inputs = BoundInputs(n, l, V, inertia_floor(n, V) * ratio, k)
    theorem1 = theorem1_average(inputs).value
    classical = classical_average_bound(inputs).value
    assert theorem1 > classical
    assert theorem1 == pytest.approx(classical + theorem1_correction(inputs), rel=1e-12)
    assert individual_bound(inputs).value == pytest.approx(classical, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(admissible, st.floats(0.1, 10.0))
def test_bounds_scale_like_eigenvalues(params, c):
    n, l, V, ratio, k = params
    inputs = BoundInputs(n, l, V, inertia_floor(n, V) * ratio, k)
    scaled = inputs.scaled(c)
    assert scaled.inertia_admissible
    for name, value in evaluate_all(scaled).items():
        assert value == pytest.approx(c ** (-2 * l) * evaluate_all(inputs)[name], rel=1e-10)


@settings(max_examples=200, deadline=None)
@given(admissible)
def test_bounds_grow_with_k(params):
    n, l, V, ratio, k = params
    I = inertia_floor(n, V) * ratio
    assert theorem1_average(BoundInputs(n, l, V, I, k + 1)).value > theorem1_average(BoundInputs(n, l, V, I, k)).value
