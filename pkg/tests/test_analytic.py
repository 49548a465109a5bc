import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellforge.analytic import (
    ConstructionError,
    _hardy_certificate,
    ghz_angles,
    ghz_closed_form,
    ghz_value_closed,
    ghz_violation,
    hardy_measurements,
    schmidt_state,
    symmetric_hardy_construction,
)
from bellforge.functional import build_centered, chsh_variant, evaluate
from bellforge.quantum import PureState, canonical_three_qubit_state, behavior_from_state

from test_quantum import _projector_behavior


def test_ghz_spot_value():
    assert ghz_value_closed(3, math.pi / 8) == pytest.approx(3.06e-2, abs=5e-4)
    a0, a1 = ghz_angles(3, math.pi / 8)
    t = math.tan(math.pi / 8)
    assert a0 == pytest.approx(math.atan(t ** (-3 / 5)), abs=1e-15)
    assert a1 == pytest.approx(-math.atan(t ** (-1 / 5)), abs=1e-15)
    assert a0 == pytest.approx(1.0383, abs=1e-4)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 6), st.floats(0.02, math.pi / 4 - 0.02))
def test_ghz_simulator_agrees_with_closed_form(n, theta):
    c = ghz_violation(n, theta)
    assert c.value > 0
    assert c.residual < 1e-10
    assert max(c.flip_residual, c.pair_residual) < 1e-10


def test_ghz_closed_form_zeros():
    a0, a1 = ghz_angles(4, 0.3)
    _, flip, pair = ghz_closed_form(4, 0.3, a0, a1)
    assert flip < 1e-30 and pair < 1e-30


def test_ghz_rejects_endpoints():
    for theta in (0.0, math.pi / 4):
        with pytest.raises(ConstructionError):
            ghz_angles(3, theta)
    with pytest.raises(ConstructionError):
        ghz_angles(2, 0.3)


def test_hardy_spot_value():
    c = hardy_measurements(math.pi / 6, math.pi / 3)
    assert c.p_00_00 == pytest.approx(0.075, abs=1e-12)
    assert c.zero_residual < 1e-12


@pytest.mark.parametrize("theta", [math.pi / 12, math.pi / 8, math.pi / 6, math.pi / 5])
@pytest.mark.parametrize("alpha", [math.pi / 6, math.pi / 4, math.pi / 3])
@pytest.mark.parametrize("delta", [0.0, math.pi / 2])
def test_hardy_zeros_by_projector_oracle(theta, alpha, delta):
    c = hardy_measurements(theta, alpha, delta)
    table = _projector_behavior(schmidt_state(theta), c.measurements)
    assert table[0b01, 0b01] < 1e-12
    assert table[0b10, 0b10] < 1e-12
    assert table[0b11, 0b00] < 1e-12
    assert table[0b00, 0b00] > 1e-6


def test_hardy_forbidden_lines():
    for alpha in (0.0, math.pi / 2, math.pi):
        with pytest.raises(ConstructionError):
            hardy_measurements(math.pi / 8, alpha)
    for theta in (0.0, math.pi / 4):
        with pytest.raises(ConstructionError):
            hardy_measurements(theta, math.pi / 3)


def test_hardy_degenerates_on_forbidden_alpha():
    assert _hardy_certificate(math.pi / 8, math.pi / 2, 0.0).p_00_00 < 1e-20


def _random_symmetric_state(rng):
    while True:
        h0, h1, h2, h4 = rng.uniform(0, 1, 4)
        norm = math.sqrt(h0**2 + h1**2 + 2 * h2**2 + h4**2)
        h0, h1, h2, h4 = h0 / norm, h1 / norm, h2 / norm, h4 / norm
        if min(h0, h2, h4) > 0.05:
            return canonical_three_qubit_state(h0, h1, h2, h2, h4, rng.uniform(0, math.pi))


def test_symmetric_hardy_example():
    s = canonical_three_qubit_state(0.6, 0, 0.4, 0.4, math.sqrt(0.32))
    r = symmetric_hardy_construction(s)
    assert r.value > 1e-3
    assert r.zero_residual < 1e-10
    table = _projector_behavior(s, r.assignment)
    assert table[0b000, 0b000] == pytest.approx(r.p_root, abs=1e-12)
    assert evaluate(build_centered(chsh_variant(), 3), behavior_from_state(s, r.assignment)) == \
        pytest.approx(r.value, abs=1e-14)
    # parties 1 and 2 measure identically
    assert r.assignment.settings[1] == r.assignment.settings[2]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_symmetric_hardy_random_states(seed):
    r = symmetric_hardy_construction(_random_symmetric_state(np.random.default_rng(seed)))
    assert r.value > 0
    assert r.zero_residual < 1e-10


def test_symmetric_hardy_scan_not_worse():
    s = _random_symmetric_state(np.random.default_rng(11))
    assert symmetric_hardy_construction(s, "scan").value >= symmetric_hardy_construction(s).value - 1e-15


def test_symmetric_hardy_rejects_bad_states():
    with pytest.raises(ConstructionError, match="symmetric"):
        symmetric_hardy_construction(canonical_three_qubit_state(0.6, 0, 0.5, 0.3, math.sqrt(1 - 0.36 - 0.25 - 0.09)))
    with pytest.raises(ConstructionError, match="genuinely"):
        symmetric_hardy_construction(canonical_three_qubit_state(0, 0, math.sqrt(0.5), math.sqrt(0.5), 0))
    with pytest.raises(ConstructionError, match="canonical"):
        symmetric_hardy_construction(PureState(np.full(8, 8**-0.5)))
    with pytest.raises(ConstructionError):
        symmetric_hardy_construction(PureState([1, 0, 0, 0]))
