import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unrolled_rpca.shrinkage import (
    McpParams,
    apply_elementwise,
    firm_threshold,
    hard_threshold,
    make_shrinker,
    mcp_penalty,
    soft_threshold,
)


@pytest.mark.parametrize(
    "x, zeta, expected",
    [(0.5, 1.0, 0.0), (2.0, 1.0, 2.0), (-1.5, 1.0, -1.5), (1.0, 1.0, 0.0)],
)
def test_hard_threshold(x, zeta, expected):
    assert hard_threshold(x, zeta) == expected


@pytest.mark.parametrize(
    "x, zeta, expected",
    [(2.0, 1.0, 1.0), (0.5, 1.0, 0.0), (-3.0, 1.0, -2.0)],
)
def test_soft_threshold(x, zeta, expected):
    assert soft_threshold(x, zeta) == expected


@pytest.mark.parametrize(
    "x, expected",
    [
        # hand-evaluated at zeta=1, upsilon=2
        (3.0, 1.0),     # |x| > upsilon*zeta: upsilon*zeta^2/2 = 1
        (1.0, 0.75),    # ramp branch: 1*1 - 1/4
        (0.0, 0.0),
    ],
)
def test_mcp_penalty_hand_values(x, expected):
    assert mcp_penalty(x, McpParams(1.0, 2.0)) == pytest.approx(expected)


@pytest.mark.parametrize(
    "x, expected",
    [
        # hand-evaluated at zeta=1, upsilon=2
        (3.0, 3.0),    # min(2*2/1, 3) = 3: identity beyond upsilon*zeta
        (1.5, 1.0),    # min(2*0.5/1, 1.5) = 1
        (0.5, 0.0),    # below threshold
    ],
)
def test_firm_threshold_hand_values(x, expected):
    assert firm_threshold(x, McpParams(1.0, 2.0)) == pytest.approx(expected)


def test_firm_threshold_boundary_is_identity():
    # at |x| = upsilon*zeta both branches coincide and the value is x itself
    p = McpParams(1.0, 2.0)
    assert firm_threshold(2.0, p) == 2.0
    assert firm_threshold(-2.0, p) == -2.0


def test_mcp_params_validation():
    with pytest.raises(ValueError):
        McpParams(-0.1, 2.0)
    with pytest.raises(ValueError):
        McpParams(1.0, 1.0)  # upsilon must be strictly > 1


def test_apply_elementwise_hard():
    M = np.array([[0.5, 2.0], [-3.0, 0.0]])
    out = apply_elementwise(M, "hard", 1.0)
    np.testing.assert_array_equal(out, [[0.0, 2.0], [-3.0, 0.0]])


def test_apply_elementwise_firm_zero_matrix():
    out = apply_elementwise(np.zeros((3, 4)), "firm", McpParams(1.0, 1.05))
    np.testing.assert_array_equal(out, np.zeros((3, 4)))


@pytest.mark.parametrize("op", ["hard", "soft"])
def test_zero_threshold_is_identity(op):
    rng = np.random.default_rng(0)
    M = rng.standard_normal((5, 7))
    np.testing.assert_array_equal(apply_elementwise(M, op, 0.0), M)


def test_zero_threshold_firm_is_identity():
    rng = np.random.default_rng(1)
    M = rng.standard_normal((5, 7))
    np.testing.assert_array_equal(
        apply_elementwise(M, "firm", McpParams(0.0, 1.05)), M
    )


def test_unknown_operator_rejected():
    with pytest.raises(ValueError):
        apply_elementwise(np.zeros((2, 2)), "scad", 1.0)


def _grid_prox(x, params, step=1e-4):
    """Brute-force prox: argmin over a dense grid of 0.5*(t-x)^2 + MCP(t)."""
    span = max(2 * abs(x), 1.0)
    t = np.arange(-span, span + step, step)
    objective = 0.5 * (t - x) ** 2 + mcp_penalty(t, params)
    return t[np.argmin(objective)]


@given(
    x=st.floats(-2.0, 2.0),
    zeta=st.floats(0.01, 1.5),
    ups=st.floats(1.001, 10.0),
)
@settings(max_examples=60, deadline=None)
def test_firm_threshold_is_mcp_prox(x, zeta, ups):
    p = McpParams(zeta, ups)
    assert firm_threshold(x, p) == pytest.approx(_grid_prox(x, p), abs=2e-4)


@given(x=st.floats(-50.0, 50.0), zeta=st.floats(0.0, 5.0))
@settings(max_examples=100, deadline=None)
def test_firm_limits_to_soft(x, zeta):
    p = McpParams(zeta, 1e6)
    assert abs(firm_threshold(x, p) - soft_threshold(x, zeta)) <= 1e-4


@given(x=st.floats(-50.0, 50.0), zeta=st.floats(0.01, 5.0))
@settings(max_examples=100, deadline=None)
def test_firm_limits_to_hard_off_band(x, zeta):
    ups = 1 + 1e-6
    if zeta <= abs(x) <= ups * zeta:  # the band where the two really differ
        return
    p = McpParams(zeta, ups)
    assert abs(firm_threshold(x, p) - hard_threshold(x, zeta)) <= 1e-4


@given(x=st.floats(-10.0, 10.0))
@settings(max_examples=50, deadline=None)
def test_firm_odd_symmetry(x):
    p = McpParams(0.8, 3.0)
    assert firm_threshold(-x, p) == -firm_threshold(x, p)


def test_firm_monotone_nondecreasing():
    p = McpParams(1.0, 1.05)
    x = np.linspace(-6, 6, 4001)
    y = firm_threshold(x, p)
    assert np.all(np.diff(y) >= -1e-12)


def test_firm_identity_above_band():
    # exact pass-through for |x| >= upsilon*zeta
    p = McpParams(1.3, 1.05)
    x = np.array([1.3 * 1.05, 1.4, -2.0, 7.7])
    np.testing.assert_array_equal(firm_threshold(x, p), x)


def test_make_shrinker_matches_operators():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((4, 4))
    np.testing.assert_array_equal(
        make_shrinker("firm", 1.05)(X, 0.7),
        firm_threshold(X, McpParams(0.7, 1.05)),
    )
    np.testing.assert_array_equal(make_shrinker("hard")(X, 0.7), hard_threshold(X, 0.7))
    with pytest.raises(ValueError):
        make_shrinker("firm")  # missing upsilon
