import json

import numpy as np
import pytest

from unrolled_rpca.metrics import (
    CSV_COLUMNS,
    compute_metrics,
    eps_L,
    eps_M,
    eps_S,
    eps_supp,
)


def test_eps_L_identical():
    X = np.arange(6.0).reshape(2, 3)
    assert eps_L(X, X) == 0.0


def test_eps_L_identity_vs_zero():
    assert eps_L(np.zeros((2, 2)), np.eye(2)) == pytest.approx(np.sqrt(2))


def test_eps_L_matches_elementwise_oracle():
    rng = np.random.default_rng(0)
    A, B = rng.standard_normal((4, 5)), rng.standard_normal((4, 5))
    assert eps_L(A, B) == pytest.approx(np.sqrt(np.sum((A - B) ** 2)))


def test_eps_S_same_semantics():
    rng = np.random.default_rng(1)
    A, B = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
    assert eps_S(A, B) == eps_L(A, B)
    assert eps_S(A, A) == 0.0
    assert eps_S(np.zeros((2, 2)), np.eye(2)) == pytest.approx(np.sqrt(2))


def test_eps_shape_mismatch():
    with pytest.raises(ValueError):
        eps_L(np.zeros((2, 2)), np.zeros((3, 2)))


def test_eps_M_exact_split():
    rng = np.random.default_rng(2)
    L, S = rng.standard_normal((4, 4)), rng.standard_normal((4, 4))
    # (L+S) - L - S leaves only the rounding of the sum
    assert eps_M(L + S, L, S) == pytest.approx(0.0, abs=1e-15)


def test_eps_M_zero_outputs():
    M = np.eye(3) * 2
    assert eps_M(M, np.zeros((3, 3)), np.zeros((3, 3))) == 1.0


def test_eps_M_matches_oracle():
    rng = np.random.default_rng(3)
    M, L, S = (rng.standard_normal((5, 4)) for _ in range(3))
    want = np.sqrt(np.sum((M - L - S) ** 2)) / np.sqrt(np.sum(M**2))
    assert eps_M(M, L, S) == pytest.approx(want)


def test_eps_M_zero_norm_rejected():
    with pytest.raises(ValueError):
        eps_M(np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 2)))


def test_eps_M_depends_only_on_sum():
    rng = np.random.default_rng(4)
    M, L, S, delta = (rng.standard_normal((4, 4)) for _ in range(4))
    assert eps_M(M, L, S) == eps_M(M, L + delta, S - delta)


def test_eps_supp_identical():
    S = np.diag([1.0, 0.0, 2.0])
    assert eps_supp(S, S) == 0.0


def test_eps_supp_half_wrong():
    # identity support lost entirely: 2 mismatches out of 4 cells
    assert eps_supp(np.eye(2), np.zeros((2, 2))) == 0.5


def test_eps_supp_total_mismatch():
    assert eps_supp(np.ones((3, 3)), np.zeros((3, 3))) == 1.0


def test_eps_supp_symmetry_and_range():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((6, 6)) * (rng.random((6, 6)) < 0.3)
    B = rng.standard_normal((6, 6)) * (rng.random((6, 6)) < 0.3)
    assert eps_supp(A, B) == eps_supp(B, A)
    assert 0.0 <= eps_supp(A, B) <= 1.0


def test_eps_supp_requires_square():
    with pytest.raises(ValueError, match="square"):
        eps_supp(np.zeros((2, 3)), np.zeros((2, 3)))


def test_eps_supp_tolerance_override():
    S_star = np.diag([1.0, 1.0])
    S_out = np.array([[1.0, 1e-9], [0.0, 1.0]])
    assert eps_supp(S_star, S_out) == 0.25  # exact-zero semantics
    assert eps_supp(S_star, S_out, tol=1e-6) == 0.0


def test_eps_triangle_inequality_spot_check():
    rng = np.random.default_rng(6)
    A, B, C = (rng.standard_normal((4, 4)) for _ in range(3))
    assert eps_L(A, C) <= eps_L(A, B) + eps_L(B, C) + 1e-12


def test_report_json_and_csv():
    rng = np.random.default_rng(7)
    L = rng.standard_normal((4, 4))
    S = np.zeros((4, 4))
    S[0, 0] = 5.0
    rep = compute_metrics(L, S, L + S, L, S, tags={"method": "x", "case": 1, "seed": 2})
    payload = json.loads(rep.to_json())
    assert payload["eps_M"] == 0.0
    assert payload["tags"]["method"] == "x"
    row = rep.csv_row()
    cells = row.split(",")
    assert len(cells) == len(CSV_COLUMNS)
    assert cells[0] == "x" and cells[1] == "1" and cells[2] == "2"
    assert float(cells[3]) == 0.0
