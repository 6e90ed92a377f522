import numpy as np
import pytest
from scipy.optimize import linprog

from muntz_lab.simplex import INFEASIBLE, OPTIMAL, simplex


@pytest.mark.parametrize("seed", range(40))
def test_matches_highs(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 8), rng.integers(2, 30)
    A = rng.normal(size=(m, n))
    b = A @ (rng.random(n) * (rng.random(n) < 0.5))
    c = rng.random(n)
    ours = simplex(A, b, c)
    ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    assert ours.status == OPTIMAL and ref.status == 0
    assert ours.value == pytest.approx(ref.fun, rel=1e-8, abs=1e-9)
    assert np.allclose(A @ ours.x, b, atol=1e-8)
    assert np.all(ours.x >= -1e-12)


def test_infeasible():
    A = np.array([[1.0, 1.0]])
    assert simplex(A, [-1.0], [1.0, 1.0]).status == INFEASIBLE


def test_degenerate_redundant_rows():
    A = np.array([[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 1.0, 1.0]])
    res = simplex(A, [1.0, 2.0, 1.0], [1.0, 2.0, 3.0])
    assert res.status == OPTIMAL
    # y = (1 - s, s, 1 - s) costs 4 - 2s, so the optimum is y = (0, 1, 0)
    assert res.value == pytest.approx(2.0)
    assert np.allclose(res.x, [0, 1, 0])


def test_klee_minty_style_cycling_free():
    # classic Beale cycling example in equality form with slacks
    A = np.array([
        [0.25, -8, -1, 9, 1, 0, 0],
        [0.5, -12, -0.5, 3, 0, 1, 0],
        [0, 0, 1, 0, 0, 0, 1],
    ])
    b = np.array([0.0, 0.0, 1.0])
    c = np.array([-0.75, 20, -0.5, 6, 0, 0, 0])
    res = simplex(A, b, c)
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(-1.25)
