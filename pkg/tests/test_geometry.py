import numpy as np
import pytest

from muntz_lab import (
    MuntzError,
    MuntzPolynomial,
    asq_tail_defect,
    half_ball_check,
    lasq_empirical_defect,
    lasq_threshold,
    oh_defect_probe,
    random_unit_polynomial,
    small_ball_radius,
    sup_norm_certified,
    validate_sequence,
)
from muntz_lab.core import monomial
from muntz_lab.geometry import (
    coordinate_descent,
    lasq_objective,
    lasq_threshold_from_radius,
    oh_value,
    radius_from_constant,
)


def test_radius_formula():
    assert radius_from_constant(2, 0.9) == 0.25
    assert radius_from_constant(0.5, 0.3) == 0.3


def test_radius_single_term():
    a, c = small_ball_radius(validate_sequence([1]), 1, 0.9)
    assert c == pytest.approx(1.25)
    assert a == pytest.approx(0.4)


def test_radius_monotone_in_x(sparse3):
    a1, _ = small_ball_radius(sparse3, 3, 0.01)
    a2, _ = small_ball_radius(sparse3, 3, 0.02)
    a3, _ = small_ball_radius(sparse3, 3, 0.9)
    assert a1 <= a2 <= a3


def test_threshold_formula():
    assert lasq_threshold_from_radius(0.25, 1) == 0.125
    assert lasq_threshold_from_radius(0.5, 2) == 0.125
    assert lasq_threshold_from_radius(0.9, 1) == 0.45
    assert lasq_threshold_from_radius(0.3, 1) <= lasq_threshold_from_radius(0.4, 1)


def test_threshold_uses_first_exponent(sparse3):
    eps, g, a = lasq_threshold(validate_sequence([0, 2, 3]), 2, 0.9)
    assert g.exponents == (2.0,)
    assert eps == pytest.approx(a**2 / 2)


def test_half_ball_monomial():
    f = MuntzPolynomial(validate_sequence([1]), (1,))
    assert sup_norm_certified(f, (0, 0.25), 1e-9).upper == pytest.approx(0.25)


def test_half_ball_zero_radius(sparse3):
    rep = half_ball_check(sparse3, 3, 0.0, 20, seed=1)
    assert rep.extremal_value <= 1e-12
    assert rep.passed


def test_half_ball_small_run(sparse3):
    a, _ = small_ball_radius(sparse3, 3, 0.9)
    rep = half_ball_check(sparse3, 3, a, 300, seed=3)
    assert rep.extremal_value <= 0.5 + 1e-6
    assert rep.violations == 0


def test_half_ball_detects_large_radius(sparse3):
    # on [0, 1] unit polynomials reach 1, so the check must fail
    rep = half_ball_check(sparse3, 3, 1.0, 20, seed=3)
    assert rep.violations == 20


def test_half_ball_drops_constant():
    rep = half_ball_check(validate_sequence([0, 1, 2]), 2, 0.1, 10, seed=0)
    assert rep.passed


def test_lasq_objective_symmetry(sparse3):
    g = monomial(sparse3, 0)
    h = random_unit_polynomial(sparse3, 3, 17)
    assert lasq_objective(g, h) == lasq_objective(g, -h)


def test_lasq_objective_examples(sparse3):
    g = monomial(sparse3, 0)
    assert lasq_objective(g, g) == pytest.approx(2.0, abs=1e-9)
    assert lasq_objective(g, -g) == pytest.approx(2.0, abs=1e-9)


def test_lasq_small_run(sparse3):
    rep = lasq_empirical_defect(sparse3, 3, 0.9, 200, seed=0, refine_iterations=30)
    assert rep.violations == 0
    assert rep.extremal_value >= 1 + rep.threshold_epsilon_star - 1e-4
    assert rep.best_candidate is not None


def test_coordinate_descent_improves(sparse3):
    target = np.array([0.3, -0.2, 0.9])

    def obj(h):
        return float(np.sum((np.asarray(h.coefficients) - target) ** 2))

    start = random_unit_polynomial(sparse3, 3, 5)
    best, val, seen = coordinate_descent(obj, sparse3, start, iterations=50)
    assert val <= seen[0]
    assert val == min(seen)


def test_asq_tail(geometric5):
    rep = asq_tail_defect(geometric5, 5, 1, 0.9, 50, seed=0, refine_iterations=5)
    assert rep.passed


def test_oh_probe_self(sparse3):
    g = monomial(sparse3, 0)
    assert oh_value([g], g) == pytest.approx(0.0, abs=1e-12)


def test_oh_probe_reports(sparse3):
    g = monomial(sparse3, 0)
    rep = oh_defect_probe([g], sparse3, 3, 200, seed=1)
    assert rep.kind == "oh_probe"
    assert 0 <= rep.extremal_value <= 2 + 1e-6
    assert rep.violations == 0


def test_oh_probe_preconditions(sparse3):
    with pytest.raises(MuntzError):
        oh_defect_probe([], sparse3, 3, 10, 0)
    with pytest.raises(MuntzError):
        oh_defect_probe([monomial(sparse3, 0, 2.0)], sparse3, 3, 10, 0)


def test_reports_serialize(sparse3):
    import json

    rep = half_ball_check(sparse3, 3, 0.1, 5, seed=0)
    json.dumps(rep.to_dict())
    assert len(rep.csv_row()) == 9
