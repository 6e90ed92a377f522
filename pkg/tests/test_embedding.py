import json

import numpy as np
import pytest

from muntz_lab import (
    MuntzError,
    MuntzPolynomial,
    apply_embedding,
    build_grid,
    default_anchors,
    random_unit_polynomial,
    sup_norm_certified,
    validate_sequence,
    verify_sandwich,
)
from muntz_lab.embedding import embedding_csv_rows, spacing_violations


def scan(grid):
    """Independent consecutive-difference scan, band by band."""
    pts = grid.points
    bad = 0
    for i in range(1, len(grid.anchors)):
        lo, hi = grid.anchors[i - 1], grid.anchors[i]
        band = pts[(pts >= lo) & (pts <= hi)]
        assert band[0] == lo and band[-1] == hi
        bad += int(np.sum(np.diff(band) > grid.epsilon / grid.constants[i - 1]))
    return bad


def test_default_anchors():
    assert default_anchors(3) == [0.5, 0.75, 0.875]
    assert default_anchors(1) == [0.5]
    with pytest.raises(MuntzError):
        default_anchors(0)


def test_single_band_grid():
    g = build_grid(None, None, 0.1, [0.5], [10])
    steps = np.diff(g.points)
    assert steps.max() <= 0.01
    assert len(g.points) >= 51
    assert g.points[0] == 0 and g.points[-1] == 0.5
    assert scan(g) == 0


def test_two_band_grid():
    g = build_grid(None, None, 0.5, [0.5, 0.75], [2.5, 2.5])
    assert np.diff(g.points).max() <= 0.2
    assert 0.5 in g.points and 0.75 in g.points
    assert scan(g) == 0


@pytest.mark.parametrize("eps", [0.9, 0.3, 0.1, 0.01, 0.0123])
@pytest.mark.parametrize("m", [1, 4, 9])
def test_spacing_rule_scan(eps, m):
    anchors = default_anchors(m)
    ks = np.cumsum(np.linspace(1.3, 40.7, m))
    g = build_grid(None, None, eps, anchors, ks)
    assert scan(g) == 0
    assert spacing_violations(g) == []
    assert np.all(np.diff(g.points) > 0)


@pytest.mark.parametrize(
    "eps, anchors, ks",
    [(0.0, [0.5], [1]), (1.0, [0.5], [1]), (0.1, [0.5, 0.7], [1]), (0.1, [0.7, 0.5], [1, 1]),
     (0.1, [0.5, 0.7], [3, 1])],
)
def test_grid_rejects(eps, anchors, ks):
    with pytest.raises(MuntzError):
        build_grid(None, None, eps, anchors, ks)


def test_apply_embedding_examples():
    g = build_grid(None, None, 0.5, [0.5], [1.0])
    assert list(g.points) == [0.0, 0.5]
    f = MuntzPolynomial(validate_sequence([1]), (1,))
    assert list(apply_embedding(f, g)) == [0.0, 0.5, 1.0]
    z = MuntzPolynomial(validate_sequence([1, 2]), (0, 0))
    assert not np.any(apply_embedding(z, g))


def test_embedding_contraction(geometric5):
    g = build_grid(geometric5, 5, 0.1, default_anchors(4), [20, 20, 30, 40])
    for ss in np.random.SeedSequence(3).spawn(100):
        f = random_unit_polynomial(geometric5, 5, ss)
        jf = apply_embedding(f, g)
        assert np.abs(jf).max() <= sup_norm_certified(f, (0, 1), 1e-9).upper
        assert jf[-1] == f(1.0)


def test_embedding_csv(geometric5):
    g = build_grid(None, None, 0.5, [0.5], [1.0])
    f = MuntzPolynomial(geometric5, (1, 1))
    rows = embedding_csv_rows(f, g)
    assert rows[-1] == [2, 1.0, 2.0]


def test_sandwich_monotone_exact(geometric5):
    # t^lam attains its norm at 1, which is the limit coordinate
    g = build_grid(None, None, 0.1, [0.5], [1.25])
    f = MuntzPolynomial(geometric5, (1,))
    jf = apply_embedding(f, g)
    assert np.abs(jf).max() / sup_norm_certified(f, (0, 1), 1e-12).lower == 1.0


def test_sandwich_loose_epsilon(geometric5):
    rep = verify_sandwich(geometric5, 5, 0.9, 50, seed=5, m=3)
    assert rep.min_ratio >= 0.1 - 1e-6
    assert rep.violations == 0


def test_sandwich_small_run(sparse3):
    rep = verify_sandwich(sparse3, 3, 0.1, 100, seed=2, m=4)
    assert rep.violations == 0 and rep.band_violations == 0
    assert 0 <= rep.min_ratio <= rep.max_ratio <= 1 + 1e-9
    json.dumps(rep.to_dict())


def test_sandwich_rejects_small_exponents():
    with pytest.raises(MuntzError):
        verify_sandwich(validate_sequence([0.5, 1]), 2, 0.1, 10, 0)


def test_sandwich_deterministic(sparse3):
    a = verify_sandwich(sparse3, 3, 0.2, 30, seed=9, m=2)
    b = verify_sandwich(sparse3, 3, 0.2, 30, seed=9, m=2)
    assert a == b


def test_parallel_matches_serial(sparse3, monkeypatch):
    serial = verify_sandwich(sparse3, 3, 0.2, 40, seed=4, m=2)
    monkeypatch.setenv("MUNTZ_LAB_THREADS", "4")
    assert verify_sandwich(sparse3, 3, 0.2, 40, seed=4, m=2) == serial
