"""Partitions, symmetric polynomials and Jack polynomials."""

import math
from fractions import Fraction
from itertools import permutations
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betaintertwine import DomainError
from betaintertwine.jack import (JackIndex, SymmetricPoly, apply_operator, conjugate, eval_eigenvalue,
                                 first_order_binomials, jack_eval, jack_expand, jack_norm_at_ones,
                                 partitions_up_to)
from betaintertwine.jack.jack import parse_golden
from betaintertwine.jack.partitions import Partition, b_stat, dominates, lowered, remove_box

GOLDEN = Path(__file__).parent / "golden" / "jack_rational.txt"


@st.composite
def partitions(draw, max_weight=8, max_length=None):
    w = draw(st.integers(0, max_weight))
    parts = []
    cap = w
    # stopping at max_length leaves a valid partition of smaller weight
    while w > 0 and (max_length is None or len(parts) < max_length):
        p = draw(st.integers(1, min(cap, w)))
        parts.append(p)
        cap, w = p, w - p
    return Partition(parts)


# partitions ---------------------------------------------------------------

@pytest.mark.parametrize("lam, expected", [((2, 1), (2, 1)), ((), ()), ((3, 1), (2, 1, 1))])
def test_conjugate_examples(lam, expected):
    assert conjugate(lam) == Partition(expected)


def _columns(lam):
    # column lengths by scanning the Young diagram row by row
    return [sum(1 for part in lam if part > j) for j in range(lam[0] if lam else 0)]


@given(partitions(12))
def test_conjugate_matches_column_scan_and_is_involution(lam):
    assert list(conjugate(lam)) == _columns(lam)
    assert conjugate(conjugate(lam)) == lam


@pytest.mark.parametrize("lam, expected", [((), 0), ((3, 1), 1), ((2, 2, 1), 4)])
def test_b_stat_examples(lam, expected):
    assert b_stat(lam) == expected


def test_b_stat_duality_up_to_weight_12():
    for lam in partitions_up_to(12):
        assert b_stat(lam) == sum(math.comb(c, 2) for c in conjugate(lam))


def test_lowered_drops_trailing_zero_part():
    assert dict(lowered((2, 1))) == {1: Partition((1, 1)), 2: Partition((2,))}
    assert remove_box((2, 2), 1) is None
    assert dict(lowered((1,))) == {1: Partition(())}


def test_dominance_is_partial_order_on_weight_6():
    parts = [p for p in partitions_up_to(6) if sum(p) == 6]
    for a in parts:
        assert dominates(a, a)
        for b in parts:
            if a != b and dominates(a, b):
                assert not dominates(b, a)


# eigenvalue and normalization -----------------------------------------------

def test_eval_eigenvalue_examples():
    assert eval_eigenvalue((), 3, 0.7) == 0
    assert eval_eigenvalue((1,), 2, 1.0) == pytest.approx(2.0)
    lam, th = (2, 1), Fraction(1, 2)
    assert eval_eigenvalue(lam, 4, th) - eval_eigenvalue(lam, 3, th) == 3


def test_eval_eigenvalue_rejects_short_n():
    with pytest.raises(DomainError):
        eval_eigenvalue((1, 1, 1), 2, 1.0)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_norm_at_ones_examples(n):
    assert jack_norm_at_ones((), n, 0.8) == 1
    assert jack_norm_at_ones((1,), n, 0.8) == pytest.approx(n)
    assert jack_norm_at_ones((2,), 1, 1.0) == pytest.approx(2.0)


# expansion --------------------------------------------------------------------

def test_expand_small_examples():
    assert jack_expand((), 3, 0.5) == SymmetricPoly.constant(3, 1)
    for n in (1, 2, 4):
        J = jack_expand((1,), n, 1.7)
        assert J.terms == {Partition((1,)): pytest.approx(1.0)}
    assert jack_expand((2,), 1, 1.0).terms == {Partition((2,)): pytest.approx(2.0)}


@pytest.mark.parametrize("theta", [0.5, 1.0, 1.5, 2.0])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_eigen_property(n, theta):
    for lam in partitions_up_to(5, n):
        J = jack_expand(lam, n, theta)
        lhs = apply_operator("D", J, theta)
        assert lhs.max_abs_diff(J * eval_eigenvalue(lam, n, theta)) < 1e-10 * max(1.0, J.max_abs_coeff())


@pytest.mark.parametrize("n", [1, 2, 3])
def test_expansion_is_dominance_triangular_and_normalized(n):
    theta = 0.75
    for lam in partitions_up_to(5, n):
        J = jack_expand(lam, n, theta)
        assert all(dominates(lam, mu) for mu in J.support())
        assert J(np.ones(n)) == pytest.approx(jack_norm_at_ones(lam, n, theta), rel=1e-12)


def _schur(lam, z):
    # bialternant formula, an oracle independent of the eigen-solve
    n = len(z)
    lam = list(lam) + [0] * (n - len(lam))
    num = np.array([[zi ** (lam[j] + n - 1 - j) for j in range(n)] for zi in z])
    den = np.array([[zi ** (n - 1 - j) for j in range(n)] for zi in z])
    return np.linalg.det(num) / np.linalg.det(den)


@pytest.mark.parametrize("n", [2, 3])
def test_theta_one_is_proportional_to_schur(n):
    rng = np.random.default_rng(3)
    z = np.sort(rng.uniform(0.2, 2.0, n))
    ones = 1.0 + np.arange(n) * 1e-4   # the bialternant is singular at 1_n; use a limit point
    for lam in partitions_up_to(4, n):
        ratio = jack_eval(lam, z, 1.0) / jack_eval(lam, ones, 1.0)
        assert ratio == pytest.approx(_schur(lam, z) / _schur(lam, ones), rel=1e-6)


def test_golden_rational_expansions():
    records = parse_golden(GOLDEN.read_text())
    assert len(records) == 75
    for lam, n, theta, poly in records:
        assert jack_expand(lam, n, theta) == poly
        # the stored polynomial satisfies the defining properties exactly
        assert apply_operator("D", poly, theta) == poly * eval_eigenvalue(lam, n, theta)
        assert poly(np.ones(n)) == pytest.approx(float(jack_norm_at_ones(lam, n, theta)), rel=1e-14)


def test_exact_mode_agrees_with_float():
    for lam in partitions_up_to(4, 3):
        exact = jack_expand(lam, 3, Fraction(3, 4)).to_float()
        assert exact.max_abs_diff(jack_expand(lam, 3, 0.75)) < 1e-10


def test_jack_index_validates():
    with pytest.raises(DomainError):
        JackIndex((1, 1, 1), 2, 1.0)
    with pytest.raises(DomainError):
        JackIndex((1,), 2, 0.0)
    idx = JackIndex((2, 1), 3, 0.5)
    assert idx.norm_at_ones() == pytest.approx(idx(np.ones(3)))


# evaluation -------------------------------------------------------------------

def test_jack_eval_examples():
    assert jack_eval((1,), [2.0, 3.0], 0.5) == pytest.approx(5.0)
    assert jack_eval((), [0.3, 7.0], 1.3) == pytest.approx(1.0)
    assert jack_eval((3, 1), np.ones(3), 0.5) == pytest.approx(jack_norm_at_ones((3, 1), 3, 0.5))


@settings(max_examples=25, deadline=None)
@given(partitions(5, max_length=3), st.integers(0, 2 ** 32 - 1))
def test_jack_eval_is_permutation_invariant(lam, seed):
    rng = np.random.default_rng(seed)
    z = rng.uniform(0.1, 3.0, 3)
    base = jack_eval(lam, z, 0.75)
    for perm in list(permutations(range(3)))[:10]:
        assert jack_eval(lam, z[list(perm)], 0.75) == pytest.approx(base, rel=1e-12, abs=1e-300)


# binomials --------------------------------------------------------------------

def test_binomial_examples():
    assert first_order_binomials((1,), 1.0) == {1: pytest.approx(1.0)}
    assert first_order_binomials((2, 2), 0.7)[1] == 0
    a = first_order_binomials((2,), 1.0, n_aux=3)
    b = first_order_binomials((2,), 1.0, n_aux=5)
    assert a.keys() == b.keys()
    for i in a:
        assert a[i] == pytest.approx(b[i], abs=1e-10)


@settings(max_examples=20, deadline=None)
@given(partitions(5, max_length=3).filter(bool), st.sampled_from([0.5, 1.0, 2.0]))
def test_binomials_do_not_depend_on_auxiliary_n(lam, theta):
    n0 = len(lam) + 1
    a = first_order_binomials(lam, theta, n_aux=n0)
    b = first_order_binomials(lam, theta, n_aux=n0 + 2)
    for i in a:
        assert a[i] == pytest.approx(b[i], abs=1e-10)


def test_binomials_exact_mode():
    th = Fraction(1, 2)
    exact = first_order_binomials((2, 1), th)
    approx = first_order_binomials((2, 1), 0.5)
    assert all(isinstance(v, Fraction) for v in exact.values())
    for i in exact:
        assert float(exact[i]) == pytest.approx(approx[i], abs=1e-10)


# operators on polynomials -----------------------------------------------------

def test_operator_examples():
    for n in (1, 3):
        B1 = apply_operator("B1", jack_expand((1,), n, 1.0), 1.0)
        assert B1.max_abs_diff(SymmetricPoly.constant(n, n)) < 1e-12
    J = jack_expand((2, 1), 3, 0.5)
    assert apply_operator("B3", J, 0.5).max_abs_diff(J * 3) < 1e-12
