from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ekq.kernel import (
    HSeries,
    KernelError,
    SparseTensor,
    compose_perms,
    compose_tensors,
    identity_tensor,
    perm_tensor,
    permute,
    rat,
    rref,
    series_exp,
    series_inverse,
    series_mul,
    solve_in_span,
    tensor_product,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=12)


def series(*coeffs):
    return HSeries(tuple(Q(c) if not isinstance(c, Q) else c for c in coeffs))


@given(rationals, rationals, rationals, rationals)
def test_rational_arithmetic_is_exact(a, b, c, d):
    assert (a + b) * c * d - (a * c * d + b * c * d) == 0


def test_rat_parses_strings():
    assert rat("3/4") == Q(3, 4)
    assert rat("-2") == Q(-2)
    assert rat(5) == Q(5)
    with pytest.raises(KernelError):
        rat(0.5)


# -- truncated series ---------------------------------------------------------

def test_telescoping_product():
    c = Q(7, 3)
    left = series(1, c, 0)
    right = series(1, -c, 0)
    assert series_mul(left, right) == series(1, 0, -c * c)


def test_series_mul_unit():
    x = series(Q(2), Q(-1, 3), Q(5))
    one = series(1, 0, 0)
    assert series_mul(x, one) == x
    assert series_mul(one, x) == x


def test_series_mul_rejects_mismatched_orders():
    with pytest.raises(KernelError):
        series_mul(series(1, 0, 0), HSeries((Q(1), Q(0)), order=2))


@given(st.tuples(rationals, rationals, rationals),
       st.tuples(rationals, rationals, rationals),
       st.tuples(rationals, rationals, rationals))
def test_series_ring_axioms(a, b, c):
    x, y, z = HSeries(a), HSeries(b), HSeries(c)
    assert series_mul(series_mul(x, y), z) == series_mul(x, series_mul(y, z))
    assert series_mul(x, y + z) == series_mul(x, y) + series_mul(x, z)


def test_inverse_of_one():
    one = series(1, 0, 0)
    assert series_inverse(one, Q(1)) == one


def test_inverse_geometric():
    a = Q(4, 7)
    assert series_inverse(series(1, a, 0), Q(1)) == series(1, -a, a * a)


def test_inverse_order_two_term():
    k = Q(1, 24)
    x = series(1, 0, k)
    inv = series_inverse(x, Q(1))
    assert inv == series(1, 0, -k)
    assert series_mul(x, inv) == series(1, 0, 0)


@given(st.tuples(rationals, rationals))
def test_inverse_multiplies_back(tail):
    x = HSeries((Q(1),) + tail)
    assert series_mul(x, series_inverse(x, Q(1))) == HSeries((Q(1), Q(0), Q(0)))


def test_inverse_needs_unit_leading_term():
    with pytest.raises(KernelError):
        series_inverse(series(0, 1, 0), Q(1))


def test_series_exp_truncates():
    w = Q(1, 2)
    assert series_exp(series(0, w, 0), Q(1)) == series(1, w, w * w / 2)


# -- sparse tensors and the permutation action -------------------------------

def two_tensor(entries, dim=2):
    return SparseTensor.make(0, 2, (dim, dim), entries)


def test_permute_swap_is_transpose():
    r = two_tensor({(0, 1): Q(1), (1, 0): Q(3)})
    swapped = permute(r, (), (1, 0))
    assert swapped.entries == {(1, 0): Q(1), (0, 1): Q(3)}


def test_permute_identity_and_involution():
    r = two_tensor({(0, 1): Q(2)})
    assert permute(r, (), (0, 1)) == r
    assert permute(permute(r, (), (1, 0)), (), (1, 0)) == r


def test_permute_rejects_bad_sizes():
    r = two_tensor({(0, 1): Q(2)})
    with pytest.raises(KernelError):
        permute(r, (), (0, 1, 2))


@given(st.permutations(range(4)), st.permutations(range(4)))
def test_permute_is_a_group_action(sigma, tau):
    entries = {(0, 1, 2, 3): Q(5), (3, 1, 0, 2): Q(-2), (1, 1, 2, 0): Q(7, 3)}
    t = SparseTensor.make(0, 4, (4,) * 4, entries)
    once = permute(permute(t, (), sigma), (), tau)
    combined = permute(t, (), compose_perms(sigma, tau))
    assert once == combined


def test_tensor_entries_prune_zero():
    t = SparseTensor.make(1, 1, (2, 2), {(0, 0): Q(1), (1, 1): Q(0)})
    assert (0, 0) in t.entries and (1, 1) not in t.entries
    with pytest.raises(KernelError):
        SparseTensor(1, 1, (2, 2), {(0, 0): Q(0)})


def test_compose_and_tensor_product():
    dim = 2
    f = SparseTensor.make(1, 1, (dim, dim), {(0, 1): Q(1)})   # e0 -> e1
    g = SparseTensor.make(1, 1, (dim, dim), {(1, 0): Q(2)})   # e1 -> 2 e0
    assert compose_tensors(g, f).entries == {(0, 0): Q(2)}
    prod = tensor_product(f, g)
    assert prod.entries == {(0, 1, 1, 0): Q(2)}
    ident = identity_tensor(2, dim)
    assert compose_tensors(ident, prod) == prod


def test_perm_tensor_matches_permute_semantics():
    dim = 3
    sigma = (2, 0, 1)
    p = perm_tensor(sigma, dim)
    vec = SparseTensor.make(0, 3, (dim,) * 3, {(0, 1, 2): Q(1)})
    moved = compose_tensors(p, vec)
    assert moved.entries == {(2, 0, 1): Q(1)}


# -- exact linear algebra ------------------------------------------------------

def test_rref_and_solve():
    rows = [(Q(2), Q(0), Q(2)), (Q(0), Q(1), Q(1)), (Q(2), Q(1), Q(3))]
    reduced, pivots = rref(rows)
    assert len(reduced) == 2 and pivots == [0, 1]
    coords = solve_in_span([(Q(1), Q(0), Q(1)), (Q(0), Q(1), Q(1))], (Q(3), Q(2), Q(5)))
    assert coords == [Q(3), Q(2)]
    assert solve_in_span([(Q(1), Q(0), Q(0))], (Q(0), Q(1), Q(0))) is None
