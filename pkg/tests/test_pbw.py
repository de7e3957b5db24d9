import itertools
from fractions import Fraction as Q

import pytest

from ekq.bialg import catalog
from ekq.manin import build_double
from ekq.pbw import (
    EnvTensor,
    PBWError,
    antipode0,
    counit0,
    delta0,
    multiply,
    normal_order,
    tensor_multiply,
    tensor_of,
)
from ekq.verma import phi_forward, phi_inverse, register_double

ONE = Q(1)


def axb_double():
    return register_double(build_double(catalog().bialgebras["axb"]))


def words_upto(env, deg):
    out = []
    for length in range(deg + 1):
        out.extend(itertools.combinations_with_replacement(range(env.dim), length))
    return out


# -- normal ordering -----------------------------------------------------------

def test_already_ordered_word():
    env = axb_double().env
    assert normal_order(env, (0, 1)).terms == {(0, 1): ONE}


def test_single_swap_with_bracket():
    # a2 a1 = a1 a2 - [a1, a2] = a1 a2 - a2
    env = axb_double().env
    assert normal_order(env, (1, 0)).terms == {(0, 1): ONE, (1,): -ONE}


def test_mixed_swap_through_the_pairing():
    # b2 a2 = a2 b2 - [a2, b2] = a2 b2 + a1 - b1
    env = axb_double().env
    assert normal_order(env, (3, 1)).terms == {(1, 3): ONE, (0,): ONE, (2,): -ONE}


def test_normal_order_idempotent():
    env = axb_double().env
    for w in words_upto(env, 3):
        expansion = env.normal_order_word(w)
        for word in expansion:
            assert env.normal_order_word(word) == {word: ONE}


def test_unknown_index_errors():
    env = axb_double().env
    with pytest.raises(PBWError):
        normal_order(env, (9,))


# -- multiplication --------------------------------------------------------------

def test_unit_law():
    env = axb_double().env
    x = env.element({(1, 3): Q(2), (0,): Q(-1, 3)})
    assert env.one() * x == x
    assert x * env.one() == x


def test_multiply_matches_normal_order():
    env = axb_double().env
    assert (env.gen(1) * env.gen(0)).terms == {(0, 1): ONE, (1,): -ONE}


def test_multiply_associative_exhaustive_degree3():
    for name in ("axb", "heis3r"):
        env = build_double(catalog().bialgebras[name]).env
        gens = [env.gen(i) for i in range(env.dim)]
        words = [env.element({w: ONE}) for w in words_upto(env, 2) if len(w) == 2]
        for x, y in itertools.product(gens, repeat=2):
            for z in words[:6]:
                assert (x * y) * z == x * (y * z)


def test_filtration_degree():
    env = axb_double().env
    x = env.element({(1,): ONE})
    y = env.element({(3,): ONE})
    assert (x * y).degree() <= 2


def test_algebra_mismatch_errors():
    env1 = axb_double().env
    env2 = build_double(catalog().bialgebras["abelian1"]).env
    with pytest.raises(PBWError):
        multiply(env1.one(), env2.one())


# -- classical coproduct, antipode, counit ----------------------------------------

def test_delta0_primitive_on_generators():
    env = axb_double().env
    assert delta0(env.gen(0), 2).terms == {((0,), ()): ONE, ((), (0,)): ONE}


def test_delta0_on_a_product():
    env = axb_double().env
    x = env.element({(0, 1): ONE})  # a1 a2
    assert delta0(x, 2).terms == {
        ((0, 1), ()): ONE, ((0,), (1,)): ONE, ((1,), (0,)): ONE, ((), (0, 1)): ONE,
    }


def test_delta0_coassociative_degree3():
    env = axb_double().env
    for w in words_upto(env, 3):
        x = env.element({w: ONE})
        three = delta0(x, 3)
        lhs = EnvTensor(env, 3, {})
        for (w1, w2), c in delta0(x, 2).terms.items():
            for (u1, u2), cc in delta0(env.element({w1: ONE}), 2).terms.items():
                lhs = lhs + EnvTensor(env, 3, {(u1, u2, w2): c * cc})
        rhs = EnvTensor(env, 3, {})
        for (w1, w2), c in delta0(x, 2).terms.items():
            for (u1, u2), cc in delta0(env.element({w2: ONE}), 2).terms.items():
                rhs = rhs + EnvTensor(env, 3, {(w1, u1, u2): c * cc})
        assert lhs == three and rhs == three


def test_delta0_is_an_algebra_map():
    env = axb_double().env
    for wx, wy in itertools.product(words_upto(env, 2), repeat=2):
        x, y = env.element({wx: ONE}), env.element({wy: ONE})
        assert delta0(x * y, 2) == tensor_multiply(delta0(x, 2), delta0(y, 2))


def test_delta0_rejects_small_arity():
    env = axb_double().env
    with pytest.raises(PBWError):
        delta0(env.one(), 1)


def test_antipode_examples():
    env = axb_double().env
    assert antipode0(env.gen(0)).terms == {(0,): -ONE}
    # S0(a1 a2) = S0(a2) S0(a1) = a2 a1 = a1 a2 - a2
    assert antipode0(env.element({(0, 1): ONE})).terms == {(0, 1): ONE, (1,): -ONE}


def test_counit():
    env = axb_double().env
    x = env.one() + env.element({(0, 1): ONE})
    assert counit0(x) == ONE


def test_antipode_axiom_degree3():
    env = axb_double().env
    for w in words_upto(env, 3):
        x = env.element({w: ONE})
        acc = env.zero()
        for (w1, w2), c in delta0(x, 2).terms.items():
            acc = acc + (antipode0(env.element({w1: ONE})) * env.element({w2: ONE})).scale(c)
        assert acc == env.one().scale(counit0(x))


# -- the triangular identification with M+ (x) M- ----------------------------------

def test_phi_of_one():
    d = axb_double()
    assert phi_forward(d.env.one()) == {((), ()): ONE}


def test_phi_on_abelian_generators():
    d = register_double(build_double(catalog().bialgebras["abelian2"]))
    n = 2
    for i in range(n):
        assert phi_forward(d.env.gen(i)) == {((), (i,)): ONE}
        assert phi_forward(d.env.gen(i + n)) == {((i + n,), ()): ONE}


def test_phi_roundtrip_degree3():
    d = axb_double()
    env = d.env
    for w in words_upto(env, 3):
        x = env.element({w: ONE})
        assert phi_inverse(d, phi_forward(x)) == x


def test_phi_inverse_linearity():
    d = axb_double()
    env = d.env
    x = env.element({(0, 3): Q(2), (1,): Q(-1, 2)})
    assert phi_inverse(d, phi_forward(x)) == x
