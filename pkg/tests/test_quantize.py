import itertools
from fractions import Fraction as Q

import pytest

from ekq.bialg import catalog
from ekq.kernel import series_mul
from ekq.manin import build_double
from ekq.pbw import (
    EnvTensor,
    counit0,
    delta0,
    element_series,
    tensor_multiply,
    tensor_of,
    tensor_one,
)
from ekq.quantize import (
    EndoModel,
    Quantization,
    QuantizedDouble,
    compute_J,
    h2_product_formula,
    part1_product_check,
    polarize_R,
)

ONE = Q(1)


def quantization(name):
    return Quantization(catalog().bialgebras[name])


# -- the twist -----------------------------------------------------------------

def test_J_leading_terms():
    for name in ("abelian2", "axb", "delta2", "heis3r"):
        qz = quantization(name)
        qd = qz.quantized_double
        env = qz.d.env
        assert qd.J[0] == tensor_one(env, 2)
        r = EnvTensor(env, 2, {((i,), (j,)): v for (i, j), v in qz.d.r.items()})
        assert qd.J[1] == r.scale(Q(1, 2))


def test_J_abelian_is_exponential():
    # with all commutators zero, J is the truncation of exp(h r / 2)
    qz = quantization("abelian2")
    qd = qz.quantized_double
    env = qz.d.env
    r = EnvTensor(env, 2, {((i,), (j,)): v for (i, j), v in qz.d.r.items()})
    r2 = tensor_multiply(r, r)
    assert qd.J[2] == r2.scale(Q(1, 8))


def test_J_inverse_contract():
    qz = quantization("axb")
    qd = qz.quantized_double
    prod = series_mul(qd.J, qd.J_inv, tensor_multiply)
    one2 = tensor_one(qz.d.env, 2)
    assert prod[0] == one2 and prod[1].is_zero() and prod[2].is_zero()


def test_Q_element_first_order():
    # Q = sum S0(x_j) y_j has h^1 coefficient -(1/2) sum a_i b^i
    qz = quantization("axb")
    qd = qz.quantized_double
    env = qz.d.env
    want = env.zero()
    for i in range(qz.d.n):
        want = want + (env.gen(i) * env.gen(i + qz.d.n)).scale(Q(-1, 2))
    assert qd.Q_elt[0] == env.one()
    assert qd.Q_elt[1] == want


# -- Hopf maps on the double ------------------------------------------------------

def test_coproduct_of_unit():
    qz = quantization("axb")
    qd = qz.quantized_double
    cop = qd.coproduct(qz.d.env.one())
    assert cop[0] == tensor_one(qz.d.env, 2)
    assert cop[1].is_zero() and cop[2].is_zero()


def test_coproduct_first_order_is_half_bracket_with_r():
    # Delta(x) = Delta0(x) + (h/2)[Delta0(x), r] + O(h^2) for primitive x
    for name in ("axb", "heis3r"):
        qz = quantization(name)
        qd = qz.quantized_double
        env = qz.d.env
        r = EnvTensor(env, 2, {((i,), (j,)): v for (i, j), v in qz.d.r.items()})
        for x in range(qz.d.dim):
            cop = qd.coproduct(env.gen(x))
            d0 = delta0(env.gen(x), 2)
            want = (tensor_multiply(d0, r) - tensor_multiply(r, d0)).scale(Q(1, 2))
            assert cop[0] == d0
            assert cop[1] == want, (name, x)


def test_antipode_of_unit_and_axiom():
    qz = quantization("axb")
    qd = qz.quantized_double
    env = qz.d.env
    s1 = qd.antipode(env.one())
    assert s1[0] == env.one() and s1[1].is_zero() and s1[2].is_zero()
    for w in [(0,), (1,), (2,), (3,), (1, 3)]:
        x = env.element({w: ONE})
        cop = qd.coproduct(x)
        out = [env.zero() for _ in range(3)]
        for k in range(3):
            for (w1, w2), c in cop[k].terms.items():
                s = qd.antipode(env.element({w1: ONE}))
                for kk in range(3 - k):
                    out[k + kk] = out[k + kk] + (s[kk] * env.element({w2: ONE})).scale(c)
        assert out[0] == env.one().scale(counit0(x))
        assert out[1].is_zero() and out[2].is_zero()


def test_rmatrix_leading_and_abelian_exponential():
    qz = quantization("abelian2")
    qd = qz.quantized_double
    env = qz.d.env
    r = EnvTensor(env, 2, {((i,), (j,)): v for (i, j), v in qz.d.r.items()})
    assert qd.R[1] == r
    assert qd.R[2] == tensor_multiply(r, r).scale(Q(1, 2))


# -- the intertwiner product ---------------------------------------------------------

def test_product_abelian_is_classical():
    qz = quantization("abelian3")
    x = qz.env_a.element({(0, 2): ONE})
    y = qz.env_a.element({(1,): ONE})
    prod = qz.ek_product(x, y)
    assert prod[0] == x * y and prod[1].is_zero() and prod[2].is_zero()


def test_product_no_first_order_term():
    for name in ("axb", "delta2", "heis3r"):
        qz = quantization(name)
        for p, q in itertools.product(range(qz.a.dim), repeat=2):
            prod = qz.ek_product(qz.env_a.gen(p), qz.env_a.gen(q))
            assert prod[1].is_zero()


def test_product_generator_pairs_match_closed_form():
    for name in ("axb", "delta2", "axb_tri", "heis3r"):
        qz = quantization(name)
        for p, q in itertools.product(range(qz.a.dim), repeat=2):
            prod = qz.ek_product(qz.env_a.gen(p), qz.env_a.gen(q))
            assert prod[0] == qz.env_a.gen(p) * qz.env_a.gen(q)
            assert prod[2] == h2_product_formula(qz.a, p, q, qz.env_a), (name, p, q)


def test_axb_squared_cancellation():
    qz = quantization("axb")
    prod = qz.ek_product(qz.env_a.gen(1), qz.env_a.gen(1))
    assert prod[0].terms == {(1, 1): ONE}
    assert prod[1].is_zero() and prod[2].is_zero()


def test_h2_formula_examples():
    axb = catalog().bialgebras["axb"]
    assert h2_product_formula(axb, 1, 1).is_zero()      # the two sums cancel
    assert h2_product_formula(axb, 0, 0).is_zero()      # f_1 = 0
    assert h2_product_formula(axb, 0, 1).is_zero()
    heis = catalog().bialgebras["heis3r"]
    assert h2_product_formula(heis, 0, 1).terms == {(2, 2, 2): Q(1, 24)}
    assert h2_product_formula(heis, 1, 0).terms == {(2, 2, 2): Q(-1, 24)}
    ab = catalog().bialgebras["abelian2"]
    assert h2_product_formula(ab, 0, 1).is_zero()


def test_product_unit_laws():
    qz = quantization("heis3r")
    one = qz.env_a.one()
    for p in range(qz.a.dim):
        x = qz.env_a.gen(p)
        left = qz.ek_product(one, x)
        right = qz.ek_product(x, one)
        assert left[0] == x and right[0] == x
        assert all(left[k].is_zero() and right[k].is_zero() for k in (1, 2))


# -- the intertwiner coproduct --------------------------------------------------------

def test_coproduct_classical_term():
    for name in ("axb", "heis3r"):
        qz = quantization(name)
        for p in range(qz.a.dim):
            cop = qz.ek_coproduct(qz.env_a.gen(p))
            assert cop[0] == delta0(qz.env_a.gen(p), 2)


def test_coproduct_abelian_is_primitive_exactly():
    qz = quantization("abelian2")
    for p in range(2):
        cop = qz.ek_coproduct(qz.env_a.gen(p))
        assert cop[0] == delta0(qz.env_a.gen(p), 2)
        assert cop[1].is_zero() and cop[2].is_zero()


def test_coproduct_quasiclassical_limit():
    for name in ("axb", "delta2", "axb_tri", "heis3r"):
        qz = quantization(name)
        for p in range(qz.a.dim):
            cop = qz.ek_coproduct(qz.env_a.gen(p))
            anti = cop[1] - cop[1].flip()
            want = {((j,), (k,)): v for (i, j, k), v in qz.a.f.items() if i == p}
            assert dict(anti.terms) == {k: v for k, v in want.items() if v != 0}


# -- the endomorphism picture and the polarized R-matrix -------------------------------

def test_part1_endomorphism_checks():
    assert part1_product_check(catalog().bialgebras["axb"]) == []
    assert part1_product_check(catalog().bialgebras["delta2"]) == []


def test_m_minus_unit_datum_is_identity():
    from ekq.verma import register_double
    d = register_double(build_double(catalog().bialgebras["axb"]))
    model = EndoModel(d)
    endo = model.m_minus({(): ONE})
    basis = [((), ()), (((2,), ())), ((), (0,)), ((2,), (1,))]
    for key in basis:
        images = endo.apply({key: ONE})
        assert images[0] == {key: ONE}
        assert not images[1] and not images[2]


def test_polarized_R_equals_R_on_small_doubles():
    for name in ("abelian1", "abelian2", "axb", "delta2", "axb_tri"):
        qz = quantization(name)
        polarized, R = polarize_R(qz.quantized_double)
        for k in range(3):
            assert (polarized[k] - R[k]).is_zero(), (name, k)


def test_polarized_R_first_order_is_r():
    qz = quantization("axb")
    polarized, _ = polarize_R(qz.quantized_double)
    env = qz.d.env
    r = EnvTensor(env, 2, {((i,), (j,)): v for (i, j), v in qz.d.r.items()})
    assert polarized[1] == r
