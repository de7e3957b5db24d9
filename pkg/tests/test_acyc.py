import itertools
from fractions import Fraction as Q

import pytest

from ekq.acyc import (
    AcyclicError,
    Compose,
    Identity,
    LinComb,
    Perm,
    Primitive,
    Tensor,
    arity,
    evaluate,
    format_expr,
    functoriality_check,
    naturality_defects,
    parse,
    universal_bank,
    universal_h2_product,
)
from ekq.bialg import catalog
from ekq.kernel import SparseTensor, compose_tensors, tensor_product
from ekq.quantize import h2_product_formula
from ekq.ybq import check_assoc_cybe, matrix_algebra

ONE = Q(1)


# -- parsing and arities -----------------------------------------------------------

def test_parse_bracket_swap():
    e = parse("comp(mu, perm[2 1])")
    assert e == Compose((Primitive("mu"), Perm((1, 0))))
    assert arity(e, "lba") == (2, 1)


def test_parse_tensor_arity():
    e = parse("tensor(id1, delta)")
    assert arity(e, "lba") == (2, 3)


def test_parse_nested_bracket():
    e = parse("comp(mu, tensor(mu, id1))")
    assert arity(e, "lba") == (3, 1)


def test_parse_sum_with_rationals():
    e = parse("sum(1/2*perm[1 2], -1/2*perm[2 1])")
    assert isinstance(e, LinComb)
    assert e.terms[0][0] == Q(1, 2) and e.terms[1][0] == Q(-1, 2)


def test_parse_syntax_error_position():
    with pytest.raises(AcyclicError):
        parse("comp(mu,")
    with pytest.raises(AcyclicError):
        parse("frob")


def test_arity_mismatch_rejected():
    with pytest.raises(AcyclicError):
        parse("comp(mu, delta, delta)")  # feeding 2 outputs into ... mismatch
    with pytest.raises(AcyclicError):
        parse("sum(1*mu, 1*delta)")


def test_print_parse_roundtrip_on_bank():
    for name, (sig, e) in universal_bank().items():
        assert parse(format_expr(e), sig) == e, name


def test_signature_guards():
    with pytest.raises(AcyclicError):
        parse("delta", "cyba")
    with pytest.raises(AcyclicError):
        arity(Primitive("mu"), "nope")


# -- evaluation ---------------------------------------------------------------------

def test_bracket_antisymmetry_evaluates_to_zero():
    e = parse("sum(1*comp(mu, perm[2 1]), 1*mu)")
    for g in catalog().bialgebras.values():
        assert evaluate(e, g, "lba").is_zero()


def test_cocycle_expression_vanishes_on_catalog():
    sig, e = universal_bank()["cocycle"]
    for g in catalog().bialgebras.values():
        assert evaluate(e, g, sig).is_zero()


def test_cocycle_expression_detects_non_bialgebras():
    from ekq.bialg import LieBialgebra
    # delta(x) = x (x) x on [x, y] = y: the defect at (y, x) is y(x)x + x(x)y
    bad = LieBialgebra(2, ("x", "y"),
                       {(0, 1, 1): ONE, (1, 0, 1): -ONE},
                       {(0, 0, 0): ONE})
    sig, e = universal_bank()["cocycle"]
    tensor = evaluate(e, bad, sig)
    assert not tensor.is_zero()
    # at inputs (x, y): delta(y) - ad_x delta(y) + ad_y delta(x) = -(x(x)y + y(x)x)
    assert tensor.entries[(0, 1, 0, 1)] == -ONE
    assert tensor.entries[(0, 1, 1, 0)] == -ONE


def test_cybe_expression_matches_direct_residual():
    M2 = matrix_algebra(2)
    E = {(p, q): p * 2 + q for p in range(2) for q in range(2)}
    fixtures = [
        {},
        {(E[(0, 1)], E[(0, 1)]): ONE},
        {(E[(0, 0)], E[(0, 1)]): ONE, (E[(0, 1)], E[(0, 0)]): -ONE},
        {(E[(0, 1)], E[(0, 0)]): ONE},
    ]
    sig, e = universal_bank()["cybe"]
    for r in fixtures:
        tensor = evaluate(e, (M2, r), sig)
        assert dict(tensor.entries) == check_assoc_cybe(M2, r)


def test_evaluator_is_compositional():
    g = catalog().bialgebras["heis3r"]
    dim = g.dim
    mu = evaluate(Primitive("mu"), g, "lba")
    delta = evaluate(Primitive("delta"), g, "lba")
    e = Compose((Primitive("mu"), Primitive("delta")))
    assert evaluate(e, g, "lba") == compose_tensors(mu, delta)
    e2 = Tensor((Primitive("mu"), Primitive("delta")))
    assert evaluate(e2, g, "lba") == tensor_product(mu, delta)
    e3 = LinComb(((Q(2), Primitive("mu")), (Q(-1), Primitive("mu"))))
    assert evaluate(e3, g, "lba") == mu


def test_sym2_is_the_symmetrizer():
    g = catalog().bialgebras["abelian2"]
    sig, e = universal_bank()["sym2"]
    t = evaluate(e, g, sig)
    # (e0 (x) e1) -> (1/2)(e0 (x) e1 + e1 (x) e0)
    assert t.entries[(0, 1, 0, 1)] == Q(1, 2)
    assert t.entries[(0, 1, 1, 0)] == Q(1, 2)


# -- the universal product correction ---------------------------------------------------

def test_mu2_on_abelian_is_zero():
    g = catalog().bialgebras["abelian2"]
    for name in ("mu2_11_s2", "mu2_11_s3"):
        sig, e = universal_bank()[name]
        assert evaluate(e, g, sig).is_zero()


def test_mu2_axb_cancellation():
    g = catalog().bialgebras["axb"]
    assert universal_h2_product(g, 1, 1).is_zero()


def test_mu2_equals_contraction_on_catalog():
    for name, g in catalog().bialgebras.items():
        for p, q in itertools.product(range(g.dim), repeat=2):
            assert dict(universal_h2_product(g, p, q).terms) == \
                dict(h2_product_formula(g, p, q).terms), (name, p, q)


# -- naturality and functoriality ---------------------------------------------------------

def test_bank_expressions_are_natural():
    cat = catalog()
    bank = universal_bank()
    for hom in cat.homs.values():
        for name, (sig, e) in bank.items():
            if sig != "lba":
                continue
            assert naturality_defects(hom, e, sig) == [], name


def test_functoriality_identity_hom():
    assert functoriality_check(catalog().homs["id_axb"]) == []


def test_functoriality_inclusions_and_zero_map():
    cat = catalog()
    for name in ("incl_abelian1_axb", "incl_abelian1_heis3r", "zero_axb_abelian2"):
        assert functoriality_check(cat.homs[name]) == [], name
