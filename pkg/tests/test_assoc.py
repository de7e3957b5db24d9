import itertools
from fractions import Fraction as Q

import pytest

from ekq.assoc import (
    AssocError,
    Component,
    SlotSpace,
    SlotVector,
    braid,
    braid_gamma,
    diagonal_act,
    evaluate_duals,
    exp_insert,
    grouped_pairs,
    hexagon_residuals,
    omega_insert,
    pentagon_residual,
    phi_apply,
    require_order,
    swap_slots,
    generated_vectors,
    unit_vector,
)
from ekq.bialg import catalog
from ekq.manin import build_double

ONE = Q(1)


def axb_double():
    return build_double(catalog().bialgebras["axb"])


def test_order_guard():
    require_order(3)
    with pytest.raises(AssocError):
        require_order(4)
    with pytest.raises(AssocError):
        require_order(0)


def test_omega_annihilates_isotropic_pairs():
    d = axb_double()
    # on 1+ (x) 1+ and on 1- (x) 1-
    for kinds in (("mp", "mp"), ("mm", "mm")):
        v = unit_vector(SlotSpace(d, kinds))
        assert omega_insert(v, 0, 1).is_zero()


def test_omega_23_on_vacuum_four_slots():
    # Omega on (1+, 1-) keeps only the b (x) a part
    d = axb_double()
    space = SlotSpace(d, ("mp", "mp", "mm", "mm"))
    v = omega_insert(unit_vector(space), 1, 2)
    expect = {((), (k + d.n,), (k,), ()): ONE for k in range(d.n)}
    assert v.comps[0].terms == expect


def test_omega_commutes_with_diagonal_action():
    for name in ("axb", "heis3r"):
        d = build_double(catalog().bialgebras[name])
        space = SlotSpace(d, ("mp", "mm"))
        for gen in range(d.dim):
            for vec in generated_vectors(space, max_insertions=1):
                lhs = diagonal_act(omega_insert(vec, 0, 1), gen)
                rhs = omega_insert(diagonal_act(vec, gen), 0, 1)
                assert (lhs - rhs).is_zero()


def test_grouped_pairs_expansion():
    assert grouped_pairs((0,), (1, 2)) == [(0, 1), (0, 2)]
    assert grouped_pairs((0, 1), (2,)) == [(0, 2), (1, 2)]
    with pytest.raises(AssocError):
        grouped_pairs((0,), (0, 1))


def test_phi_fixes_triple_vacuum():
    d = axb_double()
    space = SlotSpace(d, ("mp", "mp", "mp"))
    v = unit_vector(space)
    assert (phi_apply(v, [(0,), (1,), (2,)]) - v).is_zero()


def test_phi_identity_on_abelian():
    d = build_double(catalog().bialgebras["abelian2"])
    space = SlotSpace(d, ("mp", "mm", "mm"))
    for v in generated_vectors(space):
        assert (phi_apply(v, [(0,), (1,), (2,)]) - v).is_zero()


def test_phi_inverse_contract():
    d = axb_double()
    space = SlotSpace(d, ("mp", "mm", "mm"))
    for v in generated_vectors(space, max_insertions=1):
        w = phi_apply(phi_apply(v, [(0,), (1,), (2,)]), [(0,), (1,), (2,)], inverse=True)
        assert (w - v).is_zero()


def test_singleton_partition_relabels():
    d = axb_double()
    space = SlotSpace(d, ("mp", "mm", "mm"))
    v = generated_vectors(space, max_insertions=1)[3]
    assert (phi_apply(v, [(0,), (1,), (2,)]) -
            phi_apply(v, [(0,), (1,), (2,)])).is_zero()


def test_braid_on_plus_vacuum_is_swap_only():
    d = axb_double()
    space = SlotSpace(d, ("mp", "mp"))
    v = unit_vector(space)
    b = braid(v, 0)
    assert b.comps[0].terms == {((), ()): ONE}
    assert b.comps[1].is_zero() and b.comps[2].is_zero()


def test_braid_then_gamma_is_identity():
    d = axb_double()
    space = SlotSpace(d, ("mp", "mm"))
    for v in generated_vectors(space, max_insertions=2)[:40]:
        assert (braid_gamma(braid(v, 0), 0) - v).is_zero()


def test_braid_intertwines_the_action():
    # beta o (x acting) = (x acting in swapped order) o beta, exactly in h
    d = axb_double()
    space = SlotSpace(d, ("mp", "mm"))
    for gen in range(d.dim):
        for v in generated_vectors(space, max_insertions=1):
            lhs = braid(diagonal_act(v, gen), 0)
            rhs = diagonal_act(braid(v, 0), gen)
            assert (lhs - rhs).is_zero()


def test_swap_slots_moves_kinds():
    d = axb_double()
    space = SlotSpace(d, ("mp", "mm"))
    v = unit_vector(space)
    w = swap_slots(v, 0, 1)
    assert w.space.kinds == ("mm", "mp")


def test_pentagon_and_hexagons_on_catalog():
    for name, g in catalog().bialgebras.items():
        d = build_double(g)
        assert pentagon_residual(d) == [], name
        h1, h2 = hexagon_residuals(d)
        assert h1 == [] and h2 == [], name


def test_pentagon_abelian_identically_zero():
    d = build_double(catalog().bialgebras["abelian3"])
    assert pentagon_residual(d) == []
    assert hexagon_residuals(d) == ([], [])


def test_dual_slot_bound_is_enforced():
    d = axb_double()
    space = SlotSpace(d, ("dual", "mm"))
    v = unit_vector(space, bounds=(0, None))
    from ekq.verma import DegreeBoundError
    with pytest.raises(DegreeBoundError):
        omega_insert(v, 0, 1)


def test_evaluate_duals_projects_vacuum_component():
    d = axb_double()
    space = SlotSpace(d, ("dual", "mm"))
    comps = [Component((1, None), {((), (0,)): ONE, ((d.n,), (1,)): Q(2)}),
             Component((1, None), {}), Component((1, None), {})]
    v = SlotVector(space, tuple(comps))
    ev = evaluate_duals(v)
    assert ev[0] == {((0,),): ONE}
