import itertools
import json
from fractions import Fraction as Q

import pytest

from ekq.bialg import (
    BialgebraError,
    catalog,
    check_lie_bialgebra,
    coboundary_from_r,
    dualize,
    from_json,
    make_bialgebra,
    make_hom,
    to_json,
)

ONE = Q(1)

AXB_C = {(0, 1, 1): ONE, (1, 0, 1): -ONE}
AXB_F = {(1, 0, 1): ONE, (1, 1, 0): -ONE}


def brute_force_axioms(dim, c, f):
    """Independent oracle: expand the four identity families over index tuples."""
    get = lambda table, *idx: table.get(tuple(idx), Q(0))
    for i, j, k in itertools.product(range(dim), repeat=3):
        if get(c, i, j, k) + get(c, j, i, k) != 0:
            return False
        if get(f, i, j, k) + get(f, i, k, j) != 0:
            return False
    for i, j, k, m in itertools.product(range(dim), repeat=4):
        total = Q(0)
        for x, y, z in ((i, j, k), (j, k, i), (k, i, j)):
            total += sum(get(c, x, y, t) * get(c, t, z, m) for t in range(dim))
        if total != 0:
            return False
        total = Q(0)
        for x, y, z in ((i, j, k), (j, k, i), (k, i, j)):
            total += sum(get(f, t, x, y) * get(f, m, t, z) for t in range(dim))
        if total != 0:
            return False
    for i, j, p, q in itertools.product(range(dim), repeat=4):
        lhs = sum(get(c, i, j, t) * get(f, t, p, q) for t in range(dim))
        rhs = Q(0)
        for t in range(dim):
            rhs += get(f, j, t, q) * get(c, i, t, p) + get(f, j, p, t) * get(c, i, t, q)
            rhs -= get(f, i, t, q) * get(c, j, t, p) + get(f, i, p, t) * get(c, j, t, q)
        if lhs != rhs:
            return False
    return True


def test_abelian_is_valid():
    assert check_lie_bialgebra(3, {}, {}).valid


def test_axb_is_valid_by_independent_expansion():
    assert brute_force_axioms(2, AXB_C, AXB_F)
    assert check_lie_bialgebra(2, AXB_C, AXB_F).valid


def test_symmetric_cobracket_is_rejected_with_witness():
    report = check_lie_bialgebra(1, {}, {(0, 0, 0): ONE})
    assert not report.valid
    v = report.violations[0]
    assert v.family == "cobracket-antisymmetry"
    assert v.indices == (0, 0, 0)
    assert v.residual == 2


def test_broken_jacobi_is_reported():
    # [e1,e2] = e3 and [e1,e3] = e1: the cyclic sum on (1,2,3) leaves -e3
    c = {(0, 1, 2): ONE, (1, 0, 2): -ONE,
         (0, 2, 0): ONE, (2, 0, 0): -ONE}
    report = check_lie_bialgebra(3, c, {})
    assert not report.valid
    assert any(v.family == "jacobi" for v in report.violations)


def test_check_agrees_with_brute_force_on_catalog():
    for g in catalog().bialgebras.values():
        assert brute_force_axioms(g.dim, g.c, g.f)


# -- duality -------------------------------------------------------------------

def test_dualize_abelian():
    g = make_bialgebra(2, {}, {})
    gd = dualize(g)
    assert gd.c == {} and gd.f == {}


def test_dualize_axb_swaps_tables():
    g = make_bialgebra(2, AXB_C, AXB_F)
    gd = dualize(g)
    assert gd.c == {(0, 1, 1): ONE, (1, 0, 1): -ONE}
    assert gd.f == {(1, 0, 1): ONE, (1, 1, 0): -ONE}
    assert check_lie_bialgebra(2, gd.c, gd.f).valid


def test_dualize_is_an_involution_on_catalog():
    for g in catalog().bialgebras.values():
        gdd = dualize(dualize(g))
        assert gdd.c == g.c and gdd.f == g.f


def test_dual_validity_tracks_validity():
    for g in catalog().bialgebras.values():
        gd = dualize(g)
        assert check_lie_bialgebra(gd.dim, gd.c, gd.f).valid


def test_dualize_rejects_invalid_input():
    bad = make_bialgebra(2, {}, {}).__class__(1, ("x",), {}, {(0, 0, 0): ONE})
    with pytest.raises(BialgebraError):
        dualize(bad)


# -- coboundaries ----------------------------------------------------------------

def test_coboundary_of_zero_is_cocommutative():
    g = coboundary_from_r(2, AXB_C, {})
    assert g.f == {}
    assert g.c == AXB_C


def test_coboundary_axb_expansion():
    # [a2 (x) 1 + 1 (x) a2, a1 ^ a2] expanded entrywise by hand:
    # ad_{a2}(a1) = -a2, so delta(a2) = -a2 ^ a2 ... term by term it is
    # [a2, a1] (x) a2 + a1 (x) [a2, a2] - [a2, a2] (x) a1 - a2 (x) [a2, a1]
    # = -a2 (x) a2 + a2 (x) a2 = 0, and delta(a1) = a1 ^ a2.
    r = {(0, 1): ONE, (1, 0): -ONE}
    g = coboundary_from_r(2, AXB_C, r)
    assert g.f == {(0, 0, 1): ONE, (0, 1, 0): -ONE}


def test_coboundary_passes_bialgebra_check():
    r = {(0, 1): ONE, (1, 0): -ONE}
    g = coboundary_from_r(3, {(0, 1, 2): ONE, (1, 0, 2): -ONE}, r)
    assert check_lie_bialgebra(g.dim, g.c, g.f).valid


def test_coboundary_rejects_non_antisymmetric_r():
    with pytest.raises(BialgebraError):
        coboundary_from_r(2, AXB_C, {(0, 1): ONE})


def test_coboundary_rejects_broken_jacobi():
    c = {(0, 1, 2): ONE, (1, 0, 2): -ONE,
         (0, 2, 0): ONE, (2, 0, 0): -ONE}
    with pytest.raises(BialgebraError):
        coboundary_from_r(3, c, {})


def test_triangular_flag_rejects_nonvanishing_obstruction():
    heis = {(0, 1, 2): ONE, (1, 0, 2): -ONE}
    r = {(0, 1): ONE, (1, 0): -ONE}
    coboundary_from_r(3, heis, r)  # fine: obstruction invariant
    with pytest.raises(BialgebraError):
        coboundary_from_r(3, heis, r, require_triangular=True)


# -- catalog and homs -------------------------------------------------------------

def test_catalog_contents():
    cat = catalog()
    assert {"abelian1", "abelian2", "abelian3", "axb", "axb_dual",
            "delta2", "axb_tri", "heis3r"} <= set(cat.bialgebras)
    assert cat.bialgebras["abelian2"].c == {} and cat.bialgebras["abelian2"].f == {}
    axb = cat.bialgebras["axb"]
    assert axb.c == AXB_C and axb.f == AXB_F
    for g in cat.bialgebras.values():
        assert check_lie_bialgebra(g.dim, g.c, g.f).valid
    assert len(cat.homs) >= 1


def test_catalog_homs_intertwine_structures():
    cat = catalog()
    for hom in cat.homs.values():
        assert hom.check() == []


def test_make_hom_rejects_non_homomorphisms():
    cat = catalog()
    axb = cat.bialgebras["axb"]
    with pytest.raises(BialgebraError):
        make_hom(cat.bialgebras["abelian1"], axb, [[0], [1]])  # a2 has delta != 0


# -- JSON ----------------------------------------------------------------------

def test_json_roundtrip():
    for g in catalog().bialgebras.values():
        again = from_json(json.loads(json.dumps(to_json(g))))
        assert again.c == g.c and again.f == g.f and again.names == g.names


def test_json_auto_antisymmetrize():
    data = {"dim": 2, "basis": ["a1", "a2"],
            "bracket": [{"i": 1, "j": 2, "k": 2, "coeff": "1"}],
            "cobracket": [{"i": 2, "j": 1, "k": 2, "coeff": "1"}],
            "auto_antisymmetrize": True}
    g = from_json(data)
    assert g.c == AXB_C and g.f == AXB_F


def test_json_without_flag_requires_both_orientations():
    data = {"dim": 2,
            "bracket": [{"i": 1, "j": 2, "k": 2, "coeff": "1"}],
            "cobracket": []}
    with pytest.raises(BialgebraError):
        from_json(data)


def test_json_ragged_tables_error():
    with pytest.raises(BialgebraError):
        from_json({"dim": 2, "bracket": [{"i": 1, "j": 5, "k": 1, "coeff": "1"}],
                   "cobracket": []})
