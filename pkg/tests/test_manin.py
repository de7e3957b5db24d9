import itertools
from fractions import Fraction as Q

import pytest

from ekq.bialg import catalog, make_bialgebra
from ekq.manin import (
    DoubleError,
    build_double,
    canonical_r,
    check_cybe,
    cybe_residual,
    double_as_bialgebra,
    two_tensor,
)
from ekq.pbw import EnvAlgebra, EnvTensor

ONE = Q(1)


def names_of(d):
    return d.env.names


def bracket_table(d):
    return {(names_of(d)[i], names_of(d)[j]): {names_of(d)[k]: v for k, v in row.items()}
            for (i, j), row in sorted(d.structure.items())}


def test_abelian_double():
    d = build_double(catalog().bialgebras["abelian1"])
    assert d.dim == 2
    assert d.structure == {}
    assert d.pairing[0][1] == ONE and d.pairing[1][0] == ONE
    assert d.pairing[0][0] == 0 and d.pairing[1][1] == 0


def test_axb_double_mixed_brackets():
    # substitute c, f into the three bracket families
    d = build_double(catalog().bialgebras["axb"])
    t = bracket_table(d)
    assert ("a1", "b1") not in t                      # [a1, b1] = 0
    assert t[("a1", "b2")] == {"b2": -ONE}            # [a1, b2] = -b2
    assert t[("a2", "b1")] == {"a2": ONE}             # [a2, b1] = a2
    assert t[("a2", "b2")] == {"a1": -ONE, "b1": ONE}  # [a2, b2] = -a1 + b1
    assert t[("b1", "b2")] == {"b2": ONE}             # [b1, b2] = b2


def jacobi_residual(d):
    """Independent brute-force Jacobi residual over all basis triples."""
    worst = {}
    for i, j, k in itertools.product(range(d.dim), repeat=3):
        acc = {}
        for x, y, z in ((i, j, k), (j, k, i), (k, i, j)):
            for t, v in d.bracket(x, y).items():
                for m, w in d.bracket(t, z).items():
                    acc[m] = acc.get(m, Q(0)) + v * w
        acc = {m: v for m, v in acc.items() if v != 0}
        if acc:
            worst[(i, j, k)] = acc
    return worst


def test_axb_double_jacobi_brute_force():
    assert jacobi_residual(build_double(catalog().bialgebras["axb"])) == {}


def test_catalog_doubles_jacobi_brute_force():
    for g in catalog().bialgebras.values():
        assert jacobi_residual(build_double(g)) == {}


def test_build_double_rejects_invalid_bialgebra():
    from ekq.bialg import LieBialgebra
    bad = LieBialgebra(1, ("x",), {}, {(0, 0, 0): ONE})
    with pytest.raises(Exception):
        build_double(bad)


def test_pairing_invariance_and_omega():
    for g in catalog().bialgebras.values():
        d = build_double(g)
        # omega = r + r^op
        omega = dict(d.r)
        for (i, j), v in d.r.items():
            omega[(j, i)] = omega.get((j, i), Q(0)) + v
        assert omega == d.omega


def test_double_of_dual_is_basis_swap():
    from ekq.bialg import dualize
    for g in catalog().bialgebras.values():
        d = build_double(g)
        dd = build_double(dualize(g))
        n = g.dim

        def swap(i):
            return i + n if i < n else i - n

        for (i, j), row in d.structure.items():
            swapped = {swap(k): v for k, v in row.items()}
            assert dd.structure.get((swap(i), swap(j)), {}) == swapped
        for i, j in itertools.product(range(d.dim), repeat=2):
            assert d.pairing[i][j] == dd.pairing[swap(i)][swap(j)]


# -- the canonical element ---------------------------------------------------

def test_canonical_r_shape():
    d = build_double(catalog().bialgebras["abelian1"])
    assert canonical_r(d).terms == {((0,), (1,)): ONE}
    d2 = build_double(catalog().bialgebras["abelian2"])
    assert canonical_r(d2).terms == {((0,), (2,)): ONE, ((1,), (3,)): ONE}


def test_canonical_r_is_identity_operator():
    # (1 (x) <., x>)(r) = x for x in the a-side
    for g in catalog().bialgebras.values():
        d = build_double(g)
        for x in range(g.dim):
            contracted = {}
            for (i, j), v in d.r.items():
                coeff = d.pairing[j][x]
                if coeff != 0:
                    contracted[i] = contracted.get(i, Q(0)) + v * coeff
            assert contracted == {x: ONE}


def test_cybe_for_canonical_r():
    for g in catalog().bialgebras.values():
        d = build_double(g)
        assert check_cybe(canonical_r(d), d).is_zero()


def test_cybe_abelian_any_r():
    d = build_double(catalog().bialgebras["abelian2"])
    r = two_tensor(d, {(0, 1): Q(5), (2, 3): Q(-7, 2)})
    assert check_cybe(r, d).is_zero()


def test_cybe_sl2_type_counterexample():
    # [H,E] = 2E, [E,F] = H, [H,F] = -2F; r = E (x) H has residual 2 E (x) E (x) H
    E, F, H = 0, 1, 2
    table = {
        (H, E): {E: Q(2)}, (E, H): {E: Q(-2)},
        (H, F): {F: Q(-2)}, (F, H): {F: Q(2)},
        (E, F): {H: ONE}, (F, E): {H: -ONE},
    }
    sl2 = EnvAlgebra(3, table, ("E", "F", "H"))
    r = EnvTensor(sl2, 2, {((E,), (H,)): ONE})
    residual = cybe_residual(r)
    assert residual.terms == {((E,), (E,), (H,)): Q(2)}


def test_delta_g_is_coboundary_of_r():
    for g in catalog().bialgebras.values():
        d = build_double(g)
        for x in range(d.dim):
            got = {}
            for (p, q), v in d.r.items():
                for k, w in d.bracket(x, p).items():
                    got[(k, q)] = got.get((k, q), Q(0)) + v * w
                for k, w in d.bracket(x, q).items():
                    got[(p, k)] = got.get((p, k), Q(0)) + v * w
            got = {k: v for k, v in got.items() if v != 0}
            assert got == d.cobracket(x)


def test_double_as_bialgebra_is_quasitriangular_shape():
    gb, r = double_as_bialgebra(build_double(catalog().bialgebras["axb"]))
    assert gb.dim == 4
    assert r == {(0, 2): ONE, (1, 3): ONE}
