"""The verification suite behind ``ekq selftest`` and the acceptance tests.

Each check function returns a list of human-readable defect strings (empty
means pass) and is exact: a check passes only when every residual it
computes is identically zero at the truncation order.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .acyc import functoriality_check, universal_bank, universal_h2_product, evaluate
from .assoc import hexagon_residuals, pentagon_residual
from .bialg import Catalog, catalog, check_lie_bialgebra, dualize
from .kernel import DEFAULT_ORDER, HSeries, Q, series_mul
from .manin import build_double, canonical_r, check_cybe
from .pbw import (
    EnvTensor,
    antipode0,
    counit0,
    delta0,
    element_series,
    tensor_multiply,
    tensor_of,
    tensor_one,
)
from .quantize import (
    Quantization,
    QuantizedDouble,
    h2_product_formula,
    part1_product_check,
    polarize_R,
)
from .verma import invariance_defect, solve_psi
from .ybq import (
    check_assoc_cybe,
    matrix_algebra,
    qybe_residual,
    quantize_r,
    unitarity_residual,
)


@dataclass
class CheckResult:
    name: str
    identity: str
    defects: list
    seconds: float

    @property
    def passed(self) -> bool:
        return not self.defects


@dataclass
class Suite:
    order: int = DEFAULT_ORDER
    results: list = field(default_factory=list)

    def run(self, name: str, identity: str, fn) -> CheckResult:
        start = time.perf_counter()
        defects = fn()
        result = CheckResult(name, identity, list(defects),
                             time.perf_counter() - start)
        self.results.append(result)
        return result

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)


def _words(dim: int, max_len: int):
    for length in range(max_len + 1):
        yield from itertools.combinations_with_replacement(range(dim), length)


_QUANTIZATIONS: dict[str, Quantization] = {}


def _quantization(cat: Catalog, name: str) -> Quantization:
    q = _QUANTIZATIONS.get(name)
    if q is None:
        q = Quantization(cat.bialgebras[name])
        _QUANTIZATIONS[name] = q
    return q


# -- criterion 1: the closed-form h^2 product coefficient, three ways --------

def check_appendix_product(cat: Catalog) -> list[str]:
    defects = []
    for name, g in sorted(cat.bialgebras.items()):
        qz = _quantization(cat, name)
        for p in range(g.dim):
            for q in range(g.dim):
                x, y = qz.env_a.gen(p), qz.env_a.gen(q)
                prod = qz.ek_product(x, y)
                if prod[0] != x * y:
                    defects.append(f"{name}({p},{q}): classical term wrong")
                    continue
                if not prod[1].is_zero():
                    defects.append(f"{name}({p},{q}): nonzero h^1 term")
                direct = h2_product_formula(g, p, q, qz.env_a)
                universal = universal_h2_product(g, p, q, qz.env_a)
                if prod[2] != direct:
                    defects.append(f"{name}({p},{q}): pipeline h^2 != contraction")
                if dict(universal.terms) != dict(direct.terms):
                    defects.append(f"{name}({p},{q}): expression bank h^2 != contraction")
    return defects


# -- criterion 2: the Hopf suite on the quantized double ---------------------

def _hopf_defects(qd: QuantizedDouble, max_degree: int = 2) -> list[str]:
    env = qd.d.env
    order = qd.order
    words = list(_words(env.dim, max_degree))
    defects = []

    def coproduct3(first: bool, w):
        cop = qd.coproduct_word(w)
        out = [EnvTensor(env, 3, {}) for _ in range(order)]
        for k in range(order):
            for (w1, w2), c in cop[k].terms.items():
                inner = qd.coproduct(env.element({w1 if first else w2: Q(1)}))
                for kk in range(order - k):
                    for (u1, u2), cc in inner[kk].terms.items():
                        key = (u1, u2, w2) if first else (w1, u1, u2)
                        out[k + kk] = out[k + kk] + EnvTensor(env, 3, {key: c * cc})
        return out

    for w in words:
        lhs = coproduct3(True, w)
        rhs = coproduct3(False, w)
        if any((lhs[k] - rhs[k]).terms for k in range(order)):
            defects.append(f"coassociativity fails at {w}")

    for w in words:
        cop = qd.coproduct_word(w)
        for k in range(order):
            left = env.zero()
            right = env.zero()
            for (w1, w2), c in cop[k].terms.items():
                left = left + env.element({w2: Q(1)}).scale(
                    c * counit0(env.element({w1: Q(1)})))
                right = right + env.element({w1: Q(1)}).scale(
                    c * counit0(env.element({w2: Q(1)})))
            want = env.element({w: Q(1)}) if k == 0 else env.zero()
            if left != want or right != want:
                defects.append(f"counit axiom fails at {w}")
                break

    cops = {w: qd.coproduct_word(w) for w in words}
    for wx in words:
        x = env.element({wx: Q(1)})
        for wy in words:
            y = env.element({wy: Q(1)})
            lhs = qd.coproduct_series(series_mul(
                element_series(order, x), element_series(order, y), lambda a, b: a * b))
            rhs = series_mul(cops[wx], cops[wy], tensor_multiply)
            if any((lhs[k] - rhs[k]).terms for k in range(order)):
                defects.append(f"multiplicativity fails at ({wx}, {wy})")

    for w in words:
        cop = qd.coproduct_word(w)
        out = [env.zero() for _ in range(order)]
        for k in range(order):
            for (w1, w2), c in cop[k].terms.items():
                s1 = qd.antipode(env.element({w1: Q(1)}))
                for kk in range(order - k):
                    out[k + kk] = out[k + kk] + (s1[kk] * env.element({w2: Q(1)})).scale(c)
        eps = counit0(env.element({w: Q(1)}))
        want0 = env.one().scale(eps)
        if out[0] != want0 or any(not out[k].is_zero() for k in range(1, order)):
            defects.append(f"antipode axiom fails at {w}")
    return defects


def check_hopf_suite(cat: Catalog) -> list[str]:
    defects = []
    for name in sorted(cat.bialgebras):
        qd = _quantization(cat, name).quantized_double
        defects.extend(f"{name}: {d}" for d in _hopf_defects(qd))
    return defects


# -- criterion 3: quasitriangularity ------------------------------------------

def _qt_defects(qd: QuantizedDouble, max_degree: int = 2) -> list[str]:
    env = qd.d.env
    order = qd.order
    d = qd.d
    defects = []
    R = qd.R
    one2 = tensor_one(env, 2)

    r_tensor = EnvTensor(env, 2, {((i,), (j,)): v for (i, j), v in d.r.items()})
    if R[0] != one2 or (order > 1 and R[1] != r_tensor):
        defects.append("R is not 1 + h r at low order")
    if qd.J[0] != one2 or (order > 1 and qd.J[1] != r_tensor.scale(Q(1, 2))):
        defects.append("J is not 1 + h r/2 at low order")

    for w in _words(env.dim, max_degree):
        x = env.element({w: Q(1)})
        cop = qd.coproduct(x)
        copop = cop.map(lambda t: t.flip())
        lhs = series_mul(R, cop, tensor_multiply)
        rhs = series_mul(copop, R, tensor_multiply)
        if any((lhs[k] - rhs[k]).terms for k in range(order)):
            defects.append(f"R Delta != Delta^op R at {w}")

    def cop_on_leg(first: bool):
        out = [EnvTensor(env, 3, {}) for _ in range(order)]
        for k in range(order):
            for (w1, w2), c in R[k].terms.items():
                inner = qd.coproduct(env.element({(w1 if first else w2): Q(1)}))
                for kk in range(order - k):
                    for (u1, u2), cc in inner[kk].terms.items():
                        key = (u1, u2, w2) if first else (w1, u1, u2)
                        out[k + kk] = out[k + kk] + EnvTensor(env, 3, {key: c * cc})
        return HSeries(tuple(out), order)

    R12 = R.map(lambda t: t.embed(3, (0, 1)))
    R13 = R.map(lambda t: t.embed(3, (0, 2)))
    R23 = R.map(lambda t: t.embed(3, (1, 2)))
    lhs = cop_on_leg(True)
    rhs = series_mul(R13, R23, tensor_multiply)
    if any((lhs[k] - rhs[k]).terms for k in range(order)):
        defects.append("(Delta x 1)(R) != R13 R23")
    lhs = cop_on_leg(False)
    rhs = series_mul(R13, R12, tensor_multiply)
    if any((lhs[k] - rhs[k]).terms for k in range(order)):
        defects.append("(1 x Delta)(R) != R13 R12")

    qybe_l = series_mul(series_mul(R12, R13, tensor_multiply), R23, tensor_multiply)
    qybe_r = series_mul(series_mul(R23, R13, tensor_multiply), R12, tensor_multiply)
    if any((qybe_l[k] - qybe_r[k]).terms for k in range(order)):
        defects.append("quantum Yang-Baxter equation fails")

    # invertibility and (counit x 1) R = 1
    from .kernel import series_inverse
    try:
        series_inverse(R, one2, tensor_multiply)
    except Exception:
        defects.append("R is not invertible at the truncation")
    for k in range(order):
        contracted = env.zero()
        for (w1, w2), c in R[k].terms.items():
            contracted = contracted + env.element({w2: Q(1)}).scale(
                c * counit0(env.element({w1: Q(1)})))
        want = env.one() if k == 0 else env.zero()
        if contracted != want:
            defects.append("(counit x 1) R != 1")
            break
    return defects


def check_quasitriangular(cat: Catalog) -> list[str]:
    defects = []
    for name in sorted(cat.bialgebras):
        qd = _quantization(cat, name).quantized_double
        defects.extend(f"{name}: {d}" for d in _qt_defects(qd))
    return defects


# -- criterion 4: quasiclassical limits ---------------------------------------

def check_quasiclassical(cat: Catalog) -> list[str]:
    defects = []
    for name, g in sorted(cat.bialgebras.items()):
        qz = _quantization(cat, name)
        qd = qz.quantized_double
        d = qz.d
        for x in range(d.dim):
            cop = qd.coproduct(d.env.gen(x))
            if cop[0] != delta0(d.env.gen(x), 2):
                defects.append(f"{name}: double coproduct classical term wrong at {x}")
            anti = cop[1] - cop[1].flip()
            want = {((j,), (k,)): v for (j, k), v in d.cobracket(x).items()}
            if dict(anti.terms) != want:
                defects.append(f"{name}: double quasiclassical limit wrong at {x}")
        for p in range(g.dim):
            x_elt = qz.env_a.gen(p)
            cop = qz.ek_coproduct(x_elt)
            if cop[0] != delta0(x_elt, 2):
                defects.append(f"{name}: coproduct classical term wrong at {p}")
            anti = cop[1] - cop[1].flip()
            want = {((j,), (k,)): v for (i, j, k), v in g.f.items() if i == p}
            if dict(anti.terms) != {k: v for k, v in want.items() if v != 0}:
                defects.append(f"{name}: quasiclassical limit wrong at {p}")
    return defects


# -- criterion 5: the classical Yang-Baxter equation for the canonical element

def check_canonical_cybe(cat: Catalog) -> list[str]:
    defects = []
    for name in sorted(cat.bialgebras):
        d = _quantization(cat, name).d
        residual = check_cybe(canonical_r(d), d)
        if not residual.is_zero():
            defects.append(f"{name}: canonical element violates the Yang-Baxter equation")
    return defects


# -- criterion 6: quantization of associative r-matrices ----------------------

def yang_baxter_fixtures():
    """Catalog of (name, algebra, r, unitary) fixtures over 2x2 matrices."""
    M2 = matrix_algebra(2)
    E = {(p, q): p * 2 + q for p in range(2) for q in range(2)}
    one = Q(1)
    fixtures = [
        ("zero", M2, {}, True),
        ("nilpotent", M2, {(E[(0, 1)], E[(0, 1)]): one}, False),
        ("axb_like", M2, {(E[(0, 0)], E[(0, 1)]): one,
                          (E[(0, 1)], E[(0, 0)]): -one}, True),
    ]
    unit_r = {}
    for i, v in enumerate(M2.unit):
        if v != 0:
            unit_r[(E[(0, 1)], i)] = v
            unit_r[(i, E[(0, 1)])] = -v
    fixtures.append(("unit_wedge", M2, unit_r, True))
    return fixtures


def check_yang_baxter_quantization() -> list[str]:
    defects = []
    for name, A, r, unitary in yang_baxter_fixtures():
        if check_assoc_cybe(A, r):
            defects.append(f"{name}: fixture violates the classical equation")
            continue
        R = quantize_r(A, r)
        if R[1] != {k: v for k, v in r.items() if v != 0}:
            defects.append(f"{name}: R != 1 + h r at first order")
        if any(qybe_residual(A, R).coeffs):
            defects.append(f"{name}: quantum Yang-Baxter residual nonzero")
        if unitary and any(unitarity_residual(A, R).coeffs):
            defects.append(f"{name}: R^op R != 1 for a unitary fixture")
        if name == "nilpotent" and R[2]:
            defects.append("nilpotent: R is not exactly 1 + h r")
    return defects


# -- criterion 7: polarization -------------------------------------------------

def check_polarization(cat: Catalog) -> list[str]:
    defects = []
    for name, g in sorted(cat.bialgebras.items()):
        if g.dim > 2:
            continue
        qd = _quantization(cat, name).quantized_double
        polarized, R = polarize_R(qd)
        if any((polarized[k] - R[k]).terms for k in range(qd.order)):
            defects.append(f"{name}: polarized R-matrix differs from R")
    return defects


# -- criterion 8: pentagon and hexagons ----------------------------------------

def check_pentagon_hexagons(cat: Catalog) -> list[str]:
    defects = []
    for name in sorted(cat.bialgebras):
        d = _quantization(cat, name).d
        if pentagon_residual(d):
            defects.append(f"{name}: pentagon residual nonzero")
        h1, h2 = hexagon_residuals(d)
        if h1:
            defects.append(f"{name}: first hexagon residual nonzero")
        if h2:
            defects.append(f"{name}: second hexagon residual nonzero")
    return defects


# -- criterion 9: functoriality -------------------------------------------------

def check_functoriality(cat: Catalog) -> list[str]:
    defects = []
    for name, hom in sorted(cat.homs.items()):
        defects.extend(f"{name}: {d}" for d in functoriality_check(hom))
    return defects


# -- criterion 10: associativity / coassociativity of the quantized maps --------

def check_product_coproduct_axioms(cat: Catalog) -> list[str]:
    defects = []
    for name, g in sorted(cat.bialgebras.items()):
        qz = _quantization(cat, name)
        env = qz.env_a
        gens = [env.gen(p) for p in range(g.dim)]
        for x, y, z in itertools.product(gens, repeat=3):
            lhs = qz.ek_product_series(qz.ek_product(x, y), element_series(qz.order, z))
            rhs = qz.ek_product_series(element_series(qz.order, x), qz.ek_product(y, z))
            if any((lhs[k] - rhs[k]).terms for k in range(qz.order)):
                defects.append(f"{name}: product associativity fails")
                break
        for x in gens:
            cop = qz.ek_coproduct(x)
            lhs = [EnvTensor(env, 3, {}) for _ in range(qz.order)]
            rhs = [EnvTensor(env, 3, {}) for _ in range(qz.order)]
            for k in range(qz.order):
                for (w1, w2), c in cop[k].terms.items():
                    inner = qz.ek_coproduct(env.element({w1: Q(1)}))
                    for kk in range(qz.order - k):
                        for (u1, u2), cc in inner[kk].terms.items():
                            lhs[k + kk] = lhs[k + kk] + EnvTensor(env, 3, {(u1, u2, w2): c * cc})
                    inner = qz.ek_coproduct(env.element({w2: Q(1)}))
                    for kk in range(qz.order - k):
                        for (u1, u2), cc in inner[kk].terms.items():
                            rhs[k + kk] = rhs[k + kk] + EnvTensor(env, 3, {(w1, u1, u2): c * cc})
            if any((lhs[k] - rhs[k]).terms for k in range(qz.order)):
                defects.append(f"{name}: coproduct coassociativity fails")
        for x in gens:
            for y in gens:
                prod = qz.ek_product(x, y)
                lhs = qz.ek_coproduct_series(prod)
                rhs = qz.product_on_tensors(qz.ek_coproduct(x), qz.ek_coproduct(y))
                if any((lhs[k] - rhs[k]).terms for k in range(qz.order)):
                    defects.append(f"{name}: coproduct not multiplicative")
                    break
    return defects


# -- criterion 11: infrastructure ------------------------------------------------

def check_infrastructure(cat: Catalog) -> list[str]:
    defects = []
    for name, g in sorted(cat.bialgebras.items()):
        gd = dualize(dualize(g))
        if gd.c != g.c or gd.f != g.f:
            defects.append(f"{name}: dualize is not an involution")
        if not check_lie_bialgebra(g.dim, dualize(g).c, dualize(g).f).valid:
            defects.append(f"{name}: dual fails the bialgebra check")
        try:
            build_double(g)  # re-runs every double invariant
        except Exception as exc:
            defects.append(f"{name}: double verification failed: {exc}")

        qz = _quantization(cat, name)
        env = qz.d.env
        words = list(_words(env.dim, 3))
        deg1 = [w for w in words if len(w) == 1]
        for wx in deg1:
            for wy in deg1:
                for wz in words:
                    if len(wz) > 1:
                        continue
                    x, y, z = (env.element({w: Q(1)}) for w in (wx, wy, wz))
                    if (x * y) * z != x * (y * z):
                        defects.append(f"{name}: enveloping product not associative")
        some_words = [w for w in words if len(w) <= 3]
        for w in some_words:
            x = env.element({w: Q(1)})
            left = delta0(x, 3)
            # coassociativity: both iterates agree with the 3-fold splitting
            two = delta0(x, 2)
            first = EnvTensor(env, 3, {})
            for (w1, w2), c in two.terms.items():
                for (u1, u2), cc in delta0(env.element({w1: Q(1)}), 2).terms.items():
                    first = first + EnvTensor(env, 3, {(u1, u2, w2): c * cc})
            if first != left:
                defects.append(f"{name}: classical coproduct not coassociative at {w}")
                break
        for w in some_words:
            x = env.element({w: Q(1)})
            acc = env.zero()
            for (w1, w2), c in delta0(x, 2).terms.items():
                acc = acc + (antipode0(env.element({w1: Q(1)}))
                             * env.element({w2: Q(1)})).scale(c)
            if acc != env.one().scale(counit0(x)):
                defects.append(f"{name}: classical antipode axiom fails at {w}")
                break

        for p in range(g.dim):
            v_min = solve_psi(qz.d, {(p,): Q(1)}, 2, pick="min")
            v_max = solve_psi(qz.d, {(p,): Q(1)}, 2, pick="max")
            if v_min.terms != v_max.terms:
                defects.append(f"{name}: psi solver depends on elimination order at {p}")
            if invariance_defect(v_min):
                defects.append(f"{name}: psi solution is not invariant at {p}")

    defects.extend(part1_product_check(cat.bialgebras["axb"]))
    return defects


# ---------------------------------------------------------------------------

CRITERIA = (
    ("appendix-product", "closed-form h^2 product coefficient, three ways",
     lambda cat: check_appendix_product(cat)),
    ("hopf-suite", "coassociativity, counit, multiplicativity, antipode",
     lambda cat: check_hopf_suite(cat)),
    ("quasitriangular", "intertwining, coproducts of R, Yang-Baxter, leading terms",
     lambda cat: check_quasitriangular(cat)),
    ("quasiclassical", "first-order limits recover the cobracket",
     lambda cat: check_quasiclassical(cat)),
    ("canonical-cybe", "canonical element solves the classical equation",
     lambda cat: check_canonical_cybe(cat)),
    ("yang-baxter-quantization", "quantum R-matrices over matrix algebras",
     lambda cat: check_yang_baxter_quantization()),
    ("polarization", "factorized R-matrix equals R",
     lambda cat: check_polarization(cat)),
    ("pentagon-hexagons", "coherence of the truncated associator and braiding",
     lambda cat: check_pentagon_hexagons(cat)),
    ("functoriality", "homomorphisms intertwine the quantized maps",
     lambda cat: check_functoriality(cat)),
    ("product-coproduct-axioms", "associativity, coassociativity, compatibility",
     lambda cat: check_product_coproduct_axioms(cat)),
    ("infrastructure", "duality, doubles, normal ordering, solver determinism",
     lambda cat: check_infrastructure(cat)),
)


def run_all(quiet: bool = False) -> Suite:
    suite = Suite()
    cat = catalog()
    for name, identity, fn in CRITERIA:
        result = suite.run(name, identity, lambda fn=fn: fn(cat))
        if not quiet:
            status = "pass" if result.passed else "FAIL"
            print(f"{status}  {name} ({result.seconds:.1f}s)")
            for d in result.defects[:8]:
                print(f"      {d}")
    return suite
