"""Quantized structure maps mod h^3: twist, coproduct, antipode, R-matrix,
the intertwiner product and coproduct on U_h(a), and the polarized R-matrix.

Everything here is exact: coefficients are rationals, the only approximation
is the (intrinsic) truncation of all h-series at order 3.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .assoc import (
    Component,
    SlotSpace,
    SlotVector,
    evaluate_duals,
    exp_insert,
    phi_apply,
    require_order,
    swap_slots,
    unit_vector,
)
from .bialg import LieBialgebra
from .kernel import DEFAULT_ORDER, HSeries, Q, series_inverse, series_mul
from .manin import DoubleAlgebra, build_double, omega_tensor
from .pbw import (
    EnvAlgebra,
    EnvElement,
    EnvTensor,
    Word,
    antipode0,
    counit0,
    delta0,
    element_series,
    series_is_zero,
    tensor_multiply,
    tensor_of,
    tensor_one,
    tensor_series,
)
from .verma import (
    PairedVector,
    actions,
    phi_forward,
    phi_inverse,
    psi_on,
    register_double,
    solve_psi,
)


class QuantizeError(ValueError):
    pass


def _tensor_mul(x: EnvTensor, y: EnvTensor) -> EnvTensor:
    return tensor_multiply(x, y)


def _elt_mul(x: EnvElement, y: EnvElement) -> EnvElement:
    return x * y


# ---------------------------------------------------------------------------
# the twist J and the quantized double
# ---------------------------------------------------------------------------

def compute_J(d: DoubleAlgebra, order: int = DEFAULT_ORDER,
              exp_sign: int = 1) -> HSeries:
    """Evaluate the twist on 1+ (x) 1+ (x) 1- (x) 1-.

    The pipeline is: grouped associator on blocks {1},{2},{34}; inverse
    associator on {2},{3},{4}; the swap-exponential on slots 2,3; associator
    on {2},{3},{4}; inverse grouped associator on {1},{2},{34}; finally the
    two M+ (x) M- pairs are pulled back along the triangular identification
    with U(g).  ``exp_sign=-1`` computes the companion element used by the
    polarization.
    """
    require_order(order)
    register_double(d)
    space = SlotSpace(d, ("mp", "mp", "mm", "mm"))
    v = unit_vector(space, order=order)
    v = phi_apply(v, [(0,), (1,), (2, 3)])
    v = phi_apply(v, [(1,), (2,), (3,)], inverse=True)
    v = exp_insert(v, [(1, 2)], sign=exp_sign)
    v = swap_slots(v, 1, 2)
    v = phi_apply(v, [(1,), (2,), (3,)])
    v = phi_apply(v, [(0,), (1,), (2, 3)], inverse=True)

    coeffs = []
    for comp in v.comps:
        out = EnvTensor(d.env, 2, {})
        for (w1, w2, w3, w4), c in comp.terms.items():
            left = phi_inverse(d, {(w1, w2): Q(1)})
            right = phi_inverse(d, {(w3, w4): Q(1)})
            out = out + tensor_of(left, right).scale(c)
        coeffs.append(out)
    return HSeries(tuple(coeffs), order)


def exp_omega_series(d: DoubleAlgebra, order: int = DEFAULT_ORDER,
                     sign: int = 1, half: bool = True) -> HSeries:
    """exp(sign * h * Omega / 2) as an element of U(g)^(x)2[[h]]."""
    omega = omega_tensor(d)
    one2 = tensor_one(d.env, 2)
    denom = Q(2) if half else Q(1)
    coeffs = [one2]
    power = one2
    fact = 1
    for k in range(1, order):
        power = tensor_multiply(power, omega)
        fact *= k
        coeffs.append(power.scale(Q(sign, 1) ** k / (denom ** k * fact)))
    return HSeries(tuple(coeffs), order)


@dataclass
class QuantizedDouble:
    """The double with its quantized Hopf and quasitriangular structure."""

    d: DoubleAlgebra
    order: int
    J: HSeries
    J_inv: HSeries
    Q_elt: HSeries
    Q_inv: HSeries
    R: HSeries

    @staticmethod
    def build(d: DoubleAlgebra, order: int = DEFAULT_ORDER) -> "QuantizedDouble":
        require_order(order)
        J = compute_J(d, order)
        one2 = tensor_one(d.env, 2)
        J_inv = series_inverse(J, one2, _tensor_mul)
        q_coeffs = []
        for k in range(order):
            acc = d.env.zero()
            for (w1, w2), c in J[k].terms.items():
                acc = acc + (antipode0(d.env.element({w1: Q(1)}))
                             * d.env.element({w2: Q(1)})).scale(c)
            q_coeffs.append(acc)
        Q_elt = HSeries(tuple(q_coeffs), order)
        Q_inv = series_inverse(Q_elt, d.env.one(), _elt_mul)
        J_op = J.map(lambda t: t.flip())
        J_op_inv = series_inverse(J_op, one2, _tensor_mul)
        R = series_mul(series_mul(J_op_inv, exp_omega_series(d, order), _tensor_mul),
                       J, _tensor_mul)
        return QuantizedDouble(d, order, J, J_inv, Q_elt, Q_inv, R)

    # -- Hopf structure maps -------------------------------------------------

    def coproduct_word(self, w: Word) -> HSeries:
        cached = getattr(self, "_cop_cache", None)
        if cached is None:
            cached = {}
            self._cop_cache = cached
        found = cached.get(w)
        if found is None:
            x = self.d.env.element({w: Q(1)})
            mid = tensor_series(self.order, delta0(x, 2))
            found = series_mul(series_mul(self.J_inv, mid, _tensor_mul),
                               self.J, _tensor_mul)
            cached[w] = found
        return found

    def coproduct(self, x: EnvElement) -> HSeries:
        acc = tensor_series(self.order, EnvTensor(self.d.env, 2, {}))
        for w, c in x.terms.items():
            acc = acc + self.coproduct_word(w).map(lambda t: t.scale(c))
        return acc

    def coproduct_series(self, xs: HSeries) -> HSeries:
        acc = tensor_series(self.order, EnvTensor(self.d.env, 2, {}))
        for k in range(self.order):
            acc = acc + self.coproduct(xs[k]).shift(k, EnvTensor(self.d.env, 2, {}))
        return acc

    def antipode(self, x: EnvElement) -> HSeries:
        mid = element_series(self.order, antipode0(x))
        return series_mul(series_mul(self.Q_inv, mid, _elt_mul), self.Q_elt, _elt_mul)

    def antipode_series(self, xs: HSeries) -> HSeries:
        acc = element_series(self.order, self.d.env.zero())
        for k in range(self.order):
            acc = acc + self.antipode(xs[k]).shift(k, self.d.env.zero())
        return acc

    def counit(self, x: EnvElement) -> Q:
        return counit0(x)


def coproduct_double(qd: QuantizedDouble, x: EnvElement) -> HSeries:
    return qd.coproduct(x)


def antipode_double(qd: QuantizedDouble, x: EnvElement) -> HSeries:
    return qd.antipode(x)


def compute_R(qd: QuantizedDouble) -> HSeries:
    return qd.R


# ---------------------------------------------------------------------------
# U_h(a): product and coproduct through the intertwiners
# ---------------------------------------------------------------------------

class Quantization:
    """Per-bialgebra context: the double, psi tables, and cached structure maps."""

    def __init__(self, a: LieBialgebra, order: int = DEFAULT_ORDER):
        require_order(order)
        self.a = a
        self.order = order
        self.d = register_double(build_double(a))
        bracket_table = {}
        for (i, j, k), v in a.c.items():
            bracket_table.setdefault((i, j), {})[k] = v
        self.env_a = EnvAlgebra(a.dim, bracket_table, a.names)
        self._psi: dict[tuple[Word, int], PairedVector] = {}
        self._product: dict[tuple[Word, Word], HSeries] = {}
        self._j_op: dict[tuple[Word, Word], list[dict]] = {}
        self._qd: QuantizedDouble | None = None

    @property
    def quantized_double(self) -> QuantizedDouble:
        if self._qd is None:
            self._qd = QuantizedDouble.build(self.d, self.order)
        return self._qd

    # -- embedding U(a) words into the double ---------------------------------

    def to_double(self, x: EnvElement) -> EnvElement:
        if x.alg is self.env_a:
            return self.d.env.element(dict(x.terms))
        if x.alg is self.d.env:
            return x
        raise QuantizeError("element lives in a different algebra")

    def from_words(self, terms: Mapping[Word, Q]) -> EnvElement:
        return self.env_a.element(dict(terms))

    def psi(self, word: Word, bound: int) -> PairedVector:
        key = (word, bound)
        found = self._psi.get(key)
        if found is None:
            found = solve_psi(self.d, {word: Q(1)}, bound)
            self._psi[key] = found
        return found

    def psi_element(self, x: EnvElement, bound: int) -> PairedVector:
        terms: dict[tuple[Word, Word], Q] = {}
        for w, c in x.terms.items():
            for key, c2 in self.psi(w, bound).terms.items():
                terms[key] = terms.get(key, Q(0)) + c * c2
        return PairedVector(self.d, bound, terms)

    # -- the product ----------------------------------------------------------

    def product_words(self, wx: Word, wy: Word) -> HSeries:
        found = self._product.get((wx, wy))
        if found is None:
            found = self._product_raw(self.env_a.element({wx: Q(1)}),
                                      self.env_a.element({wy: Q(1)}))
            self._product[(wx, wy)] = found
        return found

    def _product_raw(self, x: EnvElement, y: EnvElement) -> HSeries:
        """extract[Phi^{-1} (1 (x) psi_y) psi_x 1-]: the quantized product x o y."""
        vx = self.psi_element(self.to_double(x), 1)
        psi_y = self.psi_element(self.to_double(y), 2)
        space = SlotSpace(self.d, ("dual", "dual", "mm"))
        terms: dict = {}
        for (alpha, beta), c in vx.terms.items():
            on_beta = psi_on(psi_y, {beta: Q(1)})
            for (gamma, u), c2 in on_beta.terms.items():
                key = (alpha, gamma, u)
                v = terms.get(key, Q(0)) + c * c2
                if v == 0:
                    terms.pop(key, None)
                else:
                    terms[key] = v
        comps = [Component((1, 2, None), terms)]
        comps.extend([Component((1, 2, None), {})] * (self.order - 1))
        v = SlotVector(space, tuple(comps))
        v = phi_apply(v, [(0,), (1,), (2,)], inverse=True)
        ev = evaluate_duals(v)
        coeffs = []
        for k in range(self.order):
            coeffs.append(self.env_a.element(
                {key[0]: c for key, c in ev.get(k, {}).items()}))
        return HSeries(tuple(coeffs), self.order)

    def ek_product(self, x: EnvElement, y: EnvElement) -> HSeries:
        acc = element_series(self.order, self.env_a.zero())
        for wx, cx in x.terms.items():
            for wy, cy in y.terms.items():
                acc = acc + self.product_words(wx, wy).map(lambda e: e.scale(cx * cy))
        return acc

    def ek_product_series(self, xs: HSeries, ys: HSeries) -> HSeries:
        acc = element_series(self.order, self.env_a.zero())
        for i in range(self.order):
            for j in range(self.order - i):
                term = self.ek_product(xs[i], ys[j]).shift(i + j, self.env_a.zero())
                acc = acc + term
        return acc

    def unit(self) -> HSeries:
        return element_series(self.order, self.env_a.one())

    # -- the coproduct ---------------------------------------------------------

    def _twist_on_pair(self, wu: Word, wv: Word) -> list[dict]:
        """The coproduct twist evaluated on psi_u 1- (x) psi_v 1-, per h-order."""
        found = self._j_op.get((wu, wv))
        if found is not None:
            return found
        vu = self.psi(wu, 1)
        vv = self.psi(wv, 2)
        space = SlotSpace(self.d, ("dual", "mm", "dual", "mm"))
        terms: dict = {}
        for (a1, b1), c1 in vu.terms.items():
            for (a2, b2), c2 in vv.terms.items():
                terms[(a1, b1, a2, b2)] = c1 * c2
        comps = [Component((1, None, 2, None), terms)]
        comps.extend([Component((1, None, 2, None), {})] * (self.order - 1))
        v = SlotVector(space, tuple(comps))
        v = phi_apply(v, [(0,), (1,), (2, 3)])
        v = phi_apply(v, [(1,), (2,), (3,)], inverse=True)
        v = swap_slots(v, 1, 2)
        v = exp_insert(v, [(1, 2)], sign=-1)
        v = phi_apply(v, [(1,), (2,), (3,)])
        v = phi_apply(v, [(0,), (1,), (2, 3)], inverse=True)
        ev = evaluate_duals(v)
        out = [ev.get(k, {}) for k in range(self.order)]
        if out[0] != {(wu, wv): Q(1)}:
            raise QuantizeError(
                "coproduct twist does not reduce to the identity at h^0; "
                "convention bug")
        self._j_op[(wu, wv)] = out
        return out

    def _twist_apply(self, k: int, pair_terms: Mapping[tuple[Word, Word], Q]) -> dict:
        """Apply the h^k coefficient of the twist to a U(a)^(x)2 element."""
        out: dict[tuple[Word, Word], Q] = {}
        for (wu, wv), c in pair_terms.items():
            for key, c2 in self._twist_on_pair(wu, wv)[k].items():
                v = out.get(key, Q(0)) + c * c2
                if v == 0:
                    out.pop(key, None)
                else:
                    out[key] = v
        return out

    def ek_coproduct(self, x: EnvElement) -> HSeries:
        """Delta(x) = (twist)^{-1} applied to the classical coproduct of x."""
        if x.alg is self.env_a:
            base = delta0(x, 2)
        else:
            raise QuantizeError("ek_coproduct expects a U(a) element")
        w0 = {key: c for key, c in base.terms.items()}
        j1w = self._twist_apply(1, w0)
        j2w = self._twist_apply(2, w0)
        j1j1w = self._twist_apply(1, j1w)
        coeffs = [
            EnvTensor(self.env_a, 2, dict(w0)),
            EnvTensor(self.env_a, 2, {k: -c for k, c in j1w.items()}),
            EnvTensor(self.env_a, 2, {k: c for k, c in j1j1w.items()})
            - EnvTensor(self.env_a, 2, dict(j2w)),
        ]
        coeffs = coeffs[: self.order]
        while len(coeffs) < self.order:
            coeffs.append(EnvTensor(self.env_a, 2, {}))
        return HSeries(tuple(coeffs), self.order)

    def ek_coproduct_series(self, xs: HSeries) -> HSeries:
        acc = tensor_series(self.order, EnvTensor(self.env_a, 2, {}))
        for k in range(self.order):
            acc = acc + self.ek_coproduct(xs[k]).shift(k, EnvTensor(self.env_a, 2, {}))
        return acc

    def product_on_tensors(self, xs: HSeries, ys: HSeries) -> HSeries:
        """Componentwise quantized product on U(a)^(x)2 series (for Hopf checks)."""
        zero2 = EnvTensor(self.env_a, 2, {})
        acc = tensor_series(self.order, zero2)
        for i in range(self.order):
            for j in range(self.order - i):
                for (u1, u2), c1 in xs[i].terms.items():
                    for (v1, v2), c2 in ys[j].terms.items():
                        left = self.product_words(u1, v1)
                        right = self.product_words(u2, v2)
                        prod = series_mul(left, right, tensor_of)
                        scaled = prod.map(lambda t: t.scale(c1 * c2)).shift(
                            i + j, zero2)
                        acc = acc + scaled
        return acc


def h2_product_formula(a: LieBialgebra, p: int, q: int,
                       env: EnvAlgebra | None = None) -> EnvElement:
    """The closed-form h^2 coefficient of the product of two generators.

    (1/24) (f_p^{ik} f_q^{ls} c_{kl}^j c_{ij}^m  a_m a_s
            + f_p^{in} f_q^{ls} c_{il}^r  a_r a_n a_s),
    normal-ordered; the first index (p) is the left factor's.
    """
    if env is None:
        bracket_table = {}
        for (i, j, k), v in a.c.items():
            bracket_table.setdefault((i, j), {})[k] = v
        env = EnvAlgebra(a.dim, bracket_table, a.names)
    n = a.dim
    total = env.zero()
    fp = {(i, k): v for (s, i, k), v in a.f.items() if s == p}
    fq = {(l, s): v for (t, l, s), v in a.f.items() if t == q}
    for (i, k), v1 in fp.items():
        for (l, s), v2 in fq.items():
            for j in range(n):
                c1 = a.c.get((k, l, j), Q(0))
                if c1 == 0:
                    continue
                for m in range(n):
                    c2 = a.c.get((i, j, m), Q(0))
                    if c2 != 0:
                        total = total + normalized_word(env, (m, s)).scale(v1 * v2 * c1 * c2)
    for (i, nn), v1 in fp.items():
        for (l, s), v2 in fq.items():
            for r in range(n):
                c1 = a.c.get((i, l, r), Q(0))
                if c1 != 0:
                    total = total + normalized_word(env, (r, nn, s)).scale(v1 * v2 * c1)
    return total.scale(Q(1, 24))


def normalized_word(env: EnvAlgebra, word: Word) -> EnvElement:
    return EnvElement(env, dict(env.normal_order_word(tuple(word))))


# ---------------------------------------------------------------------------
# Part I endomorphism picture: m+, m-, and the polarization of R
# ---------------------------------------------------------------------------

class EndoModel:
    """m+/m- as exact endomorphism data of M+ (x) M- (per h-order maps)."""

    def __init__(self, d: DoubleAlgebra, order: int = DEFAULT_ORDER):
        require_order(order)
        self.d = register_double(d)
        self.order = order

    def _pair_vector(self, terms: Mapping[tuple[Word, Word], Q]) -> SlotVector:
        space = SlotSpace(self.d, ("mp", "mm"))
        comps = [Component((None, None), dict(terms))]
        comps.extend([Component((None, None), {})] * (self.order - 1))
        return SlotVector(space, tuple(comps))

    def _series_terms(self, v: SlotVector) -> list[dict]:
        return [dict(comp.terms) for comp in v.comps]

    def m_plus(self, datum: Mapping[Word, Q]) -> "Endomorphism":
        """m+(y) = (1 (x) y) o Phi o (i+ (x) 1) with y(1+ (x) 1-) = datum in M-."""
        return Endomorphism(self, ("plus", tuple(sorted(datum.items()))))

    def m_minus(self, datum: Mapping[Word, Q]) -> "Endomorphism":
        """m-(x) = (x (x) 1) o Phi^{-1} o (1 (x) i-) with x(1+ (x) 1-) = datum in M+."""
        return Endomorphism(self, ("minus", tuple(sorted(datum.items()))))

    def apply_basis(self, tag, beta: Word, alpha: Word) -> list[dict]:
        """Image of the basis vector (beta 1+, alpha 1-), one dict per h-order."""
        kind, datum_items = tag
        datum = dict(datum_items)
        acts = actions(self.d)
        space3 = SlotSpace(self.d, ("mp", "mp", "mm") if kind == "plus"
                           else ("mp", "mm", "mm"))
        terms: dict = {}
        if kind == "plus":
            # i+ (x) 1
            for assignment in itertools.product(range(2), repeat=len(beta)):
                left = tuple(t for t, s in zip(beta, assignment) if s == 0)
                right = tuple(t for t, s in zip(beta, assignment) if s == 1)
                key = (left, right, alpha)
                terms[key] = terms.get(key, Q(0)) + Q(1)
        else:
            # 1 (x) i-
            for assignment in itertools.product(range(2), repeat=len(alpha)):
                left = tuple(t for t, s in zip(alpha, assignment) if s == 0)
                right = tuple(t for t, s in zip(alpha, assignment) if s == 1)
                key = (beta, left, right)
                terms[key] = terms.get(key, Q(0)) + Q(1)
        comps = [Component((None,) * 3, terms)]
        comps.extend([Component((None,) * 3, {})] * (self.order - 1))
        v = SlotVector(space3, tuple(comps))
        v = phi_apply(v, [(0,), (1,), (2,)], inverse=(kind == "minus"))

        out = [dict() for _ in range(self.order)]
        for k, comp in enumerate(v.comps):
            for key, c in comp.terms.items():
                if kind == "plus":
                    w1, w2, w3 = key
                    inner = phi_inverse(self.d, {(w2, w3): Q(1)})
                    image = acts.act_element(False, inner, datum)
                    for u, cu in image.items():
                        _acc(out[k], (w1, u), c * cu)
                else:
                    w1, w2, w3 = key
                    inner = phi_inverse(self.d, {(w1, w2): Q(1)})
                    image = acts.act_element(True, inner, datum)
                    for u, cu in image.items():
                        _acc(out[k], (u, w3), c * cu)
        return out

    def element_of(self, endo: "Endomorphism") -> HSeries:
        """The U(g)[[h]]-element corresponding to an endomorphism via phi."""
        images = endo.apply({((), ()): Q(1)})
        coeffs = [phi_inverse(self.d, images[k]) for k in range(self.order)]
        return HSeries(tuple(coeffs), self.order)

    def element_endo(self, u: EnvElement) -> "Endomorphism":
        """The endomorphism phi o (right multiplication by u) o phi^{-1}."""
        return Endomorphism(self, ("rmul", tuple(sorted(u.terms.items()))))

    def apply_rmul(self, datum_items, beta: Word, alpha: Word) -> list[dict]:
        u = self.d.env.element(dict(datum_items))
        e = phi_inverse(self.d, {(beta, alpha): Q(1)})
        image = phi_forward(e * u)
        return [dict(image)] + [dict() for _ in range(self.order - 1)]


def _acc(acc: dict, key, value: Q) -> None:
    v = acc.get(key, Q(0)) + value
    if v == 0:
        acc.pop(key, None)
    else:
        acc[key] = v


@dataclass(frozen=True)
class Endomorphism:
    model: EndoModel
    tag: tuple

    def apply(self, terms: Mapping[tuple[Word, Word], Q],
              shift: int = 0) -> list[dict]:
        out = [dict() for _ in range(self.model.order)]
        for (beta, alpha), c in terms.items():
            if self.tag[0] == "rmul":
                images = self.model.apply_rmul(self.tag[1], beta, alpha)
            else:
                images = self.model.apply_basis(self.tag, beta, alpha)
            for k, image in enumerate(images):
                if k + shift >= self.model.order:
                    break
                for key, cv in image.items():
                    _acc(out[k + shift], key, c * cv)
        return out

    def apply_series(self, series: list[dict]) -> list[dict]:
        out = [dict() for _ in range(self.model.order)]
        for k, terms in enumerate(series):
            partial = self.apply(terms, shift=k)
            for t in range(self.model.order):
                for key, cv in partial[t].items():
                    _acc(out[t], key, cv)
        return out

    def compose(self, other: "Endomorphism") -> "ComposedEndo":
        return ComposedEndo(self.model, (self, other))


@dataclass(frozen=True)
class ComposedEndo:
    model: EndoModel
    factors: tuple

    def apply(self, terms: Mapping[tuple[Word, Word], Q]) -> list[dict]:
        series = [dict(terms)] + [dict() for _ in range(self.model.order - 1)]
        for factor in reversed(self.factors):
            series = factor.apply_series(series)
        return series


def nu_minus_side(model: EndoModel, datum: Mapping[Word, Q]) -> HSeries:
    """nu of an M- vector: the U(g)[[h]]-element of m+(x_datum)."""
    return model.element_of(model.m_plus(datum))


def nu_plus_side(model: EndoModel, datum: Mapping[Word, Q]) -> HSeries:
    """nu of an M+ vector: the U(g)[[h]]-element of m-(x_datum)."""
    return model.element_of(model.m_minus(datum))


def polarize_R(qd: QuantizedDouble) -> tuple[HSeries, HSeries]:
    """The polarized R-matrix of the factorization picture, and R itself.

    K is the twist pipeline with the opposite exponential; the polarized
    element is (nu (x) nu)(K^{-1} exp(h Omega / 2) (1- (x) 1+)) and must equal
    R at the truncation.
    """
    d = qd.d
    order = qd.order
    K = compute_J(d, order, exp_sign=-1)
    one2 = tensor_one(d.env, 2)
    K_inv = series_inverse(K, one2, _tensor_mul)
    W = series_mul(K_inv, exp_omega_series(d, order), _tensor_mul)

    acts = actions(d)
    model = EndoModel(d, order)
    zero2 = EnvTensor(d.env, 2, {})
    acc = tensor_series(order, zero2)
    nu_m_cache: dict[Word, HSeries] = {}
    nu_p_cache: dict[Word, HSeries] = {}
    for k in range(order):
        for (w1, w2), c in W[k].terms.items():
            minus_vec = acts.act_word(False, w1, {(): Q(1)})   # w1 . 1-
            plus_vec = acts.act_word(True, w2, {(): Q(1)})     # w2 . 1+
            for um, cm in minus_vec.items():
                left = nu_m_cache.get(um)
                if left is None:
                    left = nu_minus_side(model, {um: Q(1)})
                    nu_m_cache[um] = left
                for up, cp in plus_vec.items():
                    right = nu_p_cache.get(up)
                    if right is None:
                        right = nu_plus_side(model, {up: Q(1)})
                        nu_p_cache[up] = right
                    pair = series_mul(left, right, tensor_of)
                    acc = acc + pair.map(
                        lambda t: t.scale(c * cm * cp)).shift(k, zero2)
    return acc, qd.R


def part1_product_check(a: LieBialgebra, order: int = DEFAULT_ORDER,
                        degree: int = 2) -> list[str]:
    """Classical (mod h) checks of the endomorphism picture.

    Verifies that m-(x) reduces to the right-multiplication endomorphism of
    its leading datum, the closure of m- under composition, and the
    factorization m+(u) m-(w) = (element u.w) at h^0.
    """
    d = register_double(build_double(a))
    model = EndoModel(d, order)
    n = a.dim
    defects: list[str] = []

    def basis_words(lo, hi, max_len):
        for length in range(max_len + 1):
            yield from itertools.combinations_with_replacement(range(lo, hi), length)

    domain = [(beta, alpha)
              for beta in basis_words(n, 2 * n, 1)
              for alpha in basis_words(0, n, 1)]

    for w in basis_words(n, 2 * n, degree):
        mm = model.m_minus({w: Q(1)})
        rm = model.element_endo(d.env.element({w: Q(1)}))
        for key in domain:
            got = mm.apply({key: Q(1)})[0]
            want = rm.apply({key: Q(1)})[0]
            if got != want:
                defects.append(f"m-({w}) is not right multiplication at {key} mod h")
                break
    for u in basis_words(0, n, degree):
        mp = model.m_plus({u: Q(1)})
        rm = model.element_endo(d.env.element({u: Q(1)}))
        for key in domain:
            got = mp.apply({key: Q(1)})[0]
            want = rm.apply({key: Q(1)})[0]
            if got != want:
                defects.append(f"m+({u}) is not right multiplication at {key} mod h")
                break

    # closure: m-(x) m-(y) = m-(z), z = x o (y (x) 1) o (1 (x) i-), at h^0
    for w1 in basis_words(n, 2 * n, 1):
        for w2 in basis_words(n, 2 * n, 1):
            composed = model.m_minus({w1: Q(1)}).compose(model.m_minus({w2: Q(1)}))
            acts = actions(d)
            z_datum = acts.act_element(
                True, phi_inverse(d, {(w2, ()): Q(1)}), {w1: Q(1)})
            direct = model.m_minus(z_datum)
            for key in domain:
                got = composed.apply({key: Q(1)})[0]
                want = direct.apply({key: Q(1)})[0]
                if got != want:
                    defects.append(f"m- closure fails at ({w1}, {w2}, {key}) mod h")
                    break

    # Factorization at h^0: the product m+(u) . m-(w) of the endomorphism
    # algebra is the reversed composition (the identification with U(g) is
    # through right multiplication), and its element is u . w.
    for u in basis_words(0, n, 1):
        for w in basis_words(n, 2 * n, 1):
            composed = model.m_minus({w: Q(1)}).compose(model.m_plus({u: Q(1)}))
            image = composed.apply({((), ()): Q(1)})[0]
            got = phi_inverse(d, image)
            want = d.env.element({u: Q(1)}) * d.env.element({w: Q(1)})
            if got != want:
                defects.append(f"factorization fails at ({u}, {w}) mod h")
    return defects
