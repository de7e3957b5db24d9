"""Verma modules over the double, their truncated duals, and the intertwiner solver.

M+ is induced from the trivial representation of the a-side, so a_i . 1+ = 0
and M+ is spanned by sorted b-words applied to 1+; M- mirrors this with
b^i . 1- = 0 and sorted a-words.  The graded dual M+* is handled through
finite tables: a functional is stored by its values on b-words of length up
to a bound, equivalently by its coefficients in the basis {rho_alpha} dual to
the PBW monomial basis {alpha . 1+} (coefficient-1 duality, so
rho_i(b^j 1+) = delta_i^j).  Actions of a-generators preserve the usable
bound, actions of b-generators lower it by one.

``solve_psi`` computes the truncation of the intertwiner vector psi_x 1-:
the unique element of M+* (x) M- with leading term 1+* (x) x 1- killed by
every b^j.  The dual-degree-(k+1) slice is solved from the invariance
equations at degree k; the system is overdetermined and its consistency is
asserted afterwards rather than assumed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .kernel import Q, rat
from .manin import DoubleAlgebra, DoubleError
from .pbw import EnvElement, Word, antipode0


class VermaError(ValueError):
    pass


class DegreeBoundError(VermaError):
    """A computation consulted a dual table beyond its solved depth."""


def _merge(acc: dict, key, value: Q) -> None:
    v = acc.get(key, Q(0)) + value
    if v == 0:
        acc.pop(key, None)
    else:
        acc[key] = v


class VermaActions:
    """Cached generator actions on M+ and M- for one double."""

    def __init__(self, d: DoubleAlgebra):
        self.d = d
        self._plus: dict[tuple[int, Word], dict[Word, Q]] = {}
        self._minus: dict[tuple[int, Word], dict[Word, Q]] = {}

    # -- single generators ---------------------------------------------------

    def act_plus(self, gen: int, word: Word) -> dict[Word, Q]:
        """gen . (word 1+), word a sorted b-word; result in the b-word basis."""
        d = self.d
        key = (gen, word)
        cached = self._plus.get(key)
        if cached is not None:
            return cached
        if gen >= d.n:  # b-generator: multiply inside U(g-)
            result = {w: c for w, c in d.env.normal_order_word((gen,) + word).items()}
        else:           # a-generator: commute through to kill 1+
            if not word:
                result = {}
            else:
                head, rest = word[0], word[1:]
                result = {}
                for k, v in d.bracket(gen, head).items():
                    if k < d.n:
                        for w, c in self.act_plus(k, rest).items():
                            _merge(result, w, v * c)
                    else:
                        for w2, c2 in d.env.normal_order_word((k,) + rest).items():
                            _merge(result, w2, v * c2)
                for w, c in self.act_plus(gen, rest).items():
                    for w2, c2 in d.env.normal_order_word((head,) + w).items():
                        _merge(result, w2, c * c2)
        self._plus[key] = result
        return result

    def act_minus(self, gen: int, word: Word) -> dict[Word, Q]:
        """gen . (word 1-), word a sorted a-word."""
        d = self.d
        key = (gen, word)
        cached = self._minus.get(key)
        if cached is not None:
            return cached
        if gen < d.n:
            result = {w: c for w, c in d.env.normal_order_word((gen,) + word).items()}
        else:
            if not word:
                result = {}
            else:
                head, rest = word[0], word[1:]
                result = {}
                for k, v in d.bracket(gen, head).items():
                    if k >= d.n:
                        for w, c in self.act_minus(k, rest).items():
                            _merge(result, w, v * c)
                    else:
                        for w2, c2 in d.env.normal_order_word((k,) + rest).items():
                            _merge(result, w2, v * c2)
                for w, c in self.act_minus(gen, rest).items():
                    for w2, c2 in d.env.normal_order_word((head,) + w).items():
                        _merge(result, w2, c * c2)
        self._minus[key] = result
        return result

    # -- words and vectors ---------------------------------------------------

    def act_word(self, plus: bool, word: Word, vec: Mapping[Word, Q]) -> dict[Word, Q]:
        """Left action of a generator word (applied right to left)."""
        current = dict(vec)
        single = self.act_plus if plus else self.act_minus
        for gen in reversed(word):
            nxt: dict[Word, Q] = {}
            for w, c in current.items():
                for w2, c2 in single(gen, w).items():
                    _merge(nxt, w2, c * c2)
            current = nxt
        return current

    def act_element(self, plus: bool, x: EnvElement, vec: Mapping[Word, Q]) -> dict[Word, Q]:
        out: dict[Word, Q] = {}
        for w, c in x.terms.items():
            for w2, c2 in self.act_word(plus, w, vec).items():
                _merge(out, w2, c * c2)
        return out


_ACTIONS_CACHE: dict[int, VermaActions] = {}


def actions(d: DoubleAlgebra) -> VermaActions:
    found = _ACTIONS_CACHE.get(id(d))
    if found is None or found.d is not d:
        found = VermaActions(d)
        _ACTIONS_CACHE[id(d)] = found
    return found


@dataclass(frozen=True)
class VermaVector:
    """Element of M+ (plus=True, b-words) or M- (plus=False, a-words)."""

    d: DoubleAlgebra
    plus: bool
    terms: dict

    def __post_init__(self):
        lo, hi = (self.d.n, self.d.dim) if self.plus else (0, self.d.n)
        cleaned = {}
        for w, c in self.terms.items():
            w, c = tuple(w), rat(c)
            if any(not lo <= t < hi for t in w):
                side = "b" if self.plus else "a"
                raise VermaError(f"{w} is not a word in the {side}-generators")
            if tuple(sorted(w)) != w:
                raise VermaError(f"word {w} is not in normal order")
            if c != 0:
                cleaned[w] = c
        object.__setattr__(self, "terms", cleaned)

    def is_zero(self) -> bool:
        return not self.terms


def highest_weight(d: DoubleAlgebra, plus: bool) -> VermaVector:
    return VermaVector(d, plus, {(): Q(1)})


def act(x, v: VermaVector) -> VermaVector:
    """Module action of a generator index or an EnvElement of the double."""
    acts = actions(v.d)
    if isinstance(x, int):
        single = acts.act_plus if v.plus else acts.act_minus
        out: dict[Word, Q] = {}
        for w, c in v.terms.items():
            for w2, c2 in single(x, w).items():
                _merge(out, w2, c * c2)
        return VermaVector(v.d, v.plus, out)
    if isinstance(x, EnvElement):
        if x.alg is not v.d.env:
            raise VermaError("element does not live on this double")
        return VermaVector(v.d, v.plus, acts.act_element(v.plus, x, v.terms))
    raise VermaError(f"cannot act with {x!r}")


# ---------------------------------------------------------------------------
# the truncated dual of M+
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DualVector:
    """Functional on M+ modulo the filtration step D+1.

    ``values[alpha]`` is the value on alpha . 1+, i.e. the coefficient of
    rho_alpha; words longer than ``bound`` are unknown.
    """

    d: DoubleAlgebra
    bound: int
    values: dict

    def __post_init__(self):
        cleaned = {}
        for w, c in self.values.items():
            w, c = tuple(w), rat(c)
            if len(w) > self.bound:
                raise DegreeBoundError(f"value at {w} exceeds dual bound {self.bound}")
            if any(not self.d.n <= t < self.d.dim for t in w) or tuple(sorted(w)) != w:
                raise VermaError(f"{w} is not a normal-ordered b-word")
            if c != 0:
                cleaned[w] = c
        object.__setattr__(self, "values", cleaned)

    def __call__(self, word: Word) -> Q:
        if len(word) > self.bound:
            raise DegreeBoundError(
                f"dual vector solved to depth {self.bound}, asked at depth {len(word)}")
        return self.values.get(tuple(word), Q(0))


def one_plus_star(d: DoubleAlgebra, bound: int) -> DualVector:
    return DualVector(d, bound, {(): Q(1)})


def rho(d: DoubleAlgebra, i: int, bound: int) -> DualVector:
    """The functional dual to b^i 1+ (0-based a-side index i)."""
    return DualVector(d, bound, {(i + d.n,): Q(1)})


def dual_act(x: int, f: DualVector) -> DualVector:
    """(x . f)(v) = -f(x . v); b-generators lower the usable bound by one."""
    d = f.d
    acts = actions(d)
    new_bound = f.bound - 1 if x >= d.n else f.bound
    if new_bound < 0:
        raise DegreeBoundError("dual bound exhausted by a b-generator action")
    values: dict[Word, Q] = {}
    b_letters = range(d.n, d.dim)
    for length in range(new_bound + 1):
        for w in itertools.combinations_with_replacement(b_letters, length):
            total = Q(0)
            for w2, c in acts.act_plus(x, w).items():
                total -= c * f(w2)
            if total != 0:
                values[w] = total
    return DualVector(d, new_bound, values)


def dual_act_element(x: EnvElement, f: DualVector) -> DualVector:
    """Action of a U(g)-element: (u . f)(v) = f(S0(u) v).

    Only safe without bound loss for words in the a-generators; b-letters
    reduce the bound one step each.
    """
    d = f.d
    acts = actions(d)
    drop = max((sum(1 for t in w if t >= d.n) for w in x.terms), default=0)
    new_bound = f.bound - drop
    if new_bound < 0:
        raise DegreeBoundError("dual bound exhausted")
    sx = antipode0(x)
    values: dict[Word, Q] = {}
    b_letters = range(d.n, d.dim)
    for length in range(new_bound + 1):
        for w in itertools.combinations_with_replacement(b_letters, length):
            total = Q(0)
            for w2, c in acts.act_element(True, sx, {w: Q(1)}).items():
                total += c * f(w2)
            if total != 0:
                values[w] = total
    return DualVector(d, new_bound, values)


# ---------------------------------------------------------------------------
# coproduct morphisms i- and i+*
# ---------------------------------------------------------------------------

def i_minus(v: VermaVector, k: int = 2) -> dict[tuple[Word, ...], Q]:
    """The U(g+)-coproduct transported to M-: primitive on generators."""
    if v.plus:
        raise VermaError("i- is defined on M-")
    out: dict[tuple[Word, ...], Q] = {}
    for w, c in v.terms.items():
        for assignment in itertools.product(range(k), repeat=len(w)):
            slots: list[list[int]] = [[] for _ in range(k)]
            for letter, s in zip(w, assignment):
                slots[s].append(letter)
            _merge(out, tuple(tuple(s) for s in slots), c)
    return out


def i_plus(v: VermaVector, k: int = 2) -> dict[tuple[Word, ...], Q]:
    if not v.plus:
        raise VermaError("i+ is defined on M+")
    out: dict[tuple[Word, ...], Q] = {}
    for w, c in v.terms.items():
        for assignment in itertools.product(range(k), repeat=len(w)):
            slots: list[list[int]] = [[] for _ in range(k)]
            for letter, s in zip(w, assignment):
                slots[s].append(letter)
            _merge(out, tuple(tuple(s) for s in slots), c)
    return out


def i_plus_star(f: DualVector, g: DualVector) -> DualVector:
    """i+*(f (x) g)(v) = (f (x) g)(i+(v)): the dual pairing contraction."""
    if f.d is not g.d:
        raise VermaError("dual vectors over different doubles")
    d = f.d
    bound = min(f.bound, g.bound)  # i+ splits a word between both factors
    values: dict[Word, Q] = {}
    b_letters = range(d.n, d.dim)
    for length in range(bound + 1):
        for w in itertools.combinations_with_replacement(b_letters, length):
            total = Q(0)
            for key, c in i_plus(VermaVector(d, True, {w: Q(1)})).items():
                left, right = key
                if len(left) <= f.bound and len(right) <= g.bound:
                    total += c * f(left) * g(right)
            if total != 0:
                values[w] = total
    return DualVector(d, bound, values)


# ---------------------------------------------------------------------------
# the intertwiner psi_x
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairedVector:
    """Truncated element of M+* (x) M-: terms[(alpha, beta)] with alpha a
    b-word (dual slot, coefficients in the rho basis) and beta an a-word."""

    d: DoubleAlgebra
    bound: int
    terms: dict

    def __post_init__(self):
        cleaned = {}
        for (alpha, beta), c in self.terms.items():
            alpha, beta, c = tuple(alpha), tuple(beta), rat(c)
            if len(alpha) > self.bound:
                raise DegreeBoundError(f"dual word {alpha} exceeds bound {self.bound}")
            if c != 0:
                cleaned[(alpha, beta)] = cleaned.get((alpha, beta), Q(0)) + c
        object.__setattr__(self, "terms", {k: v for k, v in cleaned.items() if v != 0})

    def minus_part(self, alpha: Word) -> dict[Word, Q]:
        return {beta: c for (a, beta), c in self.terms.items() if a == tuple(alpha)}

    def leading(self) -> dict[Word, Q]:
        return self.minus_part(())

    def is_zero(self) -> bool:
        return not self.terms


def _b_words(d: DoubleAlgebra, length: int):
    return itertools.combinations_with_replacement(range(d.n, d.dim), length)


def solve_psi(d: DoubleAlgebra, x: EnvElement | Mapping[Word, Q], bound: int,
              pick: str = "min") -> PairedVector:
    """Solve for psi_x 1- through dual degree ``bound``.

    The degree-0 slice is 1+* (x) x 1-; the slice at degree k+1 is forced by
    requiring b^j . v = 0 at dual degree k.  ``pick`` selects which letter of
    a target word provides its solving equation ("min" or "max"); the result
    is independent of that choice, and the full invariance system is
    re-checked exactly after solving.
    """
    if isinstance(x, EnvElement):
        if x.alg is not d.env:
            raise VermaError("x must live in the enveloping algebra of the double")
        x_terms = dict(x.terms)
    else:
        x_terms = {tuple(w): rat(c) for w, c in x.items()}
    for w in x_terms:
        if any(t >= d.n for t in w):
            raise VermaError("x must be a U(a)-element (a-generators only)")
    if pick not in ("min", "max"):
        raise VermaError("pick must be 'min' or 'max'")

    acts = actions(d)
    env = d.env
    slices: dict[Word, dict[Word, Q]] = {(): dict(x_terms)}

    for k in range(bound):
        for alpha in _b_words(d, k + 1):
            j = alpha[0] if pick == "min" else alpha[-1]
            pos = alpha.index(j) if pick == "min" else len(alpha) - 1
            w = alpha[:pos] + alpha[pos + 1:]
            # m_alpha = b^j . m_w + sum over known slices of (b^j rho_beta)(w) m_beta
            target: dict[Word, Q] = {}
            for u, c in acts.act_word(False, (j,), slices[w]).items():
                _merge(target, u, c)
            ordered = env.normal_order_word((j,) + w)
            for beta, coeff in ordered.items():
                if beta == alpha or len(beta) > k:
                    continue
                known = slices.get(beta)
                if known is None:
                    continue
                for u, c in known.items():
                    _merge(target, u, -coeff * c)
            slices[alpha] = target

    terms = {(alpha, beta): c for alpha, m in slices.items() for beta, c in m.items()}
    v = PairedVector(d, bound, terms)
    defects = invariance_defect(v)
    if defects:
        alpha, detail = defects[0]
        raise DoubleError(
            f"psi solver produced a non-invariant vector (defect at {alpha}: {detail}); "
            "this indicates an internal convention bug"
        )
    return v


def invariance_defect(v: PairedVector) -> list:
    """All violations of b^j . v = 0 below the truncation depth, exactly."""
    d = v.d
    acts = actions(d)
    env = d.env
    slices: dict[Word, dict[Word, Q]] = {}
    for (alpha, beta), c in v.terms.items():
        _merge(slices.setdefault(alpha, {}), beta, c)
    defects = []
    for j in range(d.n, d.dim):
        for k in range(v.bound):
            for w in _b_words(d, k):
                residual: dict[Word, Q] = {}
                for u, c in acts.act_word(False, (j,), slices.get(w, {})).items():
                    _merge(residual, u, c)
                ordered = env.normal_order_word((j,) + tuple(w))
                for beta, coeff in ordered.items():
                    for u, c in slices.get(beta, {}).items():
                        _merge(residual, u, -coeff * c)
                if residual:
                    defects.append(((j, w), residual))
    return defects


# ---------------------------------------------------------------------------
# the filtration-triangular identification U(g) ~ M+ (x) M-
# ---------------------------------------------------------------------------

_PHI_CACHE: dict[tuple[int, Word], dict[tuple[Word, Word], Q]] = {}


def phi_forward_word(d: DoubleAlgebra, word: Word) -> dict[tuple[Word, Word], Q]:
    """The image of a PBW word under x -> x . (1+ (x) 1-)."""
    key = (id(d), word)
    found = _PHI_CACHE.get(key)
    if found is not None:
        return found
    acts = actions(d)
    out: dict[tuple[Word, Word], Q] = {}
    for assignment in itertools.product(range(2), repeat=len(word)):
        left = tuple(t for t, s in zip(word, assignment) if s == 0)
        right = tuple(t for t, s in zip(word, assignment) if s == 1)
        plus = acts.act_word(True, left, {(): Q(1)})
        if not plus:
            continue
        minus = acts.act_word(False, right, {(): Q(1)})
        for wp, cp in plus.items():
            for wm, cm in minus.items():
                _merge(out, (wp, wm), cp * cm)
    _PHI_CACHE[key] = out
    return out


def phi_forward(x: EnvElement) -> dict[tuple[Word, Word], Q]:
    """phi(x) = x . (1+ (x) 1-) in M+ (x) M-, via the standard coproduct."""
    d = _double_of(x)
    out: dict[tuple[Word, Word], Q] = {}
    for w, c in x.terms.items():
        for key, c2 in phi_forward_word(d, w).items():
            _merge(out, key, c * c2)
    return out


_DOUBLES_BY_ENV: dict[int, DoubleAlgebra] = {}


def register_double(d: DoubleAlgebra) -> DoubleAlgebra:
    _DOUBLES_BY_ENV[id(d.env)] = d
    return d


def _double_of(x: EnvElement) -> DoubleAlgebra:
    d = _DOUBLES_BY_ENV.get(id(x.alg))
    if d is None:
        raise VermaError("element does not belong to a registered double")
    return d


def phi_inverse(d: DoubleAlgebra, v: Mapping[tuple[Word, Word], Q]) -> EnvElement:
    """Invert phi degree by degree (it is filtration-triangular with unit diagonal).

    The leading term of phi(a-word alpha . b-word beta) is (beta 1+, alpha 1-),
    so repeatedly stripping a maximal-degree term of the target terminates.
    """
    residual = {k: rat(c) for k, c in v.items() if rat(c) != 0}
    result: dict[Word, Q] = {}
    guard = 0
    while residual:
        guard += 1
        if guard > 10000:
            raise VermaError("phi inversion failed to terminate; inconsistent input")
        (wp, wm) = max(residual, key=lambda key: (len(key[0]) + len(key[1]), key))
        c = residual[(wp, wm)]
        word = wm + wp  # a-part then b-part: already in PBW normal order
        _merge(result, word, c)
        for key, c2 in phi_forward_word(d, word).items():
            _merge(residual, key, -c * c2)
    return EnvElement(d.env, result)


def psi_on(v: PairedVector, w: VermaVector | Mapping[Word, Q]) -> PairedVector:
    """Extend psi_x from 1- to all of M- by the intertwining property.

    psi_x(u 1-) = Delta0(u) . (psi_x 1-): the first coproduct leg dual-acts on
    the rho slot (a-letters only, bound preserved), the second acts on M-.
    """
    d = v.d
    acts = actions(d)
    if isinstance(w, VermaVector):
        if w.plus:
            raise VermaError("psi acts on M-")
        w_terms = w.terms
    else:
        w_terms = {tuple(k): rat(c) for k, c in w.items()}

    out: dict[tuple[Word, Word], Q] = {}
    for word, scale in w_terms.items():
        for assignment in itertools.product(range(2), repeat=len(word)):
            left = tuple(t for t, s in zip(word, assignment) if s == 0)
            right = tuple(t for t, s in zip(word, assignment) if s == 1)
            # Dual action of the a-word `left` on each rho_alpha component.
            for (alpha, beta), c in v.terms.items():
                m_right = acts.act_word(False, right, {beta: Q(1)})
                if not m_right:
                    continue
                if left:
                    # (left . rho_alpha)(gamma) = rho_alpha(S0(left) gamma 1+)
                    sign = Q(-1) ** len(left)
                    rev = tuple(reversed(left))
                    for gamma in itertools.chain.from_iterable(
                            _b_words(d, L) for L in range(v.bound + 1)):
                        img = acts.act_word(True, rev, {gamma: Q(1)})
                        lam = sign * img.get(alpha, Q(0))
                        if lam == 0:
                            continue
                        for u, cu in m_right.items():
                            _merge(out, (gamma, u), scale * c * lam * cu)
                else:
                    for u, cu in m_right.items():
                        _merge(out, (alpha, u), scale * c * cu)
    return PairedVector(d, v.bound, out)
