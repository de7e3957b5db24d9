"""Universal enveloping algebras in PBW normal form.

An ``EnvAlgebra`` wraps a based Lie algebra (a bracket table) a rewriting
engine that puts words of generators into normal order: indices nondecreasing
along the word.  For a Drinfeld double whose basis is ordered with all
a-generators before all b-generators this is exactly the PBW factorization
U(g+) . U(g-).

Elements of U(g) (``EnvElement``) and of U(g)^(x)k (``EnvTensor``) are sparse
maps from normal-ordered words, resp. tuples of words, to rationals.  The
classical Hopf operations (coproduct, antipode, counit) act on them; each
rewriting step strictly lowers (inversions, length) lexicographically, so
normal ordering terminates, and the same small words recur constantly, so the
rewriting is memoized per algebra.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .kernel import DEFAULT_ORDER, HSeries, KernelError, Q, rat

Word = tuple[int, ...]


class PBWError(ValueError):
    pass


class EnvAlgebra:
    """A based Lie algebra together with its normal-ordering engine."""

    def __init__(self, dim: int, bracket_table: Mapping[tuple[int, int], Mapping[int, Q]],
                 names: Iterable[str] | None = None):
        self.dim = dim
        self.names = tuple(names) if names is not None else tuple(f"x{i+1}" for i in range(dim))
        self._bracket = {
            (i, j): {k: rat(v) for k, v in row.items() if rat(v) != 0}
            for (i, j), row in bracket_table.items()
        }
        self._no_cache: dict[Word, dict[Word, Q]] = {}

    def bracket(self, i: int, j: int) -> dict[int, Q]:
        return self._bracket.get((i, j), {})

    def normal_order_word(self, word: Word) -> dict[Word, Q]:
        """Rewrite a single word into the PBW basis."""
        for idx in word:
            if not (0 <= idx < self.dim):
                raise PBWError(f"unknown generator index {idx}")
        cached = self._no_cache.get(word)
        if cached is not None:
            return cached
        descent = next((t for t in range(len(word) - 1) if word[t] > word[t + 1]), None)
        if descent is None:
            result = {word: Q(1)}
        else:
            swapped = word[:descent] + (word[descent + 1], word[descent]) + word[descent + 2:]
            result = dict(self.normal_order_word(swapped))
            x, y = word[descent], word[descent + 1]
            for k, coeff in self.bracket(x, y).items():
                shorter = word[:descent] + (k,) + word[descent + 2:]
                for w, c in self.normal_order_word(shorter).items():
                    v = result.get(w, Q(0)) + coeff * c
                    if v == 0:
                        result.pop(w, None)
                    else:
                        result[w] = v
        self._no_cache[word] = result
        return result

    def element(self, terms: Mapping[Word, Q] | None = None) -> "EnvElement":
        return EnvElement(self, dict(terms or {}))

    def one(self) -> "EnvElement":
        return EnvElement(self, {(): Q(1)})

    def zero(self) -> "EnvElement":
        return EnvElement(self, {})

    def gen(self, i: int) -> "EnvElement":
        if not (0 <= i < self.dim):
            raise PBWError(f"unknown generator index {i}")
        return EnvElement(self, {(i,): Q(1)})


def _merge(acc: dict, key, value: Q) -> None:
    v = acc.get(key, Q(0)) + value
    if v == 0:
        acc.pop(key, None)
    else:
        acc[key] = v


@dataclass(frozen=True)
class EnvElement:
    """Sparse element of U(g) in PBW normal form."""

    alg: EnvAlgebra
    terms: dict

    def __post_init__(self):
        object.__setattr__(self, "terms",
                           {tuple(w): rat(c) for w, c in self.terms.items() if rat(c) != 0})

    def _require_same(self, other: "EnvElement") -> None:
        if self.alg is not other.alg:
            raise PBWError("elements of different algebras")

    def __add__(self, other: "EnvElement") -> "EnvElement":
        self._require_same(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            _merge(out, w, c)
        return EnvElement(self.alg, out)

    def __sub__(self, other: "EnvElement") -> "EnvElement":
        return self + other.scale(Q(-1))

    def scale(self, c) -> "EnvElement":
        c = rat(c)
        return EnvElement(self.alg, {w: v * c for w, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Q)):
            return self.scale(other)
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, EnvElement) and self.alg is other.alg \
            and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def items(self):
        return sorted(self.terms.items())

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for w, c in self.items():
            mono = "*".join(self.alg.names[i] for i in w) if w else "1"
            bits.append(f"({c})derp{mono}".replace("derp", "*" if w else ""))
        return " + ".join(bits)


def normal_order(alg: EnvAlgebra, word: Iterable[int]) -> EnvElement:
    """The image of a raw generator word in the PBW basis."""
    return EnvElement(alg, dict(alg.normal_order_word(tuple(word))))


def multiply(x: EnvElement, y: EnvElement) -> EnvElement:
    """Concatenate then normal-order; bilinear, associative, unit = empty word."""
    x._require_same(y)
    out: dict[Word, Q] = {}
    for wx, cx in x.terms.items():
        for wy, cy in y.terms.items():
            for w, c in x.alg.normal_order_word(wx + wy).items():
                _merge(out, w, cx * cy * c)
    return EnvElement(x.alg, out)


def counit0(x: EnvElement) -> Q:
    """Projection onto the coefficient of the empty word."""
    return x.terms.get((), Q(0))


def antipode0(x: EnvElement) -> EnvElement:
    """The classical antipode: anti-homomorphism with S0(g) = -g on generators."""
    out: dict[Word, Q] = {}
    for w, c in x.terms.items():
        sign = Q(-1) ** len(w)
        for w2, c2 in x.alg.normal_order_word(tuple(reversed(w))).items():
            _merge(out, w2, sign * c * c2)
    return EnvElement(x.alg, out)


def delta0(x: EnvElement, k: int = 2) -> "EnvTensor":
    """The iterated classical coproduct U(g) -> U(g)^(x)k (primitive on generators).

    On a normal word every letter is distributed independently over the k
    slots; subsequences of a sorted word stay sorted, so no reordering is
    needed afterwards.
    """
    if k < 2:
        raise PBWError("coproduct arity must be at least 2")
    out: dict[tuple[Word, ...], Q] = {}
    for w, c in x.terms.items():
        for assignment in itertools.product(range(k), repeat=len(w)):
            slots: list[list[int]] = [[] for _ in range(k)]
            for letter, s in zip(w, assignment):
                slots[s].append(letter)
            key = tuple(tuple(s) for s in slots)
            _merge(out, key, c)
    return EnvTensor(x.alg, k, out)


@dataclass(frozen=True)
class EnvTensor:
    """Sparse element of U(g)^(x)k with componentwise normal order."""

    alg: EnvAlgebra
    arity: int
    terms: dict

    def __post_init__(self):
        cleaned = {}
        for key, c in self.terms.items():
            c = rat(c)
            if c == 0:
                continue
            key = tuple(tuple(w) for w in key)
            if len(key) != self.arity:
                raise PBWError(f"tensor term {key} has arity {len(key)}, expected {self.arity}")
            cleaned[key] = cleaned.get(key, Q(0)) + c
        object.__setattr__(self, "terms", {k: v for k, v in cleaned.items() if v != 0})

    def _require_same(self, other: "EnvTensor") -> None:
        if self.alg is not other.alg or self.arity != other.arity:
            raise PBWError("tensors over different algebras or arities")

    def __add__(self, other: "EnvTensor") -> "EnvTensor":
        self._require_same(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            _merge(out, key, c)
        return EnvTensor(self.alg, self.arity, out)

    def __sub__(self, other: "EnvTensor") -> "EnvTensor":
        return self + other.scale(Q(-1))

    def scale(self, c) -> "EnvTensor":
        c = rat(c)
        return EnvTensor(self.alg, self.arity, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Q)):
            return self.scale(other)
        return tensor_multiply(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, EnvTensor) and self.alg is other.alg \
            and self.arity == other.arity and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return sorted(self.terms.items())

    def flip(self, i: int = 0, j: int = 1) -> "EnvTensor":
        """Swap two tensor legs."""
        out = {}
        for key, c in self.terms.items():
            lst = list(key)
            lst[i], lst[j] = lst[j], lst[i]
            _merge(out, tuple(lst), c)
        return EnvTensor(self.alg, self.arity, out)

    def embed(self, arity: int, legs: tuple[int, ...]) -> "EnvTensor":
        """Place the legs of self into positions ``legs`` of a wider tensor, 1 elsewhere."""
        if len(legs) != self.arity:
            raise PBWError("embedding needs one target position per leg")
        out = {}
        for key, c in self.terms.items():
            wide: list[Word] = [() for _ in range(arity)]
            for pos, w in zip(legs, key):
                wide[pos] = w
            _merge(out, tuple(wide), c)
        return EnvTensor(self.alg, arity, out)


def tensor_multiply(x: EnvTensor, y: EnvTensor) -> EnvTensor:
    """Componentwise product with per-slot normal ordering."""
    x._require_same(y)
    alg = x.alg
    out: dict[tuple[Word, ...], Q] = {}
    for kx, cx in x.terms.items():
        for ky, cy in y.terms.items():
            partial = [((), Q(1))]
            for wx, wy in zip(kx, ky):
                ordered = alg.normal_order_word(wx + wy)
                partial = [(key + (w,), c * c2)
                           for key, c in partial for w, c2 in ordered.items()]
            for key, c in partial:
                _merge(out, key, cx * cy * c)
    return EnvTensor(alg, x.arity, out)


def tensor_of(*factors: EnvElement) -> EnvTensor:
    alg = factors[0].alg
    out: dict[tuple[Word, ...], Q] = {}
    keys = [((), Q(1))]
    for f in factors:
        if f.alg is not alg:
            raise PBWError("tensor factors over different algebras")
        keys = [(key + (w,), c * cf) for key, c in keys for w, cf in f.terms.items()]
    for key, c in keys:
        _merge(out, key, c)
    return EnvTensor(alg, len(factors), out)


def tensor_one(alg: EnvAlgebra, arity: int) -> EnvTensor:
    return EnvTensor(alg, arity, {tuple(() for _ in range(arity)): Q(1)})


# --- h-series over U(g) and U(g)^(x)k --------------------------------------

def element_series(order: int = DEFAULT_ORDER, *coeffs: EnvElement) -> HSeries:
    alg = coeffs[0].alg
    padded = list(coeffs) + [alg.zero()] * (order - len(coeffs))
    return HSeries(tuple(padded[:order]), order)


def tensor_series(order: int = DEFAULT_ORDER, *coeffs: EnvTensor) -> HSeries:
    alg, arity = coeffs[0].alg, coeffs[0].arity
    padded = list(coeffs) + [EnvTensor(alg, arity, {})] * (order - len(coeffs))
    return HSeries(tuple(padded[:order]), order)


def series_is_zero(s: HSeries) -> bool:
    return all(c.is_zero() for c in s.coeffs)
