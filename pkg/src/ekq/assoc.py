"""Casimir insertions, the truncated associator, braidings, and coherence checks.

Operators act on sparse vectors in tensor products of module slots over one
double: M+ ("mp", b-words), M- ("mm", a-words), and the truncated dual M+*
("dual", coefficients in the rho basis).  A vector is stored per h-order,
each order carrying its own per-slot depth bounds for dual slots: a Casimir
insertion touching a dual slot costs one level of depth there, and the
bookkeeping refuses to read past solved depth instead of silently truncating.

The associator is modeled only through its forced truncation

    Phi = 1 + (h^2 / 24) [t12, t23] + O(h^3),

with t_ij realized as the Casimir insertion Omega_ij and grouped insertions
t_ij -> sum of Omega_pq over the partition blocks.  Requesting order > 3
is a configuration error: higher coefficients depend on a choice of
associator that this library deliberately does not make.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .kernel import DEFAULT_ORDER, Q
from .manin import DoubleAlgebra
from .verma import DegreeBoundError, VermaError, actions

Word = tuple[int, ...]

KINDS = ("mp", "mm", "dual")


class AssocError(ValueError):
    pass


def require_order(order: int) -> int:
    if order > 3:
        raise AssocError(
            "truncation order > 3 needs associator coefficients beyond the forced "
            "h^2 term; supply them explicitly or stay within order 3"
        )
    if order < 1:
        raise AssocError("truncation order must be at least 1")
    return order


@dataclass(frozen=True)
class SlotSpace:
    """An ordered list of module slots over one double."""

    d: DoubleAlgebra
    kinds: tuple[str, ...]

    def __post_init__(self):
        for k in self.kinds:
            if k not in KINDS:
                raise AssocError(f"unknown slot kind {k!r}")

    @property
    def arity(self) -> int:
        return len(self.kinds)

    def swap(self, i: int, j: int) -> "SlotSpace":
        kinds = list(self.kinds)
        kinds[i], kinds[j] = kinds[j], kinds[i]
        return SlotSpace(self.d, tuple(kinds))

    def drop(self, positions: Sequence[int]) -> "SlotSpace":
        kinds = tuple(k for t, k in enumerate(self.kinds) if t not in positions)
        return SlotSpace(self.d, kinds)


@dataclass(frozen=True)
class Component:
    """One h-order of a slot vector: terms plus per-slot dual depth bounds."""

    bounds: tuple
    terms: dict

    def is_zero(self) -> bool:
        return not self.terms


def _merge(acc: dict, key, value: Q) -> None:
    v = acc.get(key, Q(0)) + value
    if v == 0:
        acc.pop(key, None)
    else:
        acc[key] = v


def _merge_component(a: Component | None, b: Component) -> Component:
    if a is None:
        return b
    bounds = tuple(
        x if y is None else y if x is None else min(x, y)
        for x, y in zip(a.bounds, b.bounds)
    )
    terms = dict(a.terms)
    for key, c in b.terms.items():
        _merge(terms, key, c)
    return Component(bounds, terms)


@dataclass(frozen=True)
class SlotVector:
    """h-series of vectors in the tensor product of the slots."""

    space: SlotSpace
    comps: tuple  # one Component per h-order

    @property
    def order(self) -> int:
        return len(self.comps)

    def map_comps(self, fn) -> "SlotVector":
        return SlotVector(self.space, tuple(fn(c) for c in self.comps))

    def __add__(self, other: "SlotVector") -> "SlotVector":
        if self.space != other.space or self.order != other.order:
            raise AssocError("slot vector mismatch")
        return SlotVector(self.space, tuple(
            _merge_component(a, b) for a, b in zip(self.comps, other.comps)))

    def __sub__(self, other: "SlotVector") -> "SlotVector":
        return self + other.scale(Q(-1))

    def scale(self, c: Q) -> "SlotVector":
        return self.map_comps(lambda comp: Component(
            comp.bounds, {k: v * c for k, v in comp.terms.items()} if c != 0 else {}))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)


def unit_vector(space: SlotSpace, bounds: Sequence[int | None] | None = None,
                order: int = DEFAULT_ORDER, key: tuple | None = None) -> SlotVector:
    """The vector (1..., 1...) (or a given basis key) at h^0."""
    require_order(order)
    if bounds is None:
        bounds = tuple(None for _ in space.kinds)
    bounds = tuple(bounds)
    for k, b in zip(space.kinds, bounds):
        if (k == "dual") != (b is not None):
            raise AssocError("dual slots (exactly) need depth bounds")
    if key is None:
        key = tuple(() for _ in space.kinds)
    comps = [Component(bounds, {tuple(map(tuple, key)): Q(1)})]
    empty = Component(bounds, {})
    comps.extend([empty] * (order - 1))
    return SlotVector(space, tuple(comps))


def from_components(space: SlotSpace, comps: Iterable[Component]) -> SlotVector:
    return SlotVector(space, tuple(comps))


# ---------------------------------------------------------------------------
# generator actions per slot kind
# ---------------------------------------------------------------------------

def _b_words(d: DoubleAlgebra, length: int):
    return itertools.combinations_with_replacement(range(d.n, d.dim), length)


def _act_dual(d: DoubleAlgebra, gen: int, alpha: Word, out_bound: int) -> dict[Word, Q]:
    """gen . rho_alpha as a combination of rho_gamma, |gamma| <= out_bound."""
    acts = actions(d)
    out: dict[Word, Q] = {}
    for length in range(out_bound + 1):
        for gamma in _b_words(d, length):
            lam = -acts.act_plus(gen, gamma).get(alpha, Q(0))
            if lam != 0:
                out[gamma] = lam
    return out


class _Engine:
    """Per-double caches for slot actions."""

    def __init__(self, d: DoubleAlgebra):
        self.d = d
        self._dual_cache: dict[tuple[int, Word, int], dict[Word, Q]] = {}

    def act(self, kind: str, gen: int, word: Word, out_bound: int | None) -> dict[Word, Q]:
        acts = actions(self.d)
        if kind == "mp":
            return acts.act_plus(gen, word)
        if kind == "mm":
            return acts.act_minus(gen, word)
        key = (gen, word, out_bound)
        found = self._dual_cache.get(key)
        if found is None:
            found = _act_dual(self.d, gen, word, out_bound)
            self._dual_cache[key] = found
        return found


_ENGINES: dict[int, _Engine] = {}


def _engine(d: DoubleAlgebra) -> _Engine:
    e = _ENGINES.get(id(d))
    if e is None or e.d is not d:
        e = _Engine(d)
        _ENGINES[id(d)] = e
    return e


def _apply_two_gens(space: SlotSpace, comp: Component, i: int, gi: int,
                    j: int, gj: int) -> Component:
    """(gi acting in slot i) then (gj in slot j), i != j; slot actions commute."""
    d = space.d
    eng = _engine(d)
    bounds = list(comp.bounds)
    for t in (i, j):
        if space.kinds[t] == "dual":
            if bounds[t] is None or bounds[t] < 1:
                raise DegreeBoundError(
                    f"dual slot {t} has no depth left for a Casimir insertion")
            bounds[t] -= 1
    terms: dict = {}
    for key, c in comp.terms.items():
        for wi, ci in eng.act(space.kinds[i], gi, key[i],
                              bounds[i] if space.kinds[i] == "dual" else None).items():
            for wj, cj in eng.act(space.kinds[j], gj, key[j],
                                  bounds[j] if space.kinds[j] == "dual" else None).items():
                new = list(key)
                new[i], new[j] = wi, wj
                _merge(terms, tuple(new), c * ci * cj)
    return Component(tuple(bounds), terms)


def omega_component(space: SlotSpace, comp: Component, i: int, j: int) -> Component:
    """Casimir insertion: sum_k a_k|i b^k|j + b^k|i a_k|j."""
    if i == j:
        raise AssocError("Casimir insertion needs two distinct slots")
    d = space.d
    out = None
    for k in range(d.n):
        out = _merge_component(out, _apply_two_gens(space, comp, i, k, j, k + d.n))
        out = _merge_component(out, _apply_two_gens(space, comp, i, k + d.n, j, k))
    return out if out is not None else Component(comp.bounds, {})


def omega_insert(v: SlotVector, i: int, j: int) -> SlotVector:
    """Omega_ij applied at every h-order (an h-independent operator)."""
    return v.map_comps(lambda c: omega_component(v.space, c, i, j))


def _t_sum(space: SlotSpace, comp: Component, pairs: Sequence[tuple[int, int]]) -> Component:
    out = None
    for (i, j) in pairs:
        out = _merge_component(out, omega_component(space, comp, i, j))
    return out if out is not None else Component(comp.bounds, {})


def grouped_pairs(p_left: Sequence[int], p_right: Sequence[int]) -> list[tuple[int, int]]:
    """The slot pairs of a grouped insertion t_ab -> sum over the blocks."""
    if set(p_left) & set(p_right):
        raise AssocError("partition blocks must be disjoint")
    return [(p, q) for p in p_left for q in p_right]


def grouped(partition: Sequence[Sequence[int]], word: Sequence[tuple[int, int]]):
    """A word in the t_ij, instantiated on slots through a partition.

    ``word`` lists factors (a, b) meaning t_{ab} (1-based positions within the
    partition); the result is a function Component -> Component applying the
    factors right to left.
    """
    blocks = [tuple(b) for b in partition]
    seen: set[int] = set()
    for b in blocks:
        if seen & set(b):
            raise AssocError("partition blocks must be disjoint")
        seen |= set(b)
    factor_pairs = [grouped_pairs(blocks[a - 1], blocks[b - 1]) for (a, b) in word]

    def apply(space: SlotSpace, comp: Component) -> Component:
        for pairs in reversed(factor_pairs):
            comp = _t_sum(space, comp, pairs)
        return comp

    return apply


def phi_apply(v: SlotVector, partition: Sequence[Sequence[int]],
              inverse: bool = False) -> SlotVector:
    """The truncated associator on grouped slots: 1 +- (h^2/24) [T12, T23]."""
    space = v.space
    t12_t23 = grouped(partition, [(1, 2), (2, 3)])
    t23_t12 = grouped(partition, [(2, 3), (1, 2)])
    sign = Q(-1, 24) if inverse else Q(1, 24)
    comps = list(v.comps)
    for k in range(v.order - 2):
        if v.comps[k].is_zero():
            continue
        left = t12_t23(space, v.comps[k])
        right = t23_t12(space, v.comps[k])
        com = _merge_component(
            left, Component(right.bounds, {key: -c for key, c in right.terms.items()}))
        scaled = Component(com.bounds, {key: c * sign for key, c in com.terms.items()})
        comps[k + 2] = _merge_component(comps[k + 2], scaled)
    return SlotVector(space, tuple(comps))


def exp_insert(v: SlotVector, pairs: Sequence[tuple[int, int]], sign: int = 1,
               half: bool = True) -> SlotVector:
    """exp(sign * h * T / 2) with T the sum of Omega over ``pairs``."""
    space = v.space
    denom = Q(2) if half else Q(1)
    comps = list(v.comps)
    for k in range(v.order - 1):
        # contributions landing past the truncation are never computed, so
        # they cannot consume dual-slot depth
        if v.comps[k].is_zero():
            continue
        first = _t_sum(space, v.comps[k], pairs)
        comps[k + 1] = _merge_component(comps[k + 1], Component(
            first.bounds, {key: c * sign / denom for key, c in first.terms.items()}))
        if k + 2 < v.order:
            second = _t_sum(space, first, pairs)
            comps[k + 2] = _merge_component(comps[k + 2], Component(
                second.bounds,
                {key: c / (2 * denom * denom) for key, c in second.terms.items()}))
    return SlotVector(space, tuple(comps))


def swap_slots(v: SlotVector, i: int, j: int) -> SlotVector:
    space = v.space.swap(i, j)
    comps = []
    for comp in v.comps:
        bounds = list(comp.bounds)
        bounds[i], bounds[j] = bounds[j], bounds[i]
        terms = {}
        for key, c in comp.terms.items():
            new = list(key)
            new[i], new[j] = new[j], new[i]
            terms[tuple(new)] = c
        comps.append(Component(tuple(bounds), terms))
    return SlotVector(space, tuple(comps))


def braid(v: SlotVector, i: int) -> SlotVector:
    """beta on slots (i, i+1): exp(h Omega / 2) then the swap."""
    return swap_slots(exp_insert(v, [(i, i + 1)], sign=1), i, i + 1)


def braid_gamma(v: SlotVector, i: int) -> SlotVector:
    """gamma on slots (i, i+1): the swap, then exp(-h Omega / 2)."""
    return exp_insert(swap_slots(v, i, i + 1), [(i, i + 1)], sign=-1)


def diagonal_act(v: SlotVector, gen: int) -> SlotVector:
    """The diagonal action of a Lie algebra basis vector on all slots."""
    eng = _engine(v.space.d)

    def per_comp(comp: Component) -> Component:
        bounds = list(comp.bounds)
        for t, kind in enumerate(v.space.kinds):
            if kind == "dual":
                if bounds[t] is None or bounds[t] < 1:
                    raise DegreeBoundError("dual slot depth exhausted")
                bounds[t] -= 1
        terms: dict = {}
        for key, c in comp.terms.items():
            for slot in range(v.space.arity):
                for w, cw in eng.act(v.space.kinds[slot], gen, key[slot],
                                     bounds[slot] if v.space.kinds[slot] == "dual"
                                     else None).items():
                    new = list(key)
                    new[slot] = w
                    _merge(terms, tuple(new), c * cw)
        return Component(tuple(bounds), terms)

    return v.map_comps(per_comp)


def evaluate_duals(v: SlotVector) -> dict[int, dict[tuple, Q]]:
    """Pair every dual slot with 1+ and drop it; returns {h_order: terms}."""
    space = v.space
    dual_slots = [t for t, k in enumerate(space.kinds) if k == "dual"]
    out: dict[int, dict[tuple, Q]] = {}
    for k, comp in enumerate(v.comps):
        for t in dual_slots:
            if comp.terms and comp.bounds[t] is not None and comp.bounds[t] < 0:
                raise DegreeBoundError("dual slot over-consumed before evaluation")
        terms: dict[tuple, Q] = {}
        for key, c in comp.terms.items():
            if any(key[t] != () for t in dual_slots):
                continue
            reduced = tuple(w for t, w in enumerate(key) if t not in dual_slots)
            _merge(terms, reduced, c)
        out[k] = terms
    return out


# ---------------------------------------------------------------------------
# pentagon / hexagon residuals on generated test vectors
# ---------------------------------------------------------------------------

def generated_vectors(space: SlotSpace, max_insertions: int = 2,
                 order: int = DEFAULT_ORDER) -> list[SlotVector]:
    """Highest-weight product vectors hit by up to ``max_insertions`` generators."""
    if any(k == "dual" for k in space.kinds):
        raise AssocError("test vectors are generated on module slots only")
    d = space.d
    base = unit_vector(space, order=order)
    vectors = [base]
    if max_insertions < 1:
        return vectors
    eng = _engine(d)

    def hit(v: SlotVector, slot: int, gen: int) -> SlotVector | None:
        def per_comp(comp: Component) -> Component:
            terms: dict = {}
            for key, c in comp.terms.items():
                for w, cw in eng.act(space.kinds[slot], gen, key[slot], None).items():
                    new = list(key)
                    new[slot] = w
                    _merge(terms, tuple(new), c * cw)
            return Component(comp.bounds, terms)
        out = v.map_comps(per_comp)
        return None if out.is_zero() else out

    singles = []
    for slot in range(space.arity):
        for gen in range(d.dim):
            v = hit(base, slot, gen)
            if v is not None:
                singles.append(((slot, gen), v))
    vectors.extend(v for _, v in singles)
    if max_insertions >= 2:
        for (slot1, gen1), v in singles:
            for slot2 in range(slot1, space.arity):
                for gen2 in range(d.dim):
                    if slot2 == slot1 and gen2 < gen1:
                        continue
                    w = hit(v, slot2, gen2)
                    if w is not None:
                        vectors.append(w)
    return vectors


def pentagon_residual(d: DoubleAlgebra, kinds: Sequence[str] = ("mp", "mp", "mm", "mm"),
                      order: int = DEFAULT_ORDER) -> list[SlotVector]:
    """Differences of the two pentagon sides on the generated vector set."""
    space = SlotSpace(d, tuple(kinds))
    residuals = []
    for v in generated_vectors(space, order=order):
        lhs = phi_apply(phi_apply(v, [(0, 1), (2,), (3,)]), [(0,), (1,), (2, 3)])
        rhs = phi_apply(phi_apply(phi_apply(v, [(0,), (1,), (2,)]),
                                  [(0,), (1, 2), (3,)]),
                        [(1,), (2,), (3,)])
        delta = lhs - rhs
        if not delta.is_zero():
            residuals.append(delta)
    return residuals


def hexagon_residuals(d: DoubleAlgebra, kinds: Sequence[str] = ("mp", "mm", "mm"),
                      order: int = DEFAULT_ORDER) -> tuple[list[SlotVector], list[SlotVector]]:
    """Residuals of the two hexagon identities with B = exp(h t12 / 2)."""
    space = SlotSpace(d, tuple(kinds))
    first, second = [], []
    for v in generated_vectors(space, order=order):
        # B_{12,3} = Phi_{3,1,2} B_{1,3} Phi_{1,3,2}^{-1} B_{2,3} Phi_{1,2,3}
        lhs = exp_insert(v, [(0, 2), (1, 2)])
        rhs = phi_apply(v, [(0,), (1,), (2,)])
        rhs = exp_insert(rhs, [(1, 2)])
        rhs = phi_apply(rhs, [(0,), (2,), (1,)], inverse=True)
        rhs = exp_insert(rhs, [(0, 2)])
        rhs = phi_apply(rhs, [(2,), (0,), (1,)])
        delta = lhs - rhs
        if not delta.is_zero():
            first.append(delta)
        # B_{1,23} = Phi_{2,3,1}^{-1} B_{1,3} Phi_{2,1,3} B_{1,2} Phi_{1,2,3}^{-1}
        lhs2 = exp_insert(v, [(0, 1), (0, 2)])
        rhs2 = phi_apply(v, [(0,), (1,), (2,)], inverse=True)
        rhs2 = exp_insert(rhs2, [(0, 1)])
        rhs2 = phi_apply(rhs2, [(1,), (0,), (2,)])
        rhs2 = exp_insert(rhs2, [(0, 2)])
        rhs2 = phi_apply(rhs2, [(1,), (2,), (0,)], inverse=True)
        delta2 = lhs2 - rhs2
        if not delta2.is_zero():
            second.append(delta2)
    return first, second
