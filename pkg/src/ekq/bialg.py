"""Lie bialgebra data, axiom checking, duality, and the fixture catalog.

A Lie bialgebra on a based n-dimensional space is stored through two sparse
3-index tables of structure constants:

* ``c[(i, j, k)]``: bracket, [a_i, a_j] = sum_k c_ijk a_k,
* ``f[(i, j, k)]``: cobracket, delta(a_i) = sum_{j,k} f_ijk a_j (x) a_k.

Indices are 0-based internally; the JSON interchange format is 1-based.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .kernel import Q, rat, rat_str, solve_in_span

Table = Mapping[tuple[int, int, int], Q]


class BialgebraError(ValueError):
    """Invalid structure constants or an invalid homomorphism."""


def _prune(table: Mapping) -> dict:
    return {tuple(k): rat(v) for k, v in table.items() if rat(v) != 0}


@dataclass(frozen=True)
class LieBialgebra:
    dim: int
    names: tuple[str, ...]
    c: dict = field(default_factory=dict)
    f: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "c", _prune(self.c))
        object.__setattr__(self, "f", _prune(self.f))
        if len(self.names) != self.dim:
            raise BialgebraError("need one basis name per dimension")
        for (i, j, k) in list(self.c) + list(self.f):
            if not all(0 <= t < self.dim for t in (i, j, k)):
                raise BialgebraError("structure constant index out of range")

    def bracket(self, i: int, j: int) -> dict[int, Q]:
        """[a_i, a_j] as a sparse coefficient vector."""
        out = {}
        for k in range(self.dim):
            v = self.c.get((i, j, k), Q(0))
            if v != 0:
                out[k] = v
        return out

    def cobracket(self, i: int) -> dict[tuple[int, int], Q]:
        """delta(a_i) as a sparse element of a (x) a."""
        out = {}
        for (p, j, k), v in self.f.items():
            if p == i:
                out[(j, k)] = out.get((j, k), Q(0)) + v
        return {k: v for k, v in out.items() if v != 0}


@dataclass(frozen=True)
class Violation:
    family: str
    indices: tuple[int, ...]
    residual: Q


@dataclass(frozen=True)
class CheckReport:
    valid: bool
    violations: tuple[Violation, ...]

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "violations": [
                {"identity": v.family,
                 "indices": [i + 1 for i in v.indices],
                 "residual": rat_str(v.residual)}
                for v in self.violations
            ],
        }


def _bracket_on_tensor(c: Table, dim: int, x: Mapping[int, Q],
                       t: Mapping[tuple[int, int], Q], slot: int) -> dict[tuple[int, int], Q]:
    """[x (x) 1 + 1 (x) x, t] restricted to acting in one slot (ad_x on slot)."""
    out: dict[tuple[int, int], Q] = {}
    for (p, q), cv in t.items():
        for i, xv in x.items():
            src = p if slot == 0 else q
            for k in range(dim):
                coeff = c.get((i, src, k), Q(0))
                if coeff == 0:
                    continue
                key = (k, q) if slot == 0 else (p, k)
                out[key] = out.get(key, Q(0)) + xv * cv * coeff
    return {k: v for k, v in out.items() if v != 0}


def check_lie_bialgebra(dim: int, c: Table, f: Table,
                        names: Iterable[str] | None = None,
                        max_violations: int = 16) -> CheckReport:
    """Check antisymmetries, Jacobi, co-Jacobi, and the cocycle identity exactly.

    Every violated identity is reported with the index tuple where it fails and
    the nonzero residual at that position.
    """
    c = _prune(c)
    f = _prune(f)
    violations: list[Violation] = []

    def record(family, indices, residual):
        if residual != 0 and len(violations) < max_violations:
            violations.append(Violation(family, tuple(indices), residual))

    for i, j, k in itertools.product(range(dim), repeat=3):
        record("bracket-antisymmetry", (i, j, k),
               c.get((i, j, k), Q(0)) + c.get((j, i, k), Q(0)))
        record("cobracket-antisymmetry", (i, j, k),
               f.get((i, j, k), Q(0)) + f.get((i, k, j), Q(0)))

    # Jacobi for c: sum over cyclic rotations of [[a_i,a_j],a_k].
    for i, j, k, m in itertools.product(range(dim), repeat=4):
        total = Q(0)
        for (x, y, z) in ((i, j, k), (j, k, i), (k, i, j)):
            for t in range(dim):
                total += c.get((x, y, t), Q(0)) * c.get((t, z, m), Q(0))
        record("jacobi", (i, j, k, m), total)

    # Co-Jacobi: Jacobi identity of the dual bracket c*_{jk}^i = f_{i}^{jk}.
    cdual = {(j, k, i): v for (i, j, k), v in f.items()}
    for i, j, k, m in itertools.product(range(dim), repeat=4):
        total = Q(0)
        for (x, y, z) in ((i, j, k), (j, k, i), (k, i, j)):
            for t in range(dim):
                total += cdual.get((x, y, t), Q(0)) * cdual.get((t, z, m), Q(0))
        record("co-jacobi", (i, j, k, m), total)

    # Cocycle identity: delta([a_i,a_j]) = ad_i delta(a_j) - ad_j delta(a_i).
    bial = None
    for i, j in itertools.product(range(dim), repeat=2):
        lhs: dict[tuple[int, int], Q] = {}
        for t in range(dim):
            cv = c.get((i, j, t), Q(0))
            if cv == 0:
                continue
            for (p, q), fv in {(p, q): v for (s, p, q), v in f.items() if s == t}.items():
                lhs[(p, q)] = lhs.get((p, q), Q(0)) + cv * fv
        rhs: dict[tuple[int, int], Q] = {}
        di = {(p, q): v for (s, p, q), v in f.items() if s == j}
        dj = {(p, q): v for (s, p, q), v in f.items() if s == i}
        for slot in (0, 1):
            for key, v in _bracket_on_tensor(c, dim, {i: Q(1)}, di, slot).items():
                rhs[key] = rhs.get(key, Q(0)) + v
            for key, v in _bracket_on_tensor(c, dim, {j: Q(1)}, dj, slot).items():
                rhs[key] = rhs.get(key, Q(0)) - v
        for p, q in itertools.product(range(dim), repeat=2):
            record("cocycle", (i, j, p, q),
                   lhs.get((p, q), Q(0)) - rhs.get((p, q), Q(0)))

    return CheckReport(valid=not violations, violations=tuple(violations))


def validate(g: LieBialgebra) -> LieBialgebra:
    report = check_lie_bialgebra(g.dim, g.c, g.f, g.names)
    if not report.valid:
        first = report.violations[0]
        raise BialgebraError(
            f"not a Lie bialgebra: {first.family} fails at {first.indices} "
            f"with residual {first.residual}"
        )
    return g


def make_bialgebra(dim: int, c: Mapping, f: Mapping,
                   names: Iterable[str] | None = None) -> LieBialgebra:
    names = tuple(names) if names is not None else tuple(f"a{i+1}" for i in range(dim))
    return validate(LieBialgebra(dim, names, dict(c), dict(f)))


def dualize(g: LieBialgebra) -> LieBialgebra:
    """Swap the roles of bracket and cobracket: c'_{ij}^k = f_k^{ij}, f'_i^{jk} = c_{jk}^i."""
    validate(g)
    c2 = {(i, j, k): v for (k, i, j), v in g.f.items()}
    f2 = {(i, j, k): v for (j, k, i), v in g.c.items()}
    names = tuple(n + "*" if not n.endswith("*") else n[:-1] for n in g.names)
    return LieBialgebra(g.dim, names, c2, f2)


def coboundary_from_r(dim: int, c: Table, r: Mapping[tuple[int, int], Q],
                      names: Iterable[str] | None = None,
                      require_triangular: bool = False) -> LieBialgebra:
    """Build the coboundary cobracket delta(x) = [x (x) 1 + 1 (x) x, r].

    Requires c to satisfy Jacobi, r to be antisymmetric, and the
    Yang-Baxter obstruction of r to be ad-invariant (to vanish, when
    ``require_triangular``); the result then passes the full bialgebra check.
    """
    c = _prune(c)
    r = {tuple(k): rat(v) for k, v in r.items() if rat(v) != 0}
    base = check_lie_bialgebra(dim, c, {})
    jacobi = [v for v in base.violations if v.family in ("jacobi", "bracket-antisymmetry")]
    if jacobi:
        raise BialgebraError(f"bracket is not a Lie algebra: {jacobi[0]}")
    for (i, j), v in r.items():
        if r.get((j, i), Q(0)) != -v:
            raise BialgebraError(f"r is not antisymmetric at {(i, j)}")

    obstruction = _cybe_obstruction(dim, c, r)
    for x in range(dim):
        inv = _ad_invariance_defect(dim, c, obstruction, x)
        if inv:
            key, val = next(iter(sorted(inv.items())))
            raise BialgebraError(
                f"CYBE obstruction of r is not ad-invariant: defect {val} at {key}"
            )
    if require_triangular and obstruction:
        key, val = next(iter(sorted(obstruction.items())))
        raise BialgebraError(f"r is not triangular: CYBE residual {val} at {key}")

    f = {}
    for i in range(dim):
        delta: dict[tuple[int, int], Q] = {}
        for slot in (0, 1):
            for key, v in _bracket_on_tensor(c, dim, {i: Q(1)}, r, slot).items():
                delta[key] = delta.get(key, Q(0)) + v
        for (j, k), v in delta.items():
            if v != 0:
                f[(i, j, k)] = v
    return make_bialgebra(dim, c, f, names)


def _cybe_obstruction(dim: int, c: Table,
                      r: Mapping[tuple[int, int], Q]) -> dict[tuple[int, int, int], Q]:
    """[r12, r13] + [r12, r23] + [r13, r23] inside a^(x)3 (all brackets land in a)."""
    out: dict[tuple[int, int, int], Q] = {}

    def add(key, v):
        w = out.get(key, Q(0)) + v
        if w == 0:
            out.pop(key, None)
        else:
            out[key] = w

    for (i, j), u in r.items():
        for (k, l), w in r.items():
            for m in range(dim):
                cv = c.get((i, k, m), Q(0))
                if cv != 0:
                    add((m, j, l), u * w * cv)   # [r12, r13]: bracket in slot 1
                cv = c.get((j, k, m), Q(0))
                if cv != 0:
                    add((i, m, l), u * w * cv)   # [r12, r23]: bracket in slot 2
                cv = c.get((j, l, m), Q(0))
                if cv != 0:
                    add((i, k, m), u * w * cv)   # [r13, r23]: bracket in slot 3
    return out


def _ad_invariance_defect(dim: int, c: Table, t: Mapping[tuple[int, int, int], Q],
                          x: int) -> dict[tuple[int, int, int], Q]:
    out: dict[tuple[int, int, int], Q] = {}
    for key, v in t.items():
        for slot in range(3):
            for m in range(dim):
                cv = c.get((x, key[slot], m), Q(0))
                if cv == 0:
                    continue
                new = list(key)
                new[slot] = m
                new = tuple(new)
                w = out.get(new, Q(0)) + v * cv
                if w == 0:
                    out.pop(new, None)
                else:
                    out[new] = w
    return out


# ---------------------------------------------------------------------------
# homomorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BialgebraHom:
    """A linear map source -> target commuting with brackets and cobrackets.

    ``matrix[k][i]`` is the coefficient of the target basis vector k in the
    image of source basis vector i.
    """

    source: LieBialgebra
    target: LieBialgebra
    matrix: tuple[tuple[Q, ...], ...]

    def apply(self, i: int) -> dict[int, Q]:
        return {k: self.matrix[k][i] for k in range(self.target.dim)
                if self.matrix[k][i] != 0}

    def check(self) -> list[str]:
        """Return human-readable defects (empty when the map is a hom)."""
        src, tgt, m = self.source, self.target, self.matrix
        defects = []
        for i, j in itertools.product(range(src.dim), repeat=2):
            # f([a_i, a_j]) vs [f(a_i), f(a_j)]
            lhs: dict[int, Q] = {}
            for t, v in src.bracket(i, j).items():
                for k in range(tgt.dim):
                    if m[k][t] != 0:
                        lhs[k] = lhs.get(k, Q(0)) + v * m[k][t]
            rhs: dict[int, Q] = {}
            for p in range(tgt.dim):
                if m[p][i] == 0:
                    continue
                for q in range(tgt.dim):
                    if m[q][j] == 0:
                        continue
                    for k, v in tgt.bracket(p, q).items():
                        rhs[k] = rhs.get(k, Q(0)) + m[p][i] * m[q][j] * v
            if any(lhs.get(k, Q(0)) != rhs.get(k, Q(0)) for k in range(tgt.dim)):
                defects.append(f"bracket not intertwined at ({i}, {j})")
        for i in range(src.dim):
            # (f (x) f)(delta(a_i)) vs delta(f(a_i))
            lhs2: dict[tuple[int, int], Q] = {}
            for (j, k), v in src.cobracket(i).items():
                for p in range(tgt.dim):
                    if m[p][j] == 0:
                        continue
                    for q in range(tgt.dim):
                        if m[q][k] == 0:
                            continue
                        key = (p, q)
                        lhs2[key] = lhs2.get(key, Q(0)) + v * m[p][j] * m[q][k]
            rhs2: dict[tuple[int, int], Q] = {}
            for t in range(tgt.dim):
                if m[t][i] == 0:
                    continue
                for (p, q), v in tgt.cobracket(t).items():
                    rhs2[(p, q)] = rhs2.get((p, q), Q(0)) + m[t][i] * v
            lhs2 = {k: v for k, v in lhs2.items() if v != 0}
            rhs2 = {k: v for k, v in rhs2.items() if v != 0}
            if lhs2 != rhs2:
                defects.append(f"cobracket not intertwined at {i}")
        return defects


def make_hom(source: LieBialgebra, target: LieBialgebra,
             matrix: Iterable[Iterable] ) -> BialgebraHom:
    mat = tuple(tuple(rat(x) for x in row) for row in matrix)
    if len(mat) != target.dim or any(len(row) != source.dim for row in mat):
        raise BialgebraError("hom matrix must be dim(target) x dim(source)")
    hom = BialgebraHom(source, target, mat)
    defects = hom.check()
    if defects:
        raise BialgebraError("not a bialgebra homomorphism: " + "; ".join(defects))
    return hom


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Catalog:
    bialgebras: dict[str, LieBialgebra]
    homs: dict[str, BialgebraHom]


def catalog() -> Catalog:
    """Named test fixtures; every entry passes the full axiom check."""
    one = Q(1)
    fixtures: dict[str, LieBialgebra] = {}

    for n in (1, 2, 3):
        fixtures[f"abelian{n}"] = make_bialgebra(n, {}, {})

    # [a1, a2] = a2 with delta(a2) = a1 ^ a2.
    axb = make_bialgebra(
        2,
        {(0, 1, 1): one, (1, 0, 1): -one},
        {(1, 0, 1): one, (1, 1, 0): -one},
    )
    fixtures["axb"] = axb
    fixtures["axb_dual"] = dualize(axb)

    # Abelian bracket with delta(a1) = a1 ^ a2.
    fixtures["delta2"] = make_bialgebra(
        2, {}, {(0, 0, 1): one, (0, 1, 0): -one})

    # Triangular coboundary on [a1, a2] = a2 from r = a1 ^ a2.
    fixtures["axb_tri"] = coboundary_from_r(
        2,
        {(0, 1, 1): one, (1, 0, 1): -one},
        {(0, 1): one, (1, 0): -one},
        require_triangular=True,
    )

    # Heisenberg algebra [e1, e2] = e3 with the coboundary of r = e1 ^ e2
    # (nonzero but invariant Yang-Baxter obstruction).
    fixtures["heis3r"] = coboundary_from_r(
        3,
        {(0, 1, 2): one, (1, 0, 2): -one},
        {(0, 1): one, (1, 0): -one},
        names=("e1", "e2", "e3"),
    )

    homs = {
        "id_axb": make_hom(axb, axb, [[1, 0], [0, 1]]),
        "incl_abelian1_axb": make_hom(fixtures["abelian1"], axb, [[1], [0]]),
        "incl_abelian1_heis3r": make_hom(fixtures["abelian1"], fixtures["heis3r"],
                                         [[0], [0], [1]]),
        "zero_axb_abelian2": make_hom(axb, fixtures["abelian2"], [[0, 0], [0, 0]]),
    }
    return Catalog(fixtures, homs)


# ---------------------------------------------------------------------------
# JSON interchange (1-based indices on the wire)
# ---------------------------------------------------------------------------

def _table_from_records(records, dim, auto_antisymmetrize, kind):
    table: dict[tuple[int, int, int], Q] = {}
    for rec in records:
        try:
            i, j, k = rec["i"] - 1, rec["j"] - 1, rec["k"] - 1
            coeff = rat(rec["coeff"])
        except (KeyError, TypeError) as exc:
            raise BialgebraError(f"malformed {kind} record {rec!r}") from exc
        if not all(0 <= t < dim for t in (i, j, k)):
            raise BialgebraError(f"{kind} record {rec!r} out of range")
        table[(i, j, k)] = table.get((i, j, k), Q(0)) + coeff
    if auto_antisymmetrize:
        flipped = {}
        for (i, j, k), v in table.items():
            pair = (j, i, k) if kind == "bracket" else (i, k, j)
            if pair not in table:
                flipped[pair] = -v
        table.update(flipped)
    return table


def from_json(data: dict) -> LieBialgebra:
    try:
        dim = int(data["dim"])
        names = tuple(data.get("basis") or [f"a{i+1}" for i in range(dim)])
    except (KeyError, TypeError) as exc:
        raise BialgebraError("bialgebra JSON needs at least a 'dim' field") from exc
    auto = bool(data.get("auto_antisymmetrize", False))
    c = _table_from_records(data.get("bracket", []), dim, auto, "bracket")
    f = _table_from_records(data.get("cobracket", []), dim, auto, "cobracket")
    return make_bialgebra(dim, c, f, names)


def to_json(g: LieBialgebra) -> dict:
    return {
        "dim": g.dim,
        "basis": list(g.names),
        "bracket": [
            {"i": i + 1, "j": j + 1, "k": k + 1, "coeff": rat_str(v)}
            for (i, j, k), v in sorted(g.c.items())
        ],
        "cobracket": [
            {"i": i + 1, "j": j + 1, "k": k + 1, "coeff": rat_str(v)}
            for (i, j, k), v in sorted(g.f.items())
        ],
    }


def load(path: str) -> LieBialgebra:
    with open(path, "r", encoding="utf-8") as fh:
        return from_json(json.load(fh))
