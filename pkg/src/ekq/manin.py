"""The Drinfeld double g = a + a* as a Manin triple, with full verification.

Basis order is a_1 < ... < a_n < b^1 < ... < b^n (indices 0..n-1 and n..2n-1),
matching the PBW factorization U(g+) . U(g-).  The three bracket families are

    [a_i, a_j] = c_ij^k a_k
    [b^i, b^j] = f_k^ij b^k
    [a_i, b^j] = f_i^jk a_k - c_ik^j b^k

and the mixed family is cross-validated at build time against the
coordinate-free form (ad* a)b - (1 (x) b)(delta(a)), which pins every sign
convention.  The pairing is <a_i, b^j> = delta_i^j with both blocks isotropic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from .bialg import LieBialgebra, validate
from .kernel import Q, rat
from .pbw import EnvAlgebra, EnvTensor, Word, tensor_one


class DoubleError(ValueError):
    """An internal consistency failure while assembling the double.

    Outside of an invalid input bialgebra this indicates a convention bug,
    not user error, so the message names the violated identity.
    """


@dataclass(frozen=True)
class DoubleAlgebra:
    base: LieBialgebra
    dim: int                      # 2n
    structure: dict               # (i, j) -> {k: coeff}, over the double basis
    pairing: tuple                # dim x dim matrix of rationals
    r: dict                       # canonical element, (i, j) -> coeff
    omega: dict                   # r + r^op

    @property
    def n(self) -> int:
        return self.base.dim

    @cached_property
    def env(self) -> EnvAlgebra:
        names = tuple(self.base.names) + tuple(f"b{i+1}" for i in range(self.n))
        return EnvAlgebra(self.dim, self.structure, names)

    def bracket(self, i: int, j: int) -> dict[int, Q]:
        return self.structure.get((i, j), {})

    def is_a(self, i: int) -> bool:
        return i < self.n

    def cobracket(self, i: int) -> dict[tuple[int, int], Q]:
        """The double's own cobracket delta_a (+) (-delta_{a*})."""
        n = self.n
        out: dict[tuple[int, int], Q] = {}
        if i < n:
            for (j, k), v in self.base.cobracket(i).items():
                out[(j, k)] = v
        else:
            # delta(b^i) = -c_jk^i b^j (x) b^k
            for (j, k, m), v in self.base.c.items():
                if m == i - n:
                    out[(j + n, k + n)] = out.get((j + n, k + n), Q(0)) - v
        return {k: v for k, v in out.items() if v != 0}


def _structure_tables(a: LieBialgebra) -> dict[tuple[int, int], dict[int, Q]]:
    n = a.dim
    table: dict[tuple[int, int], dict[int, Q]] = {}

    def put(i, j, k, v):
        if v == 0:
            return
        row = table.setdefault((i, j), {})
        row[k] = row.get(k, Q(0)) + v
        if row[k] == 0:
            del row[k]

    for (i, j, k), v in a.c.items():
        put(i, j, k, v)                       # [a_i, a_j]
    for (k, i, j), v in a.f.items():
        put(i + n, j + n, k + n, v)           # [b^i, b^j] = f_k^ij b^k
    for i, j in itertools.product(range(n), repeat=2):
        # [a_i, b^j] = f_i^jk a_k - c_ik^j b^k
        for (s, p, q), v in a.f.items():
            if s == i and p == j:
                put(i, j + n, q, v)
        for k in range(n):
            v = a.c.get((i, k, j), Q(0))
            if v != 0:
                put(i, j + n, k + n, -v)
        row = table.get((i, j + n), {})
        for k, v in list(row.items()):
            put(j + n, i, k, -v)
    return {key: row for key, row in table.items() if row}


def _mixed_bracket_coordinate_free(a: LieBialgebra, i: int, j: int) -> dict[int, Q]:
    """[a_i, b^j] from (ad* a_i) b^j - (1 (x) b^j)(delta(a_i)), in double coordinates."""
    n = a.dim
    out: dict[int, Q] = {}
    # (ad* a_i) b^j = -c_ik^j b^k
    for k in range(n):
        v = a.c.get((i, k, j), Q(0))
        if v != 0:
            out[k + n] = out.get(k + n, Q(0)) - v
    # -(1 (x) b^j)(delta(a_i)) = -f_i^{sj} a_s
    for (s, p, q), v in a.f.items():
        if s == i and q == j:
            out[p] = out.get(p, Q(0)) - v
    return {k: v for k, v in out.items() if v != 0}


def build_double(a: LieBialgebra) -> DoubleAlgebra:
    """Assemble the double and verify every invariant it is supposed to satisfy."""
    validate(a)
    n = a.dim
    dim = 2 * n
    structure = _structure_tables(a)

    for i, j in itertools.product(range(n), repeat=2):
        lhs = structure.get((i, j + n), {})
        rhs = _mixed_bracket_coordinate_free(a, i, j)
        if lhs != rhs:
            raise DoubleError(
                f"mixed bracket [a_{i+1}, b^{j+1}] disagrees between the index form "
                f"and the coadjoint form: {lhs} vs {rhs}"
            )

    pairing = tuple(
        tuple(
            Q(1) if (i < n and j == i + n) or (j < n and i == j + n) else Q(0)
            for j in range(dim)
        )
        for i in range(dim)
    )
    r = {(i, i + n): Q(1) for i in range(n)}
    omega = dict(r)
    for i in range(n):
        omega[(i + n, i)] = Q(1)

    d = DoubleAlgebra(a, dim, structure, pairing, r, omega)
    _verify(d)
    return d


def _verify(d: DoubleAlgebra) -> None:
    dim = d.dim

    def brk(i, j):
        return d.bracket(i, j)

    for i, j in itertools.product(range(dim), repeat=2):
        anti = dict(brk(i, j))
        for k, v in brk(j, i).items():
            anti[k] = anti.get(k, Q(0)) + v
        if any(v != 0 for v in anti.values()):
            raise DoubleError(f"double bracket not antisymmetric at ({i}, {j})")

    for i, j, k in itertools.combinations(range(dim), 3):
        acc: dict[int, Q] = {}
        for (x, y, z) in ((i, j, k), (j, k, i), (k, i, j)):
            for t, v in brk(x, y).items():
                for m, w in brk(t, z).items():
                    acc[m] = acc.get(m, Q(0)) + v * w
        if any(v != 0 for v in acc.values()):
            raise DoubleError(f"Jacobi identity fails on the double at ({i}, {j}, {k})")

    pair = d.pairing
    for i, j, k in itertools.product(range(dim), repeat=3):
        # <[x_i, x_j], x_k> + <x_j, [x_i, x_k]> = 0
        total = Q(0)
        for t, v in brk(i, j).items():
            total += v * pair[t][k]
        for t, v in brk(i, k).items():
            total += v * pair[j][t]
        if total != 0:
            raise DoubleError(f"pairing not invariant at ({i}, {j}, {k})")

    for x in range(dim):
        defect = _ad_on_two_tensor(d, x, d.omega)
        if defect:
            raise DoubleError(f"Casimir element not invariant under basis vector {x}")

    for x in range(dim):
        expected = d.cobracket(x)
        got = _ad_on_two_tensor(d, x, d.r)
        if expected != got:
            raise DoubleError(
                f"double cobracket is not the coboundary of r at basis vector {x}"
            )


def _ad_on_two_tensor(d: DoubleAlgebra, x: int,
                      t: Mapping[tuple[int, int], Q]) -> dict[tuple[int, int], Q]:
    """(ad_x (x) 1 + 1 (x) ad_x) applied to t in g (x) g."""
    out: dict[tuple[int, int], Q] = {}
    for (p, q), v in t.items():
        for k, w in d.bracket(x, p).items():
            key = (k, q)
            out[key] = out.get(key, Q(0)) + v * w
        for k, w in d.bracket(x, q).items():
            key = (p, k)
            out[key] = out.get(key, Q(0)) + v * w
    return {k: v for k, v in out.items() if v != 0}


def canonical_r(d: DoubleAlgebra) -> EnvTensor:
    """r = sum_i a_i (x) b^i as an element of U(g) (x) U(g)."""
    return EnvTensor(d.env, 2, {((i,), (i + d.n,)): Q(1) for i in range(d.n)})


def two_tensor(d: DoubleAlgebra, t: Mapping[tuple[int, int], Q]) -> EnvTensor:
    return EnvTensor(d.env, 2, {((i,), (j,)): v for (i, j), v in t.items()})


def omega_tensor(d: DoubleAlgebra) -> EnvTensor:
    return two_tensor(d, d.omega)


def double_as_bialgebra(d: DoubleAlgebra):
    """The double itself as a Lie bialgebra, with its canonical element.

    Returns (bialgebra, r) where r is the coefficient table of the canonical
    element; the pair is quasitriangular by construction.
    """
    c = {(i, j, k): v for (i, j), row in d.structure.items() for k, v in row.items()}
    f = {(i, j, k): v for i in range(d.dim) for (j, k), v in d.cobracket(i).items()}
    names = tuple(d.env.names)
    from .bialg import make_bialgebra
    return make_bialgebra(d.dim, c, f, names), dict(d.r)


def cybe_residual(r: EnvTensor) -> EnvTensor:
    """[r12, r13] + [r12, r23] + [r13, r23] in U(g)^(x)3 for any based algebra."""
    if r.arity != 2:
        raise DoubleError("the Yang-Baxter residual needs a 2-tensor")
    r12 = r.embed(3, (0, 1))
    r13 = r.embed(3, (0, 2))
    r23 = r.embed(3, (1, 2))
    total = EnvTensor(r.alg, 3, {})
    for x, y in ((r12, r13), (r12, r23), (r13, r23)):
        total = total + (x * y - y * x)
    return total


def check_cybe(r: EnvTensor, d: DoubleAlgebra) -> EnvTensor:
    """Residual of the classical Yang-Baxter equation over the double."""
    if r.alg is not d.env:
        raise DoubleError("r must be a 2-tensor over the double")
    return cybe_residual(r)
