"""Classical Yang-Baxter algebras and the quantization of their r-matrices.

An r-matrix over an associative algebra A spans two finite-dimensional Lie
subalgebras of A: the column space g+ and the row space g- of its coefficient
matrix.  A minimal rank factorization r = sum x_a (x) y^a makes {x_a} and
{y^a} dual bases, the factorization-space g = g+ (+) g- becomes a Manin
triple (mixed bracket (ad* x) y - (ad* y) x), and the multiplicative
extension of the inclusion map pi pushes the double's universal R-matrix
forward to a quantum R-matrix 1 + h r + O(h^2) in A (x) A[[h]].

The same mechanism applied inside a quasitriangular Lie bialgebra (where r
lives in a (x) a) transports the double's twist to U(a) and produces a
quasitriangular quantization on U(a)[[h]] itself.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .bialg import LieBialgebra, check_lie_bialgebra, make_bialgebra
from .kernel import DEFAULT_ORDER, HSeries, Q, rat, rref, series_inverse, series_mul, solve_in_span
from .manin import DoubleAlgebra, build_double, canonical_r, cybe_residual as _cybe_env_tensor
from .pbw import (
    EnvAlgebra,
    EnvElement,
    EnvTensor,
    Word,
    delta0,
    tensor_multiply,
    tensor_of,
    tensor_one,
    tensor_series,
)
from .quantize import QuantizedDouble, Quantization, exp_omega_series, require_order


class YangBaxterError(ValueError):
    pass


# ---------------------------------------------------------------------------
# associative algebras with structure-constant tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AssocAlgebra:
    dim: int
    names: tuple[str, ...]
    mult: dict        # (i, j) -> {k: coeff}
    unit: tuple       # coefficient vector of the unit

    def __post_init__(self):
        cleaned = {}
        for (i, j), row in self.mult.items():
            row = {k: rat(v) for k, v in row.items() if rat(v) != 0}
            if row:
                cleaned[(i, j)] = row
        object.__setattr__(self, "mult", cleaned)
        object.__setattr__(self, "unit", tuple(rat(v) for v in self.unit))
        self._check()

    def _check(self) -> None:
        n = self.dim
        for i, j, k in itertools.product(range(n), repeat=3):
            lhs: dict[int, Q] = {}
            for t, v in self.mult.get((i, j), {}).items():
                for m, w in self.mult.get((t, k), {}).items():
                    lhs[m] = lhs.get(m, Q(0)) + v * w
            rhs: dict[int, Q] = {}
            for t, v in self.mult.get((j, k), {}).items():
                for m, w in self.mult.get((i, t), {}).items():
                    rhs[m] = rhs.get(m, Q(0)) + v * w
            if {m: v for m, v in lhs.items() if v != 0} != \
                    {m: v for m, v in rhs.items() if v != 0}:
                raise YangBaxterError(f"multiplication not associative at ({i},{j},{k})")
        for i in range(n):
            e = {i: Q(1)}
            if self.product(dict(enumerate(self.unit)), e) != e or \
                    self.product(e, dict(enumerate(self.unit))) != e:
                raise YangBaxterError(f"unit law fails on basis vector {i}")

    def product(self, x: Mapping[int, Q], y: Mapping[int, Q]) -> dict[int, Q]:
        out: dict[int, Q] = {}
        for i, v in x.items():
            if v == 0:
                continue
            for j, w in y.items():
                for k, c in self.mult.get((i, j), {}).items():
                    val = out.get(k, Q(0)) + v * w * c
                    if val == 0:
                        out.pop(k, None)
                    else:
                        out[k] = val
        return out

    def commutator(self, x: Mapping[int, Q], y: Mapping[int, Q]) -> dict[int, Q]:
        out = dict(self.product(x, y))
        for k, v in self.product(y, x).items():
            val = out.get(k, Q(0)) - v
            if val == 0:
                out.pop(k, None)
            else:
                out[k] = val
        return out


def matrix_algebra(size: int) -> AssocAlgebra:
    """The full matrix algebra with basis E_pq (row-major: index = p*size + q)."""
    mult: dict = {}
    for p, q, rr, s in itertools.product(range(size), repeat=4):
        if q == rr:
            mult[(p * size + q, rr * size + s)] = {p * size + s: Q(1)}
    names = tuple(f"E{p+1}{q+1}" for p in range(size) for q in range(size))
    unit = tuple(Q(1) if p == q else Q(0)
                 for p in range(size) for q in range(size))
    return AssocAlgebra(size * size, names, mult, unit)


Tensor2 = dict  # (i, j) -> Q
Tensor3 = dict  # (i, j, k) -> Q


def _prune2(t: Mapping) -> Tensor2:
    return {tuple(k): rat(v) for k, v in t.items() if rat(v) != 0}


def tensor2_flip(t: Tensor2) -> Tensor2:
    return {(j, i): v for (i, j), v in t.items()}


def check_assoc_cybe(A: AssocAlgebra, r: Mapping[tuple[int, int], Q]) -> Tensor3:
    """Residual of the classical Yang-Baxter equation in A^(x)3."""
    r = _prune2(r)
    out: Tensor3 = {}

    def add(key, v):
        w = out.get(key, Q(0)) + v
        if w == 0:
            out.pop(key, None)
        else:
            out[key] = w

    for (i, j), u in r.items():
        for (k, l), w in r.items():
            for m, c in A.commutator({i: Q(1)}, {k: Q(1)}).items():
                add((m, j, l), u * w * c)      # [r12, r13]
            for m, c in A.commutator({j: Q(1)}, {k: Q(1)}).items():
                add((i, m, l), u * w * c)      # [r12, r23]
            for m, c in A.commutator({j: Q(1)}, {l: Q(1)}).items():
                add((i, k, m), u * w * c)      # [r13, r23]
    return out


# ---------------------------------------------------------------------------
# the factorization construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RSData:
    """A Manin triple carved out of an ambient algebra by an r-matrix."""

    ambient_dim: int
    bialgebra: LieBialgebra        # structure of g+ in the x-basis
    double: DoubleAlgebra
    xs: tuple                      # basis of g+ as ambient coefficient vectors
    ys: tuple                      # dual basis of g-
    rank: int

    def pi_letter(self, t: int) -> dict[int, Q]:
        """pi of a double basis vector, as an ambient coefficient vector."""
        vecs = self.xs if t < self.rank else self.ys
        vec = vecs[t if t < self.rank else t - self.rank]
        return {i: v for i, v in enumerate(vec) if v != 0}


def _rank_factorization(dim: int, r: Tensor2):
    cols: dict[int, list[Q]] = {}
    for (i, j), v in r.items():
        cols.setdefault(j, [Q(0)] * dim)[i] = v
    col_vectors = [tuple(vec) for _, vec in sorted(cols.items())]
    basis, _ = rref(col_vectors)
    xs = [tuple(row) for row in basis]
    rank = len(xs)
    if rank == 0:
        return (), ()
    ys = []
    for a in range(rank):
        y = [Q(0)] * dim
        ys.append(y)
    # Solve r^{ij} = sum_a xs[a][i] * ys[a][j] column by column.
    for j in range(dim):
        col = [r.get((i, j), Q(0)) for i in range(dim)]
        coords = solve_in_span(xs, col)
        if coords is None:
            raise YangBaxterError("rank factorization failed; inconsistent r")
        for a in range(rank):
            ys[a][j] = coords[a]
    return tuple(xs), tuple(tuple(y) for y in ys)


def _bracket_closure(bracket, basis: Sequence[Sequence[Q]], what: str):
    """Structure constants of a bracket on a subspace, or an error."""
    table: dict[tuple[int, int, int], Q] = {}
    for a, xa in enumerate(basis):
        for b, xb in enumerate(basis):
            prod = bracket(xa, xb)
            vec = [Q(0)] * len(xa)
            for i, v in prod.items():
                vec[i] = v
            coords = solve_in_span(list(basis), vec)
            if coords is None:
                raise YangBaxterError(f"{what} is not closed under the bracket")
            for k, v in enumerate(coords):
                if v != 0:
                    table[(a, b, k)] = v
    return table


def rs_construct(A: AssocAlgebra, r: Mapping[tuple[int, int], Q]) -> RSData:
    """Build the Manin triple spanned by r inside A and verify its laws."""
    r = _prune2(r)
    residual = check_assoc_cybe(A, r)
    if residual:
        key, val = next(iter(sorted(residual.items())))
        raise YangBaxterError(f"r does not satisfy the Yang-Baxter equation "
                              f"(residual {val} at {key})")

    def lie(x, y):
        return A.commutator({i: v for i, v in enumerate(x) if v != 0},
                            {i: v for i, v in enumerate(y) if v != 0})

    xs, ys = _rank_factorization(A.dim, r)
    rank = len(xs)
    if rank == 0:
        abelian0 = make_bialgebra(0, {}, {}, names=())
        return RSData(A.dim, abelian0, build_double(abelian0), (), (), 0)

    y_reduced, _ = rref(ys)
    if len(y_reduced) != rank:
        raise YangBaxterError("row factor is rank deficient; internal error")

    c_table = _bracket_closure(lie, xs, "g+")
    g_minus = _bracket_closure(lie, ys, "g-")
    # cobracket of g+ is dual to the g- bracket: f_k^{ab} = coefficient of y^k
    f_table = {(k, a, b): v for (a, b, k), v in g_minus.items()}
    report = check_lie_bialgebra(rank, c_table, f_table)
    if not report.valid:
        v0 = report.violations[0]
        raise YangBaxterError(
            f"factorization does not give a Lie bialgebra: {v0.family} at {v0.indices}")
    bial = make_bialgebra(rank, c_table, f_table,
                          names=tuple(f"x{a+1}" for a in range(rank)))
    double = build_double(bial)
    data = RSData(A.dim, bial, double, xs, ys, rank)
    _verify_rs(A, r, data, lie)
    return data


def _verify_rs(A: AssocAlgebra, r: Tensor2, data: RSData, lie) -> None:
    rank, d = data.rank, data.double

    def pi(vec: Mapping[int, Q]) -> dict[int, Q]:
        out: dict[int, Q] = {}
        for t, v in vec.items():
            for i, w in data.pi_letter(t).items():
                val = out.get(i, Q(0)) + v * w
                if val == 0:
                    out.pop(i, None)
                else:
                    out[i] = val
        return out

    # pi intertwines the double bracket with the ambient commutator (all pairs).
    for t, u in itertools.product(range(d.dim), repeat=2):
        want = A.commutator(data.pi_letter(t), data.pi_letter(u))
        got = pi(d.bracket(t, u))
        if want != got:
            raise YangBaxterError(
                f"pi is not a Lie homomorphism at double basis pair ({t}, {u})")

    # the canonical element pushes to r
    pushed: Tensor2 = {}
    for a in range(rank):
        for i, v in enumerate(data.xs[a]):
            if v == 0:
                continue
            for j, w in enumerate(data.ys[a]):
                if w == 0:
                    continue
                key = (i, j)
                val = pushed.get(key, Q(0)) + v * w
                if val == 0:
                    pushed.pop(key, None)
                else:
                    pushed[key] = val
    if pushed != r:
        raise YangBaxterError("(pi (x) pi) of the canonical element is not r")


def _pi_word(A: AssocAlgebra, data: RSData, word: Word) -> dict[int, Q]:
    out = {i: v for i, v in enumerate(A.unit) if v != 0}
    for t in word:
        out = A.product(out, data.pi_letter(t))
    return out


def quantize_r(A: AssocAlgebra, r: Mapping[tuple[int, int], Q],
               order: int = DEFAULT_ORDER) -> HSeries:
    """A quantum R-matrix in A (x) A[[h]] with R = 1 + h r mod h^2.

    Pushes the double's universal R-matrix forward along the multiplicative
    extension of pi; unitarity of r is inherited at the truncation.
    """
    require_order(order)
    r = _prune2(r)
    data = rs_construct(A, r)
    qd = QuantizedDouble.build(data.double, order)
    coeffs = []
    for k in range(order):
        out: Tensor2 = {}
        for (w1, w2), c in qd.R[k].terms.items():
            left = _pi_word(A, data, w1)
            right = _pi_word(A, data, w2)
            for i, v in left.items():
                for j, w in right.items():
                    key = (i, j)
                    val = out.get(key, Q(0)) + c * v * w
                    if val == 0:
                        out.pop(key, None)
                    else:
                        out[key] = val
        coeffs.append(out)
    R = HSeries(tuple(coeffs), order)
    unit2 = _unit2(A)
    if R[0] != unit2:
        raise YangBaxterError("pushforward lost the unit; internal error")
    if order > 1 and R[1] != r:
        raise YangBaxterError("R is not 1 + h r at first order; internal error")
    return R


def _unit2(A: AssocAlgebra) -> Tensor2:
    out: Tensor2 = {}
    for i, v in enumerate(A.unit):
        if v == 0:
            continue
        for j, w in enumerate(A.unit):
            if w != 0:
                out[(i, j)] = v * w
    return out


def tensor2_mul(A: AssocAlgebra, x: Tensor2, y: Tensor2) -> Tensor2:
    out: Tensor2 = {}
    for (i, j), v in x.items():
        for (k, l), w in y.items():
            for p, c1 in A.mult.get((i, k), {}).items():
                for q, c2 in A.mult.get((j, l), {}).items():
                    key = (p, q)
                    val = out.get(key, Q(0)) + v * w * c1 * c2
                    if val == 0:
                        out.pop(key, None)
                    else:
                        out[key] = val
    return out


def tensor3_mul(A: AssocAlgebra, x: Tensor3, y: Tensor3) -> Tensor3:
    out: Tensor3 = {}
    for kx, v in x.items():
        for ky, w in y.items():
            partial = [((), v * w)]
            for i, j in zip(kx, ky):
                nxt = []
                for key, c in partial:
                    for p, c1 in A.mult.get((i, j), {}).items():
                        nxt.append((key + (p,), c * c1))
                partial = nxt
            for key, c in partial:
                val = out.get(key, Q(0)) + c
                if val == 0:
                    out.pop(key, None)
                else:
                    out[key] = val
    return out


def embed3(t: Tensor2, legs: tuple[int, int], unit: Sequence[Q]) -> Tensor3:
    out: Tensor3 = {}
    for (i, j), v in t.items():
        for u, w in enumerate(unit):
            if w == 0:
                continue
            key = [None, None, None]
            key[legs[0]], key[legs[1]] = i, j
            key[key.index(None)] = u
            out[tuple(key)] = out.get(tuple(key), Q(0)) + v * w
    return {k: v for k, v in out.items() if v != 0}


def _dict_add(x: dict, y: dict) -> dict:
    out = dict(x)
    for k, v in y.items():
        val = out.get(k, Q(0)) + v
        if val == 0:
            out.pop(k, None)
        else:
            out[k] = val
    return out


def qybe_residual(A: AssocAlgebra, R: HSeries) -> HSeries:
    """R12 R13 R23 - R23 R13 R12 in A^(x)3[[h]]."""
    def lift(legs):
        return R.map(lambda t: embed3(t, legs, A.unit))

    r12, r13, r23 = lift((0, 1)), lift((0, 2)), lift((1, 2))
    mul = lambda x, y: tensor3_mul(A, x, y)
    lhs = series_mul(series_mul(r12, r13, mul, _dict_add), r23, mul, _dict_add)
    rhs = series_mul(series_mul(r23, r13, mul, _dict_add), r12, mul, _dict_add)
    return HSeries(tuple(
        {k: v for k, v in ((key, lhs[t].get(key, Q(0)) - rhs[t].get(key, Q(0)))
                           for key in set(lhs[t]) | set(rhs[t])) if v != 0}
        for t in range(R.order)), R.order)


def unitarity_residual(A: AssocAlgebra, R: HSeries) -> HSeries:
    """R^op R - 1 (x) 1 in A (x) A[[h]]."""
    flipped = R.map(tensor2_flip)
    prod = series_mul(flipped, R, lambda x, y: tensor2_mul(A, x, y), _dict_add)
    unit2 = _unit2(A)
    out = []
    for k in range(R.order):
        want = unit2 if k == 0 else {}
        diff = dict(prod[k])
        for key, v in want.items():
            val = diff.get(key, Q(0)) - v
            if val == 0:
                diff.pop(key, None)
            else:
                diff[key] = val
        out.append(diff)
    return HSeries(tuple(out), R.order)


# ---------------------------------------------------------------------------
# quasitriangular quantization of a quasitriangular Lie bialgebra
# ---------------------------------------------------------------------------

@dataclass
class QuasitriangularQuantization:
    a: LieBialgebra
    r: Tensor2
    order: int
    env_a: EnvAlgebra
    J_a: HSeries          # in U(a)^(x)2[[h]]
    J_a_inv: HSeries
    R_a: HSeries

    def coproduct(self, x: EnvElement) -> HSeries:
        mid = tensor_series(self.order, delta0(x, 2))
        return series_mul(series_mul(self.J_a_inv, mid, tensor_multiply),
                          self.J_a, tensor_multiply)


def quantize_quasitriangular(a: LieBialgebra, r: Mapping[tuple[int, int], Q],
                             order: int = DEFAULT_ORDER) -> QuasitriangularQuantization:
    """Quantize (a, r) on U(a)[[h]] itself, pushing the double's twist along pi.

    Requires r to satisfy the Yang-Baxter equation inside U(a)^(x)3 and the
    cobracket of a to be the coboundary of r.  The subalgebras spanned by the
    columns and rows of r are carved out of a directly (r has degree-1 legs,
    so no higher PBW degree can contribute).
    """
    require_order(order)
    r = _prune2(r)
    qz = Quantization(a, order)
    env_a = qz.env_a

    r_env = EnvTensor(env_a, 2, {((i,), (j,)): v for (i, j), v in r.items()})
    cybe = _cybe_env(env_a, r_env)
    if not cybe.is_zero():
        raise YangBaxterError("r does not satisfy the Yang-Baxter equation in U(a)")
    for x in range(a.dim):
        want = a.cobracket(x)
        got = _coboundary_at(a, r, x)
        if want != got:
            raise YangBaxterError(
                f"the cobracket is not the coboundary of r at basis vector {x}")

    def lie(xv, yv):
        out: dict[int, Q] = {}
        for i, v in enumerate(xv):
            if v == 0:
                continue
            for j, w in enumerate(yv):
                if w == 0:
                    continue
                for k, c in a.bracket(i, j).items():
                    val = out.get(k, Q(0)) + v * w * c
                    if val == 0:
                        out.pop(k, None)
                    else:
                        out[k] = val
        return out

    xs, ys = _rank_factorization(a.dim, r)
    rank = len(xs)
    c_table = _bracket_closure(lie, xs, "g+") if rank else {}
    g_minus = _bracket_closure(lie, ys, "g-") if rank else {}
    f_table = {(k, p, q): v for (p, q, k), v in g_minus.items()}
    sub = make_bialgebra(rank, c_table, f_table,
                         names=tuple(f"x{t+1}" for t in range(rank)))
    double = build_double(sub)
    qd = QuantizedDouble.build(double, order)

    def pi_word(word: Word) -> EnvElement:
        out = env_a.one()
        for t in word:
            vec = xs[t] if t < rank else ys[t - rank]
            out = out * env_a.element({(i,): v for i, v in enumerate(vec) if v != 0})
        return out

    def push(t: EnvTensor) -> EnvTensor:
        acc = EnvTensor(env_a, 2, {})
        for (w1, w2), c in t.terms.items():
            acc = acc + tensor_of(pi_word(w1), pi_word(w2)).scale(c)
        return acc

    J_a = qd.J.map(push)
    one2 = tensor_one(env_a, 2)
    J_a_inv = series_inverse(J_a, one2, tensor_multiply)
    omega_a = r_env + r_env.flip()
    exp_series = _exp_tensor(env_a, omega_a, order)
    J_a_op = J_a.map(lambda t: t.flip())
    J_a_op_inv = series_inverse(J_a_op, one2, tensor_multiply)
    R_a = series_mul(series_mul(J_a_op_inv, exp_series, tensor_multiply),
                     J_a, tensor_multiply)
    if order > 1 and R_a[1] != r_env:
        raise YangBaxterError("R is not 1 + h r at first order; internal error")
    return QuasitriangularQuantization(a, r, order, env_a, J_a, J_a_inv, R_a)


def _exp_tensor(env: EnvAlgebra, t: EnvTensor, order: int) -> HSeries:
    one2 = tensor_one(env, 2)
    coeffs = [one2]
    power = one2
    fact = 1
    for k in range(1, order):
        power = tensor_multiply(power, t)
        fact *= k
        coeffs.append(power.scale(Q(1, 2 ** k * fact)))
    return HSeries(tuple(coeffs), order)


def _cybe_env(env: EnvAlgebra, r: EnvTensor) -> EnvTensor:
    return _cybe_env_tensor(r)


def _coboundary_at(a: LieBialgebra, r: Tensor2, x: int) -> dict[tuple[int, int], Q]:
    out: dict[tuple[int, int], Q] = {}
    for (p, q), v in r.items():
        for k, c in a.bracket(x, p).items():
            key = (k, q)
            out[key] = out.get(key, Q(0)) + v * c
        for k, c in a.bracket(x, q).items():
            key = (p, k)
            out[key] = out.get(key, Q(0)) + v * c
    return {k: v for k, v in out.items() if v != 0}


def env_qybe_residual(env: EnvAlgebra, R: HSeries) -> HSeries:
    """QYBE residual for an R living in U(a)^(x)2[[h]]."""
    r12 = R.map(lambda t: t.embed(3, (0, 1)))
    r13 = R.map(lambda t: t.embed(3, (0, 2)))
    r23 = R.map(lambda t: t.embed(3, (1, 2)))
    lhs = series_mul(series_mul(r12, r13, tensor_multiply), r23, tensor_multiply)
    rhs = series_mul(series_mul(r23, r13, tensor_multiply), r12, tensor_multiply)
    return HSeries(tuple(lhs[k] - rhs[k] for k in range(R.order)), R.order)


def env_unitarity_residual(env: EnvAlgebra, R: HSeries) -> HSeries:
    flipped = R.map(lambda t: t.flip())
    prod = series_mul(flipped, R, tensor_multiply)
    one2 = tensor_one(env, 2)
    out = [prod[0] - one2]
    out.extend(prod[k] for k in range(1, R.order))
    return HSeries(tuple(out), R.order)


# ---------------------------------------------------------------------------
# the retraction from the double of a quasitriangular bialgebra
# ---------------------------------------------------------------------------

def require_quasitriangular(a: LieBialgebra, r: Tensor2) -> None:
    """CYBE inside U(a) plus delta = coboundary of r, or an error."""
    bracket_table = {}
    for (i, j, k), v in a.c.items():
        bracket_table.setdefault((i, j), {})[k] = v
    env_a = EnvAlgebra(a.dim, bracket_table, a.names)
    r_env = EnvTensor(env_a, 2, {((i,), (j,)): v for (i, j), v in r.items()})
    if not _cybe_env(env_a, r_env).is_zero():
        raise YangBaxterError("r does not satisfy the Yang-Baxter equation in U(a)")
    for x in range(a.dim):
        if a.cobracket(x) != _coboundary_at(a, r, x):
            raise YangBaxterError(
                f"the cobracket is not the coboundary of r at basis vector {x}")


def tau_check(a: LieBialgebra, r: Mapping[tuple[int, int], Q]) -> list[str]:
    """Verify that x + f -> x + (f (x) 1)(r) is a Lie homomorphism from the
    double onto a carrying the canonical element to r."""
    r = _prune2(r)
    require_quasitriangular(a, r)
    d = build_double(a)
    n = a.dim

    def tau_letter(t: int) -> dict[int, Q]:
        if t < n:
            return {t: Q(1)}
        return {l: v for (i, l), v in r.items() if i == t - n and v != 0}

    def tau(vec: Mapping[int, Q]) -> dict[int, Q]:
        out: dict[int, Q] = {}
        for t, v in vec.items():
            for i, w in tau_letter(t).items():
                val = out.get(i, Q(0)) + v * w
                if val == 0:
                    out.pop(i, None)
                else:
                    out[i] = val
        return out

    defects = []
    for t, u in itertools.product(range(d.dim), repeat=2):
        lhs = tau(d.bracket(t, u))
        rhs: dict[int, Q] = {}
        for i, v in tau_letter(t).items():
            for j, w in tau_letter(u).items():
                for k, c in a.bracket(i, j).items():
                    val = rhs.get(k, Q(0)) + v * w * c
                    if val == 0:
                        rhs.pop(k, None)
                    else:
                        rhs[k] = val
        if lhs != rhs:
            defects.append(f"tau does not intertwine brackets at ({t}, {u})")
    pushed: Tensor2 = {}
    for i in range(n):
        for p, v in tau_letter(i).items():
            for q, w in tau_letter(i + n).items():
                key = (p, q)
                val = pushed.get(key, Q(0)) + v * w
                if val == 0:
                    pushed.pop(key, None)
                else:
                    pushed[key] = val
    if pushed != r:
        defects.append("(tau (x) tau) of the canonical element is not r")
    for i in range(n):
        if tau_letter(i) != {i: Q(1)}:
            defects.append(f"tau is not the identity on basis vector {i}")
    return defects
