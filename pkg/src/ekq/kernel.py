"""Exact coefficient arithmetic, truncated h-series, and sparse tensors.

Everything downstream is built on three pieces of plumbing:

* rational scalars (``fractions.Fraction``, always normalized),
* ``HSeries`` -- truncated formal power series in a parameter h, default
  truncation order 3 (coefficients of h^0, h^1, h^2),
* ``SparseTensor`` -- sparse multilinear maps V^(x)m -> V^(x)n with exact
  rational entries, plus a permutation action on the slots.

All values are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

Q = Fraction

DEFAULT_ORDER = 3


class KernelError(ValueError):
    """Malformed input to a kernel operation."""


def rat(value) -> Q:
    """Coerce ints, strings like ``"2/3"``, or Fractions to an exact rational."""
    if isinstance(value, Q):
        return value
    if isinstance(value, int):
        return Q(value)
    if isinstance(value, str):
        return Q(value)
    raise KernelError(f"not an exact rational: {value!r}")


def rat_str(value: Q) -> str:
    """Serialize as ``"p/q"`` (or ``"p"`` when q = 1)."""
    return str(value)


# ---------------------------------------------------------------------------
# truncated power series in h
# ---------------------------------------------------------------------------

def _default_add(x, y):
    return x + y


def _default_mul(x, y):
    return x * y


@dataclass(frozen=True)
class HSeries:
    """A power series in h truncated at ``order``: sum of coeffs[k] * h^k.

    The coefficient space is anything supporting ``+``; multiplication is
    supplied per call (the coefficients may live in a noncommutative algebra),
    defaulting to the coefficients' own ``*``.
    """

    coeffs: tuple
    order: int = DEFAULT_ORDER

    def __post_init__(self):
        if len(self.coeffs) != self.order:
            raise KernelError(
                f"series of order {self.order} needs {self.order} coefficients, "
                f"got {len(self.coeffs)}"
            )

    def __getitem__(self, k: int):
        return self.coeffs[k]

    @staticmethod
    def constant(c, order: int = DEFAULT_ORDER, zero=Q(0)) -> "HSeries":
        return HSeries((c,) + (zero,) * (order - 1), order)

    def map(self, fn: Callable) -> "HSeries":
        return HSeries(tuple(fn(c) for c in self.coeffs), self.order)

    def __add__(self, other: "HSeries") -> "HSeries":
        if self.order != other.order:
            raise KernelError("mismatched series orders")
        return HSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.order)

    def __sub__(self, other: "HSeries") -> "HSeries":
        if self.order != other.order:
            raise KernelError("mismatched series orders")
        return HSeries(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)), self.order)

    def scale(self, c: Q) -> "HSeries":
        return HSeries(tuple(x * c for x in self.coeffs), self.order)

    def shift(self, k: int, zero=Q(0)) -> "HSeries":
        """Multiply by h^k, truncating."""
        coeffs = (zero,) * k + self.coeffs[: self.order - k]
        return HSeries(coeffs, self.order)


def series_mul(x: HSeries, y: HSeries, mul: Callable = _default_mul,
               add: Callable = _default_add) -> HSeries:
    """Truncated product: coefficient of h^k is sum over i+j=k of mul(x_i, y_j)."""
    if x.order != y.order:
        raise KernelError("mismatched series orders")
    out = []
    for k in range(x.order):
        acc = None
        for i in range(k + 1):
            term = mul(x.coeffs[i], y.coeffs[k - i])
            acc = term if acc is None else add(acc, term)
        out.append(acc)
    return HSeries(tuple(out), x.order)


def series_inverse(x: HSeries, one, mul: Callable = _default_mul,
                   add: Callable = _default_add, is_unit: Callable | None = None) -> HSeries:
    """Multiplicative inverse at the truncation order.

    Requires the h^0 coefficient to equal ``one``; then the inverse is the
    geometric series in (x - one), which terminates at the truncation.
    """
    if is_unit is None:
        is_unit = lambda c: c == one
    if not is_unit(x.coeffs[0]):
        raise KernelError("series has non-unit leading coefficient; cannot invert")
    zero_like = x.coeffs[0] - x.coeffs[0]
    # n = x - 1 is divisible by h, so n^order vanishes after truncation.
    n = HSeries((zero_like,) + x.coeffs[1:], x.order)
    neg_n = HSeries(tuple(zero_like - c for c in n.coeffs), x.order)
    result = HSeries.constant(one, x.order, zero=zero_like)
    power = HSeries.constant(one, x.order, zero=zero_like)
    for _ in range(1, x.order):
        power = series_mul(power, neg_n, mul, add)
        result = result + power
    return result


def series_exp(nilpotent: HSeries, one, mul: Callable = _default_mul,
               add: Callable = _default_add) -> HSeries:
    """exp of a series with zero h^0 coefficient, truncated."""
    zero_like = nilpotent.coeffs[0]
    if any(c != zero_like - zero_like for c in (nilpotent.coeffs[0],)):
        # The h^0 part must vanish for the exponential to truncate.
        raise KernelError("series_exp requires a series divisible by h")
    result = HSeries.constant(one, nilpotent.order, zero=zero_like - zero_like)
    power = HSeries.constant(one, nilpotent.order, zero=zero_like - zero_like)
    fact = 1
    for k in range(1, nilpotent.order):
        power = series_mul(power, nilpotent, mul, add)
        fact *= k
        result = result + power.scale(Q(1, fact))
    return result


# ---------------------------------------------------------------------------
# sparse tensors and permutations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SparseTensor:
    """Sparse element of Hom(V^(x)m, V^(x)n) over based spaces.

    ``entries`` maps (m+n)-index tuples (inputs first, then outputs) to nonzero
    rationals; ``dims`` gives the dimension of each of the m+n slots.
    """

    m: int
    n: int
    dims: tuple[int, ...]
    entries: Mapping[tuple[int, ...], Q]

    def __post_init__(self):
        if len(self.dims) != self.m + self.n:
            raise KernelError("dims must list one dimension per tensor slot")
        for idx, coeff in self.entries.items():
            if len(idx) != self.m + self.n:
                raise KernelError(f"index tuple {idx} has wrong length")
            if any(not (0 <= i < d) for i, d in zip(idx, self.dims)):
                raise KernelError(f"index tuple {idx} out of range for dims {self.dims}")
            if coeff == 0:
                raise KernelError("zero entries must be pruned")

    @staticmethod
    def make(m: int, n: int, dims: Sequence[int],
             entries: Mapping[tuple[int, ...], Q]) -> "SparseTensor":
        pruned = {tuple(k): rat(v) for k, v in entries.items() if v != 0}
        return SparseTensor(m, n, tuple(dims), pruned)

    def items(self):
        return sorted(self.entries.items())

    def __add__(self, other: "SparseTensor") -> "SparseTensor":
        if (self.m, self.n, self.dims) != (other.m, other.n, other.dims):
            raise KernelError("tensor shape mismatch")
        merged = dict(self.entries)
        for idx, c in other.entries.items():
            v = merged.get(idx, Q(0)) + c
            if v == 0:
                merged.pop(idx, None)
            else:
                merged[idx] = v
        return SparseTensor(self.m, self.n, self.dims, merged)

    def scale(self, c: Q) -> "SparseTensor":
        if c == 0:
            return SparseTensor(self.m, self.n, self.dims, {})
        return SparseTensor(self.m, self.n, self.dims,
                            {idx: v * c for idx, v in self.entries.items()})

    def __sub__(self, other: "SparseTensor") -> "SparseTensor":
        return self + other.scale(Q(-1))

    def is_zero(self) -> bool:
        return not self.entries


def check_permutation(sigma: Sequence[int], size: int) -> tuple[int, ...]:
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(size)):
        raise KernelError(f"{sigma} is not a permutation of 0..{size - 1}")
    return sigma


def permute(t: SparseTensor, sigma_in: Sequence[int], sigma_out: Sequence[int]) -> SparseTensor:
    """Reindex the input slots by sigma_in and the output slots by sigma_out.

    Slot j of the result carries what slot sigma[j] carried, so
    permute(permute(t, s), u) == permute(t, compose(s, u)) where
    compose(s, u)[j] = s[u[j]].
    """
    sigma_in = check_permutation(sigma_in, t.m)
    sigma_out = check_permutation(sigma_out, t.n)
    dims = tuple(t.dims[sigma_in[j]] for j in range(t.m)) + \
        tuple(t.dims[t.m + sigma_out[j]] for j in range(t.n))
    entries = {}
    for idx, c in t.entries.items():
        new = tuple(idx[sigma_in[j]] for j in range(t.m)) + \
            tuple(idx[t.m + sigma_out[j]] for j in range(t.n))
        entries[new] = c
    return SparseTensor(t.m, t.n, dims, entries)


def compose_perms(s: Sequence[int], u: Sequence[int]) -> tuple[int, ...]:
    """The permutation equivalent to gathering by u and then by s."""
    return tuple(s[u[j]] for j in range(len(u)))


def tensor_product(a: SparseTensor, b: SparseTensor) -> SparseTensor:
    """Juxtaposition: inputs of a then of b, outputs of a then of b."""
    dims = a.dims[:a.m] + b.dims[:b.m] + a.dims[a.m:] + b.dims[b.m:]
    entries = {}
    for ia, ca in a.entries.items():
        for ib, cb in b.entries.items():
            idx = ia[:a.m] + ib[:b.m] + ia[a.m:] + ib[b.m:]
            entries[idx] = entries.get(idx, Q(0)) + ca * cb
    entries = {k: v for k, v in entries.items() if v != 0}
    return SparseTensor(a.m + b.m, a.n + b.n, dims, entries)


def compose_tensors(a: SparseTensor, b: SparseTensor) -> SparseTensor:
    """The composite a after b (feed b's outputs into a's inputs)."""
    if a.m != b.n:
        raise KernelError(f"cannot compose: {a.m} inputs vs {b.n} outputs")
    if a.dims[:a.m] != b.dims[b.m:]:
        raise KernelError("slot dimensions do not match under composition")
    # Group b's entries by output index to keep the double loop sparse.
    by_out: dict[tuple[int, ...], list[tuple[tuple[int, ...], Q]]] = {}
    for ib, cb in b.entries.items():
        by_out.setdefault(ib[b.m:], []).append((ib[:b.m], cb))
    entries: dict[tuple[int, ...], Q] = {}
    for ia, ca in a.entries.items():
        middle = ia[:a.m]
        for b_in, cb in by_out.get(middle, ()):
            idx = b_in + ia[a.m:]
            v = entries.get(idx, Q(0)) + ca * cb
            if v == 0:
                entries.pop(idx, None)
            else:
                entries[idx] = v
    return SparseTensor(b.m, a.n, b.dims[:b.m] + a.dims[a.m:], entries)


def identity_tensor(arity: int, dim: int) -> SparseTensor:
    entries = {}
    for idx in itertools.product(range(dim), repeat=arity):
        entries[idx + idx] = Q(1)
    return SparseTensor(arity, arity, (dim,) * (2 * arity), entries)


def perm_tensor(sigma: Sequence[int], dim: int) -> SparseTensor:
    """The operator sending e_{i_1} (x) ... (x) e_{i_p} to its sigma-gather."""
    p = len(sigma)
    sigma = check_permutation(sigma, p)
    entries = {}
    for idx in itertools.product(range(dim), repeat=p):
        out = tuple(idx[sigma[j]] for j in range(p))
        entries[idx + out] = Q(1)
    return SparseTensor(p, p, (dim,) * (2 * p), entries)


# ---------------------------------------------------------------------------
# exact linear algebra over Q (used for rank factorizations and membership)
# ---------------------------------------------------------------------------

def rref(rows: Sequence[Sequence[Q]]) -> tuple[list[list[Q]], list[int]]:
    """Reduced row echelon form with deterministic first-nonzero-column pivoting.

    Returns (reduced rows, pivot column indices). Zero rows are dropped.
    """
    mat = [list(map(rat, row)) for row in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = Q(1) / mat[r][col]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                factor = mat[i][col]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def solve_in_span(basis: Sequence[Sequence[Q]], target: Sequence[Q]) -> list[Q] | None:
    """Coordinates of ``target`` in the span of ``basis`` rows, or None."""
    if not basis:
        return [] if all(x == 0 for x in target) else None
    ncols = len(basis[0])
    # Solve x * basis = target by eliminating on the augmented transpose.
    aug = [[basis[i][j] for i in range(len(basis))] + [rat(target[j])]
           for j in range(ncols)]
    reduced, pivots = rref(aug)
    coords = [Q(0)] * len(basis)
    for row, piv in zip(reduced, pivots):
        if piv == len(basis):
            return None  # inconsistent: pivot in the augmented column
        coords[piv] = row[-1]
    # Verify exactly (rref drops no information, but be safe against misuse).
    for j in range(ncols):
        if sum((coords[i] * basis[i][j] for i in range(len(basis))), Q(0)) != rat(target[j]):
            return None
    return coords
