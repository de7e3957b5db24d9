"""The acyclic tensor calculus: expression trees, a textual grammar, an exact
evaluator against concrete structures, and a bank of universal formulas.

Expressions are built from signature primitives, permutation operators,
tensor product, composition, and rational linear combinations.  Three
signatures are supported:

* ``lba``:  mu: V(x)V -> V (bracket), delta: V -> V(x)V (cobracket);
* ``qtlba``: mu: V(x)V -> V, r: k -> V(x)V;
* ``cyba``: mu: V(x)V -> V (associative product), unit: k -> V, r: k -> V(x)V.

Grammar (whitespace-insensitive):

    expr    := "mu" | "delta" | "r" | "unit" | "id" INT
             | "perm[" INT+ "]"
             | "tensor(" expr ("," expr)* ")"
             | "comp(" expr ("," expr)* ")"       -- applied right to left
             | "sum(" term ("," term)* ")"
    term    := RATIONAL "*" expr

Compositions with mismatched arities are rejected at validation time rather
than silently treated as zero: in a finite expression bank a zero composite
is almost always an authoring bug.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction

from .bialg import BialgebraHom, LieBialgebra
from .kernel import (
    Q,
    SparseTensor,
    compose_tensors,
    identity_tensor,
    perm_tensor,
    rat,
    tensor_product,
)
from .pbw import EnvElement, EnvAlgebra


class AcyclicError(ValueError):
    pass


SIGNATURES = {
    "lba": {"mu": (2, 1), "delta": (1, 2)},
    "qtlba": {"mu": (2, 1), "r": (0, 2)},
    "cyba": {"mu": (2, 1), "unit": (0, 1), "r": (0, 2)},
}


@dataclass(frozen=True)
class Primitive:
    name: str


@dataclass(frozen=True)
class Identity:
    arity: int


@dataclass(frozen=True)
class Perm:
    sigma: tuple[int, ...]  # 0-based one-line form: output slot j <- input sigma[j]


@dataclass(frozen=True)
class Tensor:
    children: tuple


@dataclass(frozen=True)
class Compose:
    children: tuple  # applied right to left


@dataclass(frozen=True)
class LinComb:
    terms: tuple  # pairs (Fraction, expr)


Expr = object


def arity(e: Expr, signature: str) -> tuple[int, int]:
    """(inputs, outputs); raises on malformed trees or arity mismatches."""
    prims = SIGNATURES.get(signature)
    if prims is None:
        raise AcyclicError(f"unknown signature {signature!r}")
    if isinstance(e, Primitive):
        if e.name not in prims:
            raise AcyclicError(f"primitive {e.name!r} is not in signature {signature!r}")
        return prims[e.name]
    if isinstance(e, Identity):
        return (e.arity, e.arity)
    if isinstance(e, Perm):
        p = len(e.sigma)
        if sorted(e.sigma) != list(range(p)):
            raise AcyclicError(f"{e.sigma} is not a permutation")
        return (p, p)
    if isinstance(e, Tensor):
        m = n = 0
        for child in e.children:
            cm, cn = arity(child, signature)
            m += cm
            n += cn
        return (m, n)
    if isinstance(e, Compose):
        arities = [arity(child, signature) for child in e.children]
        for upper, lower in zip(arities, arities[1:]):
            if upper[0] != lower[1]:
                raise AcyclicError(
                    f"composition mismatch: feeding {lower[1]} outputs into "
                    f"{upper[0]} inputs")
        return (arities[-1][0], arities[0][1])
    if isinstance(e, LinComb):
        shapes = {arity(child, signature) for _, child in e.terms}
        if len(shapes) != 1:
            raise AcyclicError(f"linear combination mixes arities {sorted(shapes)}")
        return shapes.pop()
    raise AcyclicError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# concrete syntax
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*([A-Za-z_]+|-?\d+/\d+|-?\d+|[][(),*])")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise AcyclicError(f"syntax error at position {pos}: {text[pos:pos+10]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        if self.pos >= len(self.tokens):
            raise AcyclicError(f"unexpected end of input (wanted {expected!r})")
        tok = self.tokens[self.pos]
        if expected is not None and tok != expected:
            raise AcyclicError(f"expected {expected!r} at token {self.pos}, got {tok!r}")
        self.pos += 1
        return tok

    def expr(self) -> Expr:
        tok = self.take()
        if tok in ("mu", "delta", "r", "unit"):
            return Primitive(tok)
        if tok == "id":
            k = int(self.take())
            return Identity(k)
        if tok.startswith("id") and tok[2:].isdigit():
            return Identity(int(tok[2:]))
        if tok == "perm":
            self.take("[")
            entries = []
            while self.peek() != "]":
                entries.append(int(self.take()))
            self.take("]")
            return Perm(tuple(x - 1 for x in entries))
        if tok in ("tensor", "comp", "sum"):
            self.take("(")
            if tok == "sum":
                terms = [self._sum_term()]
                while self.peek() == ",":
                    self.take(",")
                    terms.append(self._sum_term())
                self.take(")")
                return LinComb(tuple(terms))
            children = [self.expr()]
            while self.peek() == ",":
                self.take(",")
                children.append(self.expr())
            self.take(")")
            return Tensor(tuple(children)) if tok == "tensor" else Compose(tuple(children))
        raise AcyclicError(f"unexpected token {tok!r}")

    def _sum_term(self) -> tuple[Fraction, Expr]:
        coeff_tok = self.take()
        coeff = rat(coeff_tok)
        self.take("*")
        return (coeff, self.expr())


def parse(text: str, signature: str = "lba") -> Expr:
    parser = _Parser(_tokenize(text))
    e = parser.expr()
    if parser.peek() is not None:
        raise AcyclicError(f"trailing input at token {parser.pos}: {parser.peek()!r}")
    arity(e, signature)
    return e


def format_expr(e: Expr) -> str:
    if isinstance(e, Primitive):
        return e.name
    if isinstance(e, Identity):
        return f"id{e.arity}"
    if isinstance(e, Perm):
        return "perm[" + " ".join(str(x + 1) for x in e.sigma) + "]"
    if isinstance(e, Tensor):
        return "tensor(" + ", ".join(format_expr(c) for c in e.children) + ")"
    if isinstance(e, Compose):
        return "comp(" + ", ".join(format_expr(c) for c in e.children) + ")"
    if isinstance(e, LinComb):
        return "sum(" + ", ".join(f"{c}*{format_expr(x)}" for c, x in e.terms) + ")"
    raise AcyclicError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _primitive_tensors(structure, signature: str) -> tuple[int, dict[str, SparseTensor]]:
    if signature == "lba":
        g: LieBialgebra = structure
        dim = g.dim
        mu = SparseTensor.make(2, 1, (dim,) * 3, dict(g.c))
        delta = SparseTensor.make(1, 2, (dim,) * 3, dict(g.f))
        return dim, {"mu": mu, "delta": delta}
    if signature == "qtlba":
        g, r = structure
        dim = g.dim
        mu = SparseTensor.make(2, 1, (dim,) * 3, dict(g.c))
        rt = SparseTensor.make(0, 2, (dim,) * 2, dict(r))
        return dim, {"mu": mu, "r": rt}
    if signature == "cyba":
        A, r = structure
        dim = A.dim
        entries = {(i, j, k): v for (i, j), row in A.mult.items() for k, v in row.items()}
        mu = SparseTensor.make(2, 1, (dim,) * 3, entries)
        unit = SparseTensor.make(0, 1, (dim,), {(i,): v for i, v in enumerate(A.unit)})
        rt = SparseTensor.make(0, 2, (dim,) * 2, dict(r))
        return dim, {"mu": mu, "unit": unit, "r": rt}
    raise AcyclicError(f"unknown signature {signature!r}")


def evaluate(e: Expr, structure, signature: str = "lba") -> SparseTensor:
    """Evaluate the expression against concrete structure tensors."""
    arity(e, signature)
    dim, prims = _primitive_tensors(structure, signature)

    def go(node) -> SparseTensor:
        if isinstance(node, Primitive):
            return prims[node.name]
        if isinstance(node, Identity):
            return identity_tensor(node.arity, dim)
        if isinstance(node, Perm):
            return perm_tensor(node.sigma, dim)
        if isinstance(node, Tensor):
            out = go(node.children[0])
            for child in node.children[1:]:
                out = tensor_product(out, go(child))
            return out
        if isinstance(node, Compose):
            out = go(node.children[-1])
            for child in reversed(node.children[:-1]):
                out = compose_tensors(go(child), out)
            return out
        if isinstance(node, LinComb):
            total = None
            for coeff, child in node.terms:
                term = go(child).scale(coeff)
                total = term if total is None else total + term
            return total
        raise AcyclicError(f"not an expression node: {node!r}")

    return go(e)


# ---------------------------------------------------------------------------
# the expression bank
# ---------------------------------------------------------------------------

def universal_bank() -> dict[str, tuple[str, Expr]]:
    """Named expressions, each tagged with its signature.

    * ``cocycle``: the defect delta([a,b]) - ad_a delta(b) + ad_b delta(a);
      vanishes exactly on Lie bialgebras.
    * ``cybe``: the Yang-Baxter defect of r over an associative algebra.
    * ``mu2_11_s2`` and ``mu2_11_s3``: the two contraction sums whose
      multiplied-out total is 24 times the h^2 coefficient of the quantized
      product of two generators (left input feeds the first cobracket).
    * ``sym2``: the symmetrizer of two slots as a span of permutations.
    """
    texts = {
        "mu2_11_s2": ("lba", "comp(tensor(mu, id1), tensor(id1, mu, id1), tensor(delta, delta))"),
        "mu2_11_s3": ("lba", "comp(tensor(mu, id2), perm[1 3 2 4], tensor(delta, delta))"),
        "sym2": ("lba", "sum(1/2*perm[1 2], 1/2*perm[2 1])"),
    }
    bank: dict[str, tuple[str, Expr]] = {
        name: (sig, parse(text, sig)) for name, (sig, text) in texts.items()
    }
    bank["cocycle"] = ("lba", _cocycle_expr())
    bank["cybe"] = ("cyba", _cybe_expr())
    for name, (sig, e) in bank.items():
        arity(e, sig)
    return bank


def _cocycle_expr() -> Expr:
    """delta(mu(a,b)) - [a x 1 + 1 x a, delta b] - [delta a, b x 1 + 1 x b]."""
    d_mu = Compose((Primitive("delta"), Primitive("mu")))
    # inputs (a, b); ad_a on the two legs of delta(b):
    t1 = Compose((Tensor((Primitive("mu"), Identity(1))),
                  Tensor((Identity(1), Primitive("delta")))))
    t2 = Compose((Tensor((Identity(1), Primitive("mu"))),
                  Perm((1, 0, 2)),
                  Tensor((Identity(1), Primitive("delta")))))
    # [delta(a), 1 x b + b x 1]: bracket b into each leg of delta(a), b on the right
    t3 = Compose((Tensor((Primitive("mu"), Identity(1))),
                  Perm((0, 2, 1)),
                  Tensor((Primitive("delta"), Identity(1)))))
    t4 = Compose((Tensor((Identity(1), Primitive("mu"))),
                  Tensor((Primitive("delta"), Identity(1)))))
    return LinComb(((Q(1), d_mu), (Q(-1), t1), (Q(-1), t2), (Q(-1), t3), (Q(-1), t4)))


def _cybe_expr() -> Expr:
    """[r12,r13] + [r12,r23] + [r13,r23] over the associative signature."""
    r12 = Tensor((Primitive("r"), Primitive("unit")))
    r13 = Compose((Perm((0, 2, 1)), r12))
    r23 = Tensor((Primitive("unit"), Primitive("r")))

    def prod(x, y):
        # componentwise product of two 0 -> 3 tensors
        return Compose((Tensor((Primitive("mu"), Primitive("mu"), Primitive("mu"))),
                        Perm((0, 3, 1, 4, 2, 5)),
                        Tensor((x, y))))

    terms = []
    for x, y in ((r12, r13), (r12, r23), (r13, r23)):
        terms.append((Q(1), prod(x, y)))
        terms.append((Q(-1), prod(y, x)))
    return LinComb(tuple(terms))


def universal_h2_product(g: LieBialgebra, p: int, q: int,
                         env: EnvAlgebra | None = None) -> EnvElement:
    """Evaluate the bank's product-correction expressions at generators (p, q)
    and multiply the resulting tensor words out in U(a)."""
    if env is None:
        bracket_table = {}
        for (i, j, k), v in g.c.items():
            bracket_table.setdefault((i, j), {})[k] = v
        env = EnvAlgebra(g.dim, bracket_table, g.names)
    bank = universal_bank()
    total = env.zero()
    for name in ("mu2_11_s2", "mu2_11_s3"):
        sig, e = bank[name]
        tensor = evaluate(e, g, sig)
        for idx, c in tensor.entries.items():
            if idx[:2] != (p, q):
                continue
            word = idx[2:]
            for w, c2 in env.normal_order_word(word).items():
                total = total + env.element({w: c * c2})
    return total.scale(Q(1, 24))


# ---------------------------------------------------------------------------
# naturality and functoriality
# ---------------------------------------------------------------------------

def naturality_defects(f: BialgebraHom, e: Expr, signature: str = "lba") -> list[str]:
    """f^(x)n o e_source - e_target o f^(x)m, entry by entry."""
    if signature != "lba":
        raise AcyclicError("naturality checks run over the bialgebra signature")
    m, n = arity(e, signature)
    src = evaluate(e, f.source, signature)
    tgt = evaluate(e, f.target, signature)
    mat = f.matrix
    dim_s, dim_t = f.source.dim, f.target.dim
    defects = []
    for inputs in itertools.product(range(dim_s), repeat=m):
        lhs: dict[tuple, Q] = {}
        for idx, c in src.entries.items():
            if idx[:m] != inputs:
                continue
            for outs in itertools.product(range(dim_t), repeat=n):
                w = c
                for s_out, t_out in zip(idx[m:], outs):
                    w *= mat[t_out][s_out]
                    if w == 0:
                        break
                if w != 0:
                    lhs[outs] = lhs.get(outs, Q(0)) + w
        rhs: dict[tuple, Q] = {}
        for t_inputs in itertools.product(range(dim_t), repeat=m):
            scale = Q(1)
            for s_in, t_in in zip(inputs, t_inputs):
                scale *= mat[t_in][s_in]
                if scale == 0:
                    break
            if scale == 0:
                continue
            for idx, c in tgt.entries.items():
                if idx[:m] != t_inputs:
                    continue
                rhs[idx[m:]] = rhs.get(idx[m:], Q(0)) + scale * c
        lhs = {k: v for k, v in lhs.items() if v != 0}
        rhs = {k: v for k, v in rhs.items() if v != 0}
        if lhs != rhs:
            defects.append(f"naturality fails at inputs {inputs}")
    return defects


def functoriality_check(f: BialgebraHom, max_degree: int = 2,
                        order: int = 3) -> list[str]:
    """The induced map on enveloping algebras intertwines the quantized
    product and coproduct at the truncation."""
    from .quantize import Quantization  # local import to avoid a cycle

    defects = f.check()
    if defects:
        return defects
    qs = Quantization(f.source, order)
    qt = Quantization(f.target, order)

    def push(x: EnvElement) -> EnvElement:
        out = qt.env_a.zero()
        for w, c in x.terms.items():
            term = qt.env_a.one()
            for letter in w:
                img = qt.env_a.element({(k,): v for k, v in f.apply(letter).items()})
                term = term * img
            out = out + term.scale(c)
        return out

    def words(dim, deg):
        for L in range(deg + 1):
            yield from itertools.combinations_with_replacement(range(dim), L)

    src_words = list(words(f.source.dim, max_degree))
    for wx in src_words:
        x = qs.env_a.element({wx: Q(1)})
        fx = push(x)
        # coproduct intertwining
        lhs = qs.ek_coproduct(x)
        rhs = qt.ek_coproduct(fx)
        pushed = [None] * order
        for k in range(order):
            acc = {}
            for (w1, w2), c in lhs[k].terms.items():
                p1 = push(qs.env_a.element({w1: Q(1)}))
                p2 = push(qs.env_a.element({w2: Q(1)}))
                for u1, c1 in p1.terms.items():
                    for u2, c2 in p2.terms.items():
                        key = (u1, u2)
                        val = acc.get(key, Q(0)) + c * c1 * c2
                        if val == 0:
                            acc.pop(key, None)
                        else:
                            acc[key] = val
            pushed[k] = acc
        for k in range(order):
            if pushed[k] != dict(rhs[k].terms):
                defects.append(f"coproduct not intertwined at {wx} (order {k})")
                break
        for wy in src_words:
            y = qs.env_a.element({wy: Q(1)})
            prod = qs.ek_product(x, y)
            lhs_elt = [push(prod[k]) for k in range(order)]
            rhs_series = qt.ek_product(fx, push(y))
            if any(lhs_elt[k] != rhs_series[k] for k in range(order)):
                defects.append(f"product not intertwined at ({wx}, {wy})")
    return defects
