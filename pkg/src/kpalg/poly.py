"""Sparse multivariate polynomials over the rationals.

A :class:`Poly` is an immutable map from exponent tuples to nonzero
``Fraction`` coefficients, tied to a tuple of generator names.  This module
also holds the expression parser shared with the ring module, canonical
formatting, multivariate division and a small Buchberger implementation.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .errors import (ParseError, ResourceLimitError, ScopeError, SemanticError,
                     UnknownGeneratorError)

Rat = Fraction
Mono = tuple  # tuple[int, ...], one exponent per generator

__all__ = [
    "Rat", "MonomialOrder", "GREVLEX", "LEX", "Poly", "parse_poly", "format_poly",
    "poly_arith", "partial", "divmod_multi", "buchberger", "exact_quotient",
    "parse_expression", "evaluate",
]


# --------------------------------------------------------------------------
# monomial orders
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MonomialOrder:
    """Total order on monomials.

    ``precedence`` lists generator indices from most to least significant;
    ``None`` means declaration order.
    """

    kind: str = "grevlex"
    precedence: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex"):
            raise SemanticError(f"unknown monomial order {self.kind!r}")
        if self.precedence is not None:
            p = tuple(self.precedence)
            if sorted(p) != list(range(len(p))):
                raise SemanticError(f"precedence {p} is not a permutation")
            object.__setattr__(self, "precedence", p)

    @classmethod
    def from_name(cls, name: str, precedence=None) -> "MonomialOrder":
        aliases = {"grevlex": "grevlex", "degrevlex": "grevlex", "lex": "lex"}
        try:
            return cls(aliases[name.strip().lower()], precedence)
        except KeyError:
            raise SemanticError(f"unknown monomial order {name!r}") from None

    @property
    def name(self) -> str:
        return self.kind

    def _perm(self, exps: Mono) -> Mono:
        if self.precedence is None:
            return exps
        return tuple(exps[i] for i in self.precedence)

    @cached_property
    def key(self) -> Callable[[Mono], tuple]:
        """Sort key: larger key means larger monomial."""
        perm = self._perm
        if self.kind == "lex":
            return perm

        def grevlex(exps):
            e = perm(exps)
            return (sum(e), tuple(-v for v in reversed(e)))
        return grevlex

    @cached_property
    def neg_key(self) -> Callable[[Mono], tuple]:
        """Key whose minimum is the largest monomial (for heapq)."""
        perm = self._perm
        if self.kind == "lex":
            return lambda exps: tuple(-v for v in perm(exps))

        def grevlex(exps):
            e = perm(exps)
            return (-sum(e), tuple(reversed(e)))
        return grevlex


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def _int_terms(terms: dict) -> tuple[list, int]:
    """Coefficients scaled to integers by their common denominator."""
    den = 1
    for c in terms.values():
        d = c.denominator
        if d != 1 and den % d:
            den = den * d // gcd(den, d)
    if den == 1:
        return [(m, c.numerator) for m, c in terms.items()], 1
    return [(m, c.numerator * (den // c.denominator)) for m, c in terms.items()], den


def _divides(a: Mono, b: Mono) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _mono_mul(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def _mono_div(a: Mono, b: Mono) -> Mono:
    return tuple(x - y for x, y in zip(a, b))


# --------------------------------------------------------------------------
# Poly
# --------------------------------------------------------------------------

class Poly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("gens", "terms", "_hash")

    def __init__(self, gens: Sequence[str], terms: dict | None = None, *, _trusted=False):
        self.gens = gens if isinstance(gens, tuple) else tuple(gens)
        if _trusted:
            self.terms = terms
        else:
            n = len(self.gens)
            clean = {}
            for m, c in (terms or {}).items():
                m = tuple(int(e) for e in m)
                if len(m) != n or any(e < 0 for e in m):
                    raise SemanticError(f"bad exponent vector {m} for generators {self.gens}")
                c = Fraction(c)
                if c:
                    clean[m] = clean.get(m, 0) + c
            self.terms = {m: c for m, c in clean.items() if c}
        self._hash = None

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, gens) -> "Poly":
        return cls(gens, {}, _trusted=True) if isinstance(gens, tuple) else cls(gens)

    @classmethod
    def const(cls, gens, c) -> "Poly":
        gens = tuple(gens)
        c = Fraction(c)
        return cls(gens, {(0,) * len(gens): c} if c else {}, _trusted=True)

    @classmethod
    def gen(cls, gens, name_or_index) -> "Poly":
        gens = tuple(gens)
        i = _gen_index(gens, name_or_index)
        m = tuple(1 if k == i else 0 for k in range(len(gens)))
        return cls(gens, {m: Fraction(1)}, _trusted=True)

    # -- basic queries -----------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.gens)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Fraction:
        """Coefficient of the unit monomial."""
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def degree_in(self, gen) -> int:
        i = _gen_index(self.gens, gen)
        return max((m[i] for m in self.terms), default=-1)

    def leading(self, order: MonomialOrder = GREVLEX) -> tuple[Mono, Fraction]:
        if not self.terms:
            raise SemanticError("zero polynomial has no leading term")
        m = max(self.terms, key=order.key)
        return m, self.terms[m]

    def monic(self, order: MonomialOrder = GREVLEX) -> "Poly":
        if not self.terms:
            return self
        _, lc = self.leading(order)
        return self.scale(1 / lc)

    def primitive(self, order: MonomialOrder = GREVLEX) -> "Poly":
        """Scale to coprime integer coefficients with a positive leading coefficient."""
        if not self.terms:
            return self
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        g = 0
        for c in self.terms.values():
            g = gcd(g, c.numerator * (den // c.denominator))
        _, lc = self.leading(order)
        factor = Fraction(den, g) if lc > 0 else Fraction(-den, g)
        return self.scale(factor)

    def sorted_terms(self, order: MonomialOrder = GREVLEX) -> list[tuple[Mono, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.gens != self.gens:
                raise ScopeError(f"generator scopes differ: {self.gens} vs {other.gens}")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.gens, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        for m, c in b.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v += c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Poly(self.gens, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.gens, {m: -c for m, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return Poly(self.gens, {}, _trusted=True)
        # multiply over a common denominator in plain ints, then rebuild Fractions
        a, da = _int_terms(self.terms)
        b, db = _int_terms(other.terms)
        out: dict = {}
        get = out.get
        for m1, c1 in a:
            for m2, c2 in b:
                m = tuple([x + y for x, y in zip(m1, m2)])
                out[m] = get(m, 0) + c1 * c2
        den = da * db
        if den == 1:
            terms = {m: Fraction(c) for m, c in out.items() if c}
        else:
            terms = {m: Fraction(c, den) for m, c in out.items() if c}
        return Poly(self.gens, terms, _trusted=True)

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly(self.gens, {}, _trusted=True)
        if c == 1:
            return self
        return Poly(self.gens, {m: v * c for m, v in self.terms.items()}, _trusted=True)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of a polynomial by zero")
            return self.scale(1 / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise SemanticError("polynomial exponent must be a nonnegative integer")
        result = Poly.const(self.gens, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_term(self, mono: Mono, c: Fraction) -> "Poly":
        return Poly(self.gens, {_mono_mul(m, mono): v * c for m, v in self.terms.items()},
                    _trusted=True)

    def partial(self, gen) -> "Poly":
        i = _gen_index(self.gens, gen)
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                out[m[:i] + (e - 1,) + m[i + 1:]] = c * e
        return Poly(self.gens, out, _trusted=True)

    def evaluate(self, values: Sequence) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for v, e in zip(values, m):
                if e:
                    t *= Fraction(v) ** e
            total += t
        return total

    # -- comparisons -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.gens == other.gens and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.gens, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, gens={self.gens})"

    def __str__(self):
        return format_poly(self)


def _gen_index(gens: tuple, gen) -> int:
    if isinstance(gen, int):
        if not 0 <= gen < len(gens):
            raise SemanticError(f"generator index {gen} out of range")
        return gen
    try:
        return gens.index(gen)
    except ValueError:
        raise SemanticError(f"unknown generator {gen!r}") from None


# --------------------------------------------------------------------------
# expression parsing (shared by polynomials and ring elements)
# --------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        else:
            op = m.group(3)
            if op == "**":
                raise ParseError("use '^' for exponentiation", text, start)
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.names = {name: i for i, name in enumerate(names)}
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, self.text, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        tree = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return tree

    def expr(self):
        node = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = ("add" if op == "+" else "sub", node, self.term())
        return node

    def term(self):
        node = self.unary()
        while True:
            tok = self.peek()
            if tok[:2] in (("op", "*"), ("op", "/")):
                self.take()
                node = ("mul" if tok[1] == "*" else "div", node, self.unary(), tok[2])
            elif tok[0] in ("num", "name") or tok[:2] == ("op", "("):
                raise self.error("implicit multiplication is not allowed; use '*'")
            else:
                return node

    def unary(self):
        tok = self.peek()
        if tok[:2] == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        if tok[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise self.error("exponent must be a nonnegative integer literal", tok)
            if self.peek()[:2] == ("op", "^"):
                raise self.error("chained exponents are ambiguous; add parentheses")
            return ("pow", base, int(tok[1]))
        return base

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            return ("num", Fraction(int(val)))
        if kind == "name":
            if val not in self.names:
                raise UnknownGeneratorError(val, self.text, pos)
            return ("var", self.names[val])
        if (kind, val) == ("op", "("):
            node = self.expr()
            if self.peek()[:2] != ("op", ")"):
                raise self.error("expected ')'")
            self.take()
            return node
        raise self.error(f"unexpected token {val!r}" if val else "unexpected end of input", tok)


def parse_expression(text: str, names: Sequence[str]):
    """Parse ``text`` into a small tuple-based syntax tree."""
    return _Parser(text, names).parse()


def evaluate(tree, const: Callable, var: Callable, divide: Callable, text: str = ""):
    """Fold a syntax tree with the given leaf constructors and division rule."""
    tag = tree[0]
    if tag == "num":
        return const(tree[1])
    if tag == "var":
        return var(tree[1])
    if tag == "neg":
        return -evaluate(tree[1], const, var, divide, text)
    if tag == "pow":
        return evaluate(tree[1], const, var, divide, text) ** tree[2]
    a = evaluate(tree[1], const, var, divide, text)
    b = evaluate(tree[2], const, var, divide, text)
    if tag == "add":
        return a + b
    if tag == "sub":
        return a - b
    if tag == "mul":
        return a * b
    try:
        return divide(a, b)
    except (SemanticError, ZeroDivisionError) as exc:
        raise ParseError(str(exc), text, tree[3]) from None


def parse_poly(text: str, gens: Sequence[str]) -> Poly:
    """Parse polynomial text over ``gens``; division is allowed by nonzero constants only."""
    gens = tuple(gens)
    tree = parse_expression(text, gens)

    def divide(a: Poly, b: Poly):
        if not b.is_constant():
            raise SemanticError("division by a non-constant polynomial")
        if b.is_zero():
            raise SemanticError("division by zero")
        return a.scale(1 / b.constant_value())

    return evaluate(tree, lambda c: Poly.const(gens, c), lambda i: Poly.gen(gens, i),
                    divide, text)


def _format_mono(gens: tuple, m: Mono) -> str:
    parts = []
    for name, e in zip(gens, m):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_poly(p: Poly, order: MonomialOrder = GREVLEX) -> str:
    """Canonical text: terms in descending monomial order, re-parsable by parse_poly."""
    if not p.terms:
        return "0"
    out = []
    for idx, (m, c) in enumerate(p.sorted_terms(order)):
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        mono = _format_mono(p.gens, m)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if idx == 0:
            out.append(body if sign == "+" else "-" + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def poly_arith(op: str, a: Poly, b=None) -> Poly:
    """Dispatch form of the arithmetic operators (``add, sub, mul, neg, scale``)."""
    if op == "add":
        return a + a._coerce(b)
    if op == "sub":
        return a - a._coerce(b)
    if op == "mul":
        return a * a._coerce(b)
    if op == "neg":
        return -a
    if op == "scale":
        return a.scale(b)
    raise SemanticError(f"unknown polynomial operation {op!r}")


def partial(p: Poly, gen) -> Poly:
    return p.partial(gen)


# --------------------------------------------------------------------------
# division and Groebner bases
# --------------------------------------------------------------------------

def _reduce(p: Poly, divisors: Sequence[Poly], order: MonomialOrder,
            want_quotients: bool, exact: bool = False):
    """Heap-driven multivariate division; returns (quotient term dicts, remainder dict).

    With ``exact`` the division stops at the first remainder term and returns
    ``(None, None)``: remainder terms are final, so the division cannot be exact.
    """
    leads = []
    for d in divisors:
        lm, lc = d.leading(order)
        tail = [(m, c) for m, c in d.terms.items() if m != lm]
        leads.append((lm, lc, tail))
    quots = [dict() for _ in divisors] if want_quotients else None
    rem = {}
    work = dict(p.terms)
    nk = order.neg_key
    heap = [(nk(m), m) for m in work]
    heapq.heapify(heap)
    while heap:
        _, m = heapq.heappop(heap)
        c = work.pop(m, None)
        if c is None:
            continue
        for i, (lm, lc, tail) in enumerate(leads):
            if all(x <= y for x, y in zip(lm, m)):
                q = c / lc
                mq = tuple(x - y for x, y in zip(m, lm))
                if quots is not None:
                    quots[i][mq] = quots[i].get(mq, 0) + q
                for tm, tc in tail:
                    nm = tuple(x + y for x, y in zip(tm, mq))
                    old = work.get(nm)
                    if old is None:
                        work[nm] = -q * tc
                        heapq.heappush(heap, (nk(nm), nm))
                    else:
                        v = old - q * tc
                        if v:
                            work[nm] = v
                        else:
                            del work[nm]
                break
        else:
            if exact:
                return None, None
            rem[m] = c
    return quots, rem


def divmod_multi(p: Poly, divisors: Sequence[Poly], order: MonomialOrder = GREVLEX
                 ) -> tuple[list[Poly], Poly]:
    """Multivariate division: ``p == sum(q_i * d_i) + r`` with r reduced."""
    for d in divisors:
        if d.gens != p.gens:
            raise ScopeError("divisor has a different generator scope")
        if d.is_zero():
            raise SemanticError("cannot divide by the zero polynomial")
    quots, rem = _reduce(p, divisors, order, True)
    gens = p.gens
    return ([Poly(gens, {m: c for m, c in q.items() if c}, _trusted=True) for q in quots],
            Poly(gens, rem, _trusted=True))


def remainder(p: Poly, divisors: Sequence[Poly], order: MonomialOrder = GREVLEX) -> Poly:
    if not divisors or not p.terms:
        return p
    return Poly(p.gens, _reduce(p, divisors, order, False)[1], _trusted=True)


def exact_quotient(p: Poly, d: Poly, order: MonomialOrder = GREVLEX) -> Poly | None:
    """Return ``p / d`` if ``d`` divides ``p`` exactly as polynomials, else None."""
    if d.is_zero():
        raise SemanticError("division by the zero polynomial")
    if p.is_zero():
        return p
    lm_p, _ = p.leading(order)
    lm_d, _ = d.leading(order)
    if not _divides(lm_d, lm_p):
        return None
    n = len(p.gens)
    for k in range(n):
        if max(m[k] for m in d.terms) > max(m[k] for m in p.terms):
            return None
    quots, rem = _reduce(p, [d], order, True, exact=True)
    if quots is None:
        return None
    return Poly(p.gens, {m: c for m, c in quots[0].items() if c}, _trusted=True)


def _spoly(f: Poly, g: Poly, order: MonomialOrder) -> Poly:
    mf, cf = f.leading(order)
    mg, cg = g.leading(order)
    lcm = tuple(max(a, b) for a, b in zip(mf, mg))
    return f.mul_term(_mono_div(lcm, mf), 1 / cf) - g.mul_term(_mono_div(lcm, mg), 1 / cg)


def buchberger(gens: Iterable[Poly], order: MonomialOrder = GREVLEX,
               max_pairs: int = 5000) -> list[Poly]:
    """Reduced, monic Groebner basis of the ideal generated by ``gens``.

    ``max_pairs`` bounds the number of S-pairs processed; exceeding it raises
    :class:`ResourceLimitError`.
    """
    basis = []
    for g in gens:
        if g.is_zero():
            raise SemanticError("zero polynomial in Groebner input")
        basis.append(g.monic(order))
    if not basis:
        return []
    scope = basis[0].gens
    if any(g.gens != scope for g in basis):
        raise ScopeError("Groebner input polynomials have different scopes")

    key = order.key
    lms = [g.leading(order)[0] for g in basis]
    pairs = set(combinations(range(len(basis)), 2))
    processed = 0
    while pairs:
        # normal selection strategy: smallest lcm first
        i, j = min(pairs, key=lambda ij: key(tuple(max(a, b) for a, b in
                                                   zip(lms[ij[0]], lms[ij[1]]))))
        pairs.discard((i, j))
        if all(a == 0 or b == 0 for a, b in zip(lms[i], lms[j])):
            continue  # coprime leading monomials: S-pair reduces to 0
        processed += 1
        if processed > max_pairs:
            raise ResourceLimitError(f"Groebner pair budget of {max_pairs} exceeded")
        r = remainder(_spoly(basis[i], basis[j], order), basis, order)
        if r:
            r = r.monic(order)
            basis.append(r)
            lms.append(r.leading(order)[0])
            k = len(basis) - 1
            pairs.update((a, k) for a in range(k))

    # minimal basis: drop elements whose leading monomial is divisible by another's
    keep = []
    for i, g in enumerate(basis):
        if any(j != i and _divides(lms[j], lms[i]) and (lms[j] != lms[i] or j < i)
               for j in range(len(basis))):
            continue
        keep.append(g)
    reduced = []
    for i, g in enumerate(keep):
        others = keep[:i] + keep[i + 1:]
        lm, lc = g.leading(order)
        tail = Poly(g.gens, {m: c for m, c in g.terms.items() if m != lm}, _trusted=True)
        reduced.append(Poly(g.gens, {lm: lc}, _trusted=True) + remainder(tail, others, order))
    return sorted((g.monic(order) for g in reduced),
                  key=lambda g: key(g.leading(order)[0]), reverse=True)
