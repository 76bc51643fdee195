"""Localized quotient rings ``Q[x1..xm]/(relations)[d1^-1, ..., dr^-1]``.

Elements are fractions ``num / prod(d_i^e_i)`` over a fixed list of declared
denominators.  The numerator is kept reduced modulo a Groebner basis of the
relations and denominator exponents are cancelled whenever the numerator is
an exact polynomial multiple of a denominator.

Zero testing treats ``p / d^e`` as zero iff ``p`` lies in the ideal.  That is
only sound when every declared denominator is a non-zero-divisor modulo the
relations; the ring cannot check this and leaves it to the caller.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .errors import NotAUnitError, ResourceLimitError, ScopeError, SemanticError
from .poly import (GREVLEX, MonomialOrder, Poly, buchberger, evaluate, exact_quotient,
                   format_poly, parse_expression, parse_poly, remainder)

__all__ = ["RingCtx", "Elem", "make_ctx", "normal_form", "elem_arith", "is_zero"]

MAX_TERMS = 200_000


class RingCtx:
    """Immutable description of a localized quotient ring."""

    def __init__(self, gens: Sequence[str], relations: Iterable[Poly | str] = (),
                 denoms: Iterable[Poly | str] = (), order: MonomialOrder = GREVLEX,
                 max_pairs: int = 5000, max_terms: int = MAX_TERMS):
        gens = tuple(gens)
        if len(set(gens)) != len(gens):
            raise SemanticError(f"generator names are not distinct: {gens}")
        if not gens:
            raise SemanticError("at least one generator is required")
        self.gens = gens
        self.order = order
        self.max_terms = max_terms
        self.relations = tuple(self._as_poly(r) for r in relations)
        self.groebner = tuple(buchberger([r for r in self.relations if r], order, max_pairs))
        self._lead = [g.leading(order)[0] for g in self.groebner]
        self.denoms_input = tuple(self._as_poly(d) for d in denoms)
        dens = []
        for raw in self.denoms_input:
            nf = self.reduce(raw)
            if nf.is_zero():
                raise SemanticError(
                    f"denominator {format_poly(raw)} is zero modulo the relations")
            dens.append(nf.primitive(order))
        self.denoms = tuple(dens)
        self._unit_denom = tuple(d.is_constant() for d in dens)
        self._pow_cache: dict[tuple, Poly] = {}
        self._dpartials = [[d.partial(j) for j in range(len(gens))] for d in dens]
        self.zero = Elem(self, Poly(gens, {}, _trusted=True), self._zexp)
        self.one = self.const(1)

    # -- helpers -----------------------------------------------------------
    @property
    def _zexp(self) -> tuple:
        return (0,) * len(self.denoms)

    @property
    def ngens(self) -> int:
        return len(self.gens)

    def _as_poly(self, p) -> Poly:
        if isinstance(p, str):
            return parse_poly(p, self.gens)
        if isinstance(p, Poly):
            if p.gens != self.gens:
                raise ScopeError(f"polynomial over {p.gens} used in context over {self.gens}")
            return p
        return Poly.const(self.gens, p)

    def reduce(self, p: Poly) -> Poly:
        """Normal form of a polynomial modulo the relations."""
        if not self._lead or not p.terms:
            return p
        lead = self._lead
        for m in p.terms:
            for lm in lead:
                if all(a <= b for a, b in zip(lm, m)):
                    return remainder(p, self.groebner, self.order)
        return p

    def dpow(self, exps: tuple) -> Poly:
        """Reduced product ``prod(d_i^exps_i)``."""
        p = self._pow_cache.get(exps)
        if p is None:
            if not any(exps):
                p = Poly.const(self.gens, 1)
            else:
                i = next(k for k, e in enumerate(exps) if e)
                rest = exps[:i] + (exps[i] - 1,) + exps[i + 1:]
                p = self.reduce(self.dpow(rest) * self.denoms[i])
            self._pow_cache[exps] = p
        return p

    def with_denominators(self, extra: Iterable[Poly | Elem]) -> "RingCtx":
        """New context with additional denominators (duplicates are skipped)."""
        dens = list(self.denoms_input)
        known = list(self.denoms)
        for d in extra:
            if isinstance(d, Elem):
                d = d.num
            p = self._as_poly(d)
            nf = self.reduce(p)
            if nf.is_zero():
                raise SemanticError(f"denominator {format_poly(p)} is zero modulo the relations")
            nf = nf.primitive(self.order)
            if nf.is_constant() or nf in known:
                continue
            known.append(nf)
            dens.append(p)
        ctx = RingCtx.__new__(RingCtx)
        ctx.__dict__.update(self.__dict__)
        ctx.denoms_input = tuple(dens)
        ctx.denoms = tuple(known)
        ctx._unit_denom = tuple(d.is_constant() for d in known)
        ctx._pow_cache = {}
        ctx._dpartials = [[d.partial(j) for j in range(len(self.gens))] for d in known]
        ctx.zero = Elem(ctx, Poly(self.gens, {}, _trusted=True), ctx._zexp)
        ctx.one = ctx.const(1)
        return ctx

    # -- element construction ----------------------------------------------
    def make(self, num: Poly, exps: Sequence[int] | None = None) -> "Elem":
        """Build the normalized element ``num / prod(d_i^exps_i)``."""
        exps = list(exps) if exps is not None else list(self._zexp)
        if len(num.terms) > self.max_terms:
            raise ResourceLimitError(
                f"element with {len(num.terms)} terms exceeds the budget of {self.max_terms}")
        num = self.reduce(num)
        if not num.terms:
            return Elem(self, num, self._zexp)
        for i, e in enumerate(exps):
            if not e:
                continue
            if self._unit_denom[i]:
                exps[i] = 0
                continue
            d = self.denoms[i]
            while exps[i]:
                q = exact_quotient(num, d, self.order)
                if q is None:
                    break
                num = self.reduce(q)
                exps[i] -= 1
        return Elem(self, num, tuple(exps))

    def lift(self, e: "Elem") -> "Elem":
        """Move ``e`` from a context whose denominators are a prefix of ours."""
        if e.ctx is self:
            return e
        src = e.ctx
        if (src.gens != self.gens or src.groebner != self.groebner
                or self.denoms[:len(src.denoms)] != src.denoms):
            raise ScopeError("cannot lift element: contexts are not compatible")
        return Elem(self, e.num, e.exps + (0,) * (len(self.denoms) - len(src.denoms)))

    def elem(self, p) -> "Elem":
        if isinstance(p, Elem):
            return self.lift(p)
        if isinstance(p, str):
            return self.parse(p)
        return self.make(self._as_poly(p))

    def const(self, c) -> "Elem":
        return self.make(Poly.const(self.gens, Fraction(c)))

    def gen(self, i) -> "Elem":
        return self.make(Poly.gen(self.gens, i))

    def inverse_denom(self, i: int, k: int = 1) -> "Elem":
        exps = [0] * len(self.denoms)
        exps[i] = k
        return self.make(Poly.const(self.gens, 1), exps)

    def denom_index(self, d) -> int:
        """Index of the declared denominator equal to ``d`` up to a constant factor."""
        nf = self.reduce(self._as_poly(d))
        if nf.is_zero():
            raise SemanticError("zero is not a denominator")
        nf = nf.primitive(self.order)
        for i, den in enumerate(self.denoms):
            if den == nf:
                return i
        raise SemanticError(f"{format_poly(nf)} is not a declared denominator")

    def unit_inverse(self, b: "Elem") -> "Elem":
        """Inverse of ``b`` when it is a nonzero constant times a product of denominators."""
        b = self.elem(b)
        if b.is_zero():
            raise NotAUnitError("division by zero")
        num = b.num
        f = [0] * len(self.denoms)
        for i, d in enumerate(self.denoms):
            if self._unit_denom[i]:
                continue
            while True:
                q = exact_quotient(num, d, self.order)
                if q is None:
                    break
                num = q
                f[i] += 1
        num = self.reduce(num)
        if num.is_constant():
            c = num.constant_value()
            return self.make(Poly.const(self.gens, 1 / c) * self.dpow(b.exps), f)
        # products of denominators may reduce modulo the relations; try small powers
        active = [i for i in range(len(self.denoms)) if not self._unit_denom[i]]
        bound = max(4, num.total_degree() + 1)
        for powers in product(range(bound + 1), repeat=len(active)):
            if sum(powers) == 0 or sum(powers) > bound:
                continue
            g = [0] * len(self.denoms)
            for i, k in zip(active, powers):
                g[i] = k
            cand = self.dpow(tuple(g))
            if not cand.terms:
                continue
            lm, lc = cand.leading(self.order)
            c = b.num.terms.get(lm)
            if c is not None and cand.scale(c / lc) == b.num:
                return self.make(Poly.const(self.gens, lc / c) * self.dpow(b.exps), g)
        raise NotAUnitError(f"{b} is not a product of declared denominators")

    def parse(self, text: str) -> "Elem":
        """Parse an element; ``/`` is allowed by constants and declared denominators."""
        tree = parse_expression(text, self.gens)

        def divide(a, b):
            return a * self.unit_inverse(b)

        return evaluate(tree, self.const, self.gen, divide, text)

    def __repr__(self):
        rel = ", ".join(format_poly(r) for r in self.relations)
        den = ", ".join(format_poly(d) for d in self.denoms)
        return f"RingCtx(gens={self.gens}, relations=[{rel}], denoms=[{den}], order={self.order.kind})"


class Elem:
    """Element of a :class:`RingCtx`; always stored in normal form."""

    __slots__ = ("ctx", "num", "exps")

    def __init__(self, ctx: RingCtx, num: Poly, exps: tuple):
        self.ctx = ctx
        self.num = num
        self.exps = exps

    def _coerce(self, other) -> "Elem":
        if isinstance(other, Elem):
            if other.ctx is not self.ctx:
                raise ScopeError("elements belong to different ring contexts")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.const(other)
        if isinstance(other, Poly):
            return self.ctx.elem(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.num.terms

    def __bool__(self):
        return bool(self.num.terms)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num.terms:
            return self
        if not self.num.terms:
            return other
        ctx = self.ctx
        ea, eb = self.exps, other.exps
        if ea == eb:
            return ctx.make(self.num + other.num, ea)
        top = tuple(max(a, b) for a, b in zip(ea, eb))
        na = self.num * ctx.dpow(tuple(t - a for t, a in zip(top, ea)))
        nb = other.num * ctx.dpow(tuple(t - b for t, b in zip(top, eb)))
        return ctx.make(na + nb, top)

    __radd__ = __add__

    def __neg__(self):
        return Elem(self.ctx, -self.num, self.exps)

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
            if not other:
                return self.ctx.zero
            return Elem(self.ctx, self.num.scale(other), self.exps)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num.terms or not other.num.terms:
            return self.ctx.zero
        return self.ctx.make(self.num * other.num,
                             tuple(a + b for a, b in zip(self.exps, other.exps)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise NotAUnitError("division by zero")
            return Elem(self.ctx, self.num.scale(1 / Fraction(other)), self.exps)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * self.ctx.unit_inverse(other)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise SemanticError("element exponent must be a nonnegative integer")
        result = self.ctx.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except ScopeError:
            return False
        if other is NotImplemented:
            return other
        if self.exps == other.exps and self.num == other.num:
            return True
        return (self - other).is_zero()

    __hash__ = None  # equality is semantic (cross-multiplication), not structural

    def partial(self, j: int) -> "Elem":
        """Formal partial derivative of this representative.

        Not well defined on the quotient by itself; only combinations that
        preserve the ideal (Hamiltonian vector fields) give meaningful results.
        """
        ctx = self.ctx
        n = self.num
        dn = n.partial(j)
        active = [i for i, e in enumerate(self.exps) if e]
        if not active:
            return ctx.make(dn)
        num = dn
        for i in active:
            num = num * ctx.denoms[i]
        for i in active:
            dd = ctx._dpartials[i][j]
            if not dd.terms:
                continue
            t = n * dd.scale(-self.exps[i])
            for k in active:
                if k != i:
                    t = t * ctx.denoms[k]
            num = num + t
        exps = list(self.exps)
        for i in active:
            exps[i] += 1
        return ctx.make(num, exps)

    def to_text(self) -> str:
        num = format_poly(self.num, self.ctx.order)
        if not any(self.exps):
            return num
        factors = []
        for d, e in zip(self.ctx.denoms, self.exps):
            if not e:
                continue
            ds = format_poly(d, self.ctx.order)
            single = len(d.terms) == 1 and next(iter(d.terms.values())) == 1
            base = ds if single else f"({ds})"
            factors.append(base if e == 1 else f"{base}^{e}")
        if len(self.num.terms) > 1:
            num = f"({num})"
        den = factors[0] if len(factors) == 1 else f"({'*'.join(factors)})"
        return f"{num} / {den}"

    __str__ = to_text

    def __repr__(self):
        return f"Elem({self.to_text()!r})"


def make_ctx(gens: Sequence[str], relations=(), denoms=(), order: MonomialOrder = GREVLEX,
             max_pairs: int = 5000, max_terms: int = MAX_TERMS) -> RingCtx:
    return RingCtx(gens, relations, denoms, order, max_pairs, max_terms)


def normal_form(e: Elem, ctx: RingCtx | None = None) -> Elem:
    ctx = ctx or e.ctx
    if e.ctx is not ctx:
        raise ScopeError("element belongs to a different ring context")
    return ctx.make(e.num, e.exps)


def elem_arith(op: str, a: Elem, b=None) -> Elem:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "div_by_denom":
        return a / b
    raise SemanticError(f"unknown element operation {op!r}")


def is_zero(e: Elem) -> bool:
    return e.is_zero()
