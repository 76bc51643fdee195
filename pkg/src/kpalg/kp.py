"""Kähler-Poisson structure: the defining relation, the D-matrix and the module of derivations.

A derivation ``alpha = alpha_i D^i`` is stored as its coefficient vector
(:class:`Deriv`).  The generators ``D^i`` only generate the module, so two
coefficient vectors may represent the same derivation; equality is decided by
comparing actions on the generators ``x^j``.

Every ``D^i`` acts on representatives as the vector field
``sum_j D^{ij} d/dx^j`` because ``D^i(x^j) = D^{ij}``.  ``KPCtx.apply`` uses
that form; :func:`d_apply` evaluates the defining formula through brackets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ScopeError, SemanticError, VerificationError
from .poisson import BracketTable, CheckResult, check_relations_central
from .ring import Elem, RingCtx
from .skewnf import RingMatrix

__all__ = ["KPCtx", "Deriv", "kp_verify", "d_matrix", "d_apply", "project", "g_form",
           "coeffs_from_values", "trace"]


def _matmul(A, B, zero):
    cols = list(zip(*B))
    out = []
    for row in A:
        new = []
        for col in cols:
            acc = zero
            for a, b in zip(row, col):
                if a and b:
                    acc = acc + a * b
            new.append(acc)
        out.append(new)
    return out


class KPCtx:
    """A Poisson algebra with distinguished generators, metric ``g`` and unit ``eta``.

    By default the constructor checks that the relations are Poisson-central
    and that the KP relation holds, raising :class:`VerificationError`
    otherwise.  Pass ``verify=False`` to build a context for inspection only.
    """

    def __init__(self, table: BracketTable, g, eta, *, verify: bool = True):
        ring = table.ctx
        m = ring.ngens
        self.ring = ring
        self.table = table
        if isinstance(g, RingMatrix):
            g = g.rows
        self.g = tuple(tuple(ring.elem(v) for v in row) for row in g)
        if len(self.g) != m or any(len(r) != m for r in self.g):
            raise SemanticError(f"metric must be {m}x{m}")
        for i in range(m):
            for j in range(i + 1, m):
                if not (self.g[i][j] - self.g[j][i]).is_zero():
                    raise SemanticError(f"metric is not symmetric at ({i + 1},{j + 1})")
        self.eta = ring.parse(eta) if isinstance(eta, str) else ring.elem(eta)
        zero = ring.zero
        P = table.P
        gP = _matmul(self.g, P, zero)
        # D = eta * P g P^T = -eta * P g P
        PgP = _matmul(P, gP, zero)
        self.D = tuple(tuple(-(self.eta * v) for v in row) for row in PgP)
        self.Dlow = tuple(tuple(r) for r in _matmul(_matmul(self.g, self.D, zero), self.g, zero))
        self.Dmix = tuple(tuple(r) for r in _matmul(self.D, self.g, zero))
        # D_i acts as the vector field with components (g D)_{ik}
        self._low_fields = tuple(tuple(r) for r in _matmul(self.g, self.D, zero))
        self._PgPgP = _matmul(PgP, gP, zero)
        self._geometry = None
        if verify:
            central = check_relations_central(table)
            if not central:
                i, r = central.witness
                raise VerificationError(
                    f"bracket does not descend to the quotient: {{x{i + 1}, relation {r + 1}}} "
                    f"= {central.residual}")
            res = kp_verify(self)
            if not res:
                i, j = res.witness
                raise VerificationError(
                    f"KP relation fails at ({i + 1},{j + 1}): residual {res.residual}")

    @property
    def m(self) -> int:
        return self.ring.ngens

    @property
    def gens(self) -> tuple:
        return self.ring.gens

    def elem(self, v) -> Elem:
        return self.ring.parse(v) if isinstance(v, str) else self.ring.elem(v)

    def apply(self, field: Sequence[Elem], f: Elem) -> Elem:
        """Apply the vector field ``sum_j field[j] d/dx^j`` to ``f``."""
        acc = self.ring.zero
        for j, fj in enumerate(field):
            if fj:
                dj = f.partial(j)
                if dj:
                    acc = acc + fj * dj
        return acc

    def d(self, i: int, f: Elem) -> Elem:
        """``D^i(f)``."""
        return self.apply(self.D[i], self.elem(f))

    def d_low(self, i: int, f: Elem) -> Elem:
        """``D_i(f) = g_ij D^j(f)``."""
        return self.apply(self._low_fields[i], self.elem(f))

    def generator(self, i: int) -> "Deriv":
        return Deriv(self, [self.ring.one if k == i else self.ring.zero for k in range(self.m)])

    def generators(self) -> list["Deriv"]:
        return [self.generator(i) for i in range(self.m)]

    def deriv(self, coeffs: Sequence) -> "Deriv":
        return Deriv(self, coeffs)


class Deriv:
    """Element ``alpha_i D^i`` of the module generated by the ``D^i``."""

    __slots__ = ("kp", "coeffs", "_values")

    def __init__(self, kp: KPCtx, coeffs: Sequence):
        if len(coeffs) != kp.m:
            raise SemanticError(f"derivation needs {kp.m} coefficients")
        self.kp = kp
        self.coeffs = tuple(kp.elem(c) for c in coeffs)
        self._values = None

    def values(self) -> tuple:
        """``(alpha(x^1), ..., alpha(x^m))``; also the vector field components."""
        if self._values is None:
            kp = self.kp
            zero = kp.ring.zero
            out = []
            for j in range(kp.m):
                acc = zero
                for i, a in enumerate(self.coeffs):
                    if a and kp.D[i][j]:
                        acc = acc + a * kp.D[i][j]
                out.append(acc)
            self._values = tuple(out)
        return self._values

    def __call__(self, f) -> Elem:
        return self.kp.apply(self.values(), self.kp.elem(f))

    def _check(self, other: "Deriv"):
        if not isinstance(other, Deriv) or other.kp is not self.kp:
            raise ScopeError("derivations belong to different KP contexts")

    def __add__(self, other):
        self._check(other)
        return Deriv(self.kp, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return Deriv(self.kp, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return Deriv(self.kp, [-a for a in self.coeffs])

    def __mul__(self, c):
        c = self.kp.elem(c) if not isinstance(c, int) else c
        return Deriv(self.kp, [a * c for a in self.coeffs])

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values())

    def equals(self, other: "Deriv") -> bool:
        self._check(other)
        return all((a - b).is_zero() for a, b in zip(self.values(), other.values()))

    def residual(self, other: "Deriv") -> list[Elem]:
        self._check(other)
        return [a - b for a, b in zip(self.values(), other.values())]

    def __repr__(self):
        return f"Deriv([{', '.join(c.to_text() for c in self.coeffs)}])"


def kp_verify(ctx: KPCtx) -> CheckResult:
    """Check ``eta P g P g P = -P`` entrywise."""
    P = ctx.table.P
    for i in range(ctx.m):
        for j in range(ctx.m):
            res = ctx.eta * ctx._PgPgP[i][j] + P[i][j]
            if not res.is_zero():
                return CheckResult(False, (i, j), res)
    return CheckResult(True)


def d_matrix(ctx: KPCtx) -> tuple:
    return ctx.D


def d_apply(i: int, f, ctx: KPCtx) -> Elem:
    """``D^i(f) = eta {x^k, f} g_kl {x^l, x^i}`` evaluated through brackets."""
    if not 0 <= i < ctx.m:
        raise SemanticError(f"generator index {i} out of range")
    f = ctx.elem(f)
    ring, P, g = ctx.ring, ctx.table.P, ctx.g
    brk = ctx.table.hamiltonian(f)  # {f, x^k}
    acc = ring.zero
    for k in range(ctx.m):
        if not brk[k]:
            continue
        inner = ring.zero
        for l in range(ctx.m):
            if g[k][l] and P[l][i]:
                inner = inner + g[k][l] * P[l][i]
        if inner:
            acc = acc - brk[k] * inner
    return ctx.eta * acc


def project(X: Sequence, ctx: KPCtx) -> list[Elem]:
    """``D(X)^i = D^i_j X^j``."""
    X = [ctx.elem(v) for v in X]
    out = []
    for i in range(ctx.m):
        acc = ctx.ring.zero
        for j in range(ctx.m):
            if ctx.Dmix[i][j] and X[j]:
                acc = acc + ctx.Dmix[i][j] * X[j]
        out.append(acc)
    return out


def g_form(alpha: Deriv, beta: Deriv, ctx: KPCtx | None = None) -> Elem:
    """``g(alpha, beta) = alpha(x^i) g_ij beta(x^j)``."""
    ctx = ctx or alpha.kp
    a, b = alpha.values(), beta.values()
    acc = ctx.ring.zero
    for i in range(ctx.m):
        if not a[i]:
            continue
        for j in range(ctx.m):
            if ctx.g[i][j] and b[j]:
                acc = acc + a[i] * ctx.g[i][j] * b[j]
    return acc


def coeffs_from_values(values: Sequence, ctx: KPCtx) -> Deriv:
    """Derivation acting as ``x^j -> D^j_k v^k`` (lowering: ``alpha_i = g_ik v^k``)."""
    v = [ctx.elem(x) for x in values]
    coeffs = []
    for i in range(ctx.m):
        acc = ctx.ring.zero
        for k in range(ctx.m):
            if ctx.g[i][k] and v[k]:
                acc = acc + ctx.g[i][k] * v[k]
        coeffs.append(acc)
    return Deriv(ctx, coeffs)


def trace(L: Sequence[Sequence], ctx: KPCtx) -> Elem:
    """``tr(L) = g(L(D^i), D^j) D_ij`` where row ``i`` of ``L`` holds the coefficients of ``L(D^i)``."""
    m = ctx.m
    acc = ctx.ring.zero
    for i in range(m):
        row = [ctx.elem(v) for v in L[i]]
        for j in range(m):
            if not ctx.Dlow[i][j]:
                continue
            gij = ctx.ring.zero
            for k in range(m):
                if row[k] and ctx.D[k][j]:
                    gij = gij + row[k] * ctx.D[k][j]
            if gij:
                acc = acc + gij * ctx.Dlow[i][j]
    return acc
