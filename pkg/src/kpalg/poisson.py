"""Poisson brackets on a localized quotient ring, given by a generator table."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .errors import ScopeError, SemanticError
from .poly import Poly
from .ring import Elem, RingCtx

__all__ = ["BracketTable", "CheckResult", "bracket", "jacobi_check",
           "check_relations_central", "level_set_table"]


@dataclass
class CheckResult:
    """Outcome of an identity check; truthy iff the identity holds."""

    ok: bool
    witness: tuple | None = None
    residual: Elem | None = None

    def __bool__(self):
        return self.ok


class BracketTable:
    """Antisymmetric matrix ``P[i][j] = {x^i, x^j}`` over a ring context."""

    def __init__(self, ctx: RingCtx, P: Sequence[Sequence]):
        m = ctx.ngens
        if len(P) != m or any(len(row) != m for row in P):
            raise SemanticError(f"bracket table must be {m}x{m}")
        self.ctx = ctx
        self.P = tuple(tuple(ctx.elem(v) for v in row) for row in P)
        for i in range(m):
            if not self.P[i][i].is_zero():
                raise SemanticError(f"bracket table has nonzero diagonal entry at {i + 1}")
            for j in range(i + 1, m):
                if not (self.P[i][j] + self.P[j][i]).is_zero():
                    raise SemanticError(f"bracket table is not antisymmetric at ({i + 1},{j + 1})")

    @classmethod
    def from_upper(cls, ctx: RingCtx, entries: dict) -> "BracketTable":
        """Build from ``{(i, j): value}`` with ``i < j`` (0-based); missing entries are 0."""
        m = ctx.ngens
        P = [[ctx.zero] * m for _ in range(m)]
        for (i, j), v in entries.items():
            if not (0 <= i < m and 0 <= j < m) or i == j:
                raise SemanticError(f"bad bracket index pair ({i + 1},{j + 1})")
            v = ctx.parse(v) if isinstance(v, str) else ctx.elem(v)
            if i > j:
                i, j, v = j, i, -v
            P[i][j] = v
            P[j][i] = -v
        return cls(ctx, P)

    def lift(self, ctx: RingCtx) -> "BracketTable":
        return BracketTable(ctx, [[ctx.lift(v) for v in row] for row in self.P])

    @property
    def m(self) -> int:
        return self.ctx.ngens

    def __getitem__(self, ij):
        i, j = ij
        return self.P[i][j]

    def hamiltonian(self, a: Elem) -> list[Elem]:
        """Components ``{a, x^j}`` of the vector field ``{a, .}``."""
        a = self.ctx.elem(a)
        m = self.m
        grad = [a.partial(i) for i in range(m)]
        out = []
        for j in range(m):
            acc = self.ctx.zero
            for i in range(m):
                if grad[i] and self.P[i][j]:
                    acc = acc + grad[i] * self.P[i][j]
            out.append(acc)
        return out

    def apply_field(self, field: Sequence[Elem], b: Elem) -> Elem:
        """Apply the derivation ``sum_j field[j] * d/dx^j`` to ``b``."""
        acc = self.ctx.zero
        for j, fj in enumerate(field):
            if fj:
                dj = b.partial(j)
                if dj:
                    acc = acc + fj * dj
        return acc

    def bracket(self, a: Elem, b: Elem) -> Elem:
        a = self.ctx.elem(a)
        b = self.ctx.elem(b)
        return self.apply_field(self.hamiltonian(a), b)


def bracket(a: Elem, b: Elem, P: BracketTable) -> Elem:
    if a.ctx is not P.ctx or b.ctx is not P.ctx:
        raise ScopeError("bracket operands belong to a different ring context")
    return P.bracket(a, b)


def jacobi_check(P: BracketTable) -> CheckResult:
    """Jacobiator on all generator triples; the first nonzero one is the witness."""
    ctx = P.ctx
    for i, j, k in combinations(range(P.m), 3):
        x = [ctx.gen(t) for t in (i, j, k)]
        res = (P.bracket(P[i, j], x[2]) + P.bracket(P[j, k], x[0])
               + P.bracket(P[k, i], x[1]))
        if not res.is_zero():
            return CheckResult(False, (i, j, k), res)
    return CheckResult(True)


def check_relations_central(P: BracketTable, ctx: RingCtx | None = None) -> CheckResult:
    """Check ``{x^i, r} = 0`` modulo the ideal for every generator and relation."""
    ctx = ctx or P.ctx
    for ridx, r in enumerate(ctx.relations):
        grads = [ctx.make(r.partial(j)) for j in range(ctx.ngens)]
        for i in range(ctx.ngens):
            acc = ctx.zero
            for j in range(ctx.ngens):
                if grads[j] and P[i, j]:
                    acc = acc + P[i, j] * grads[j]
            if not acc.is_zero():
                return CheckResult(False, (i, ridx), acc)
    return CheckResult(True)


def level_set_table(C: Poly | str, ctx: RingCtx) -> BracketTable:
    """Bracket ``{x^i, x^j} = eps^{ijk} d_k C`` on three generators."""
    if ctx.ngens != 3:
        raise SemanticError(f"level-set brackets need exactly 3 generators, got {ctx.ngens}")
    C = ctx._as_poly(C)
    d = [C.partial(k) for k in range(3)]
    return BracketTable.from_upper(ctx, {(0, 1): ctx.make(d[2]), (1, 2): ctx.make(d[0]),
                                         (0, 2): -ctx.make(d[1])})
