"""Congruence normal form of antisymmetric matrices over a commutative ring.

``block_diagonalize`` finds ``V`` with ``V^T P V`` block diagonal using only
ring operations (no division), and ``build_metric`` turns that into a metric
``g``, a unit ``lam`` and ``eta = 1/lam^2`` with ``P g P g P = -lam^2 P``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import ResourceLimitError, SemanticError, VerificationError
from .ring import Elem, RingCtx

__all__ = ["RingMatrix", "BlockDiagResult", "MetricConstruction", "eliminate_pair",
           "block_diagonalize", "adjugate", "build_metric"]

MAX_COFACTOR_DIM = 8


class RingMatrix:
    """Square or rectangular matrix of ring elements with an optional shape tag."""

    __slots__ = ("ctx", "rows", "shape")

    def __init__(self, ctx: RingCtx, rows: Sequence[Sequence], shape: str = "general"):
        self.ctx = ctx
        self.rows = tuple(tuple(ctx.elem(v) for v in row) for row in rows)
        if any(len(r) != len(self.rows[0]) for r in self.rows):
            raise SemanticError("ragged matrix")
        if shape not in ("general", "symmetric", "antisymmetric"):
            raise SemanticError(f"unknown shape tag {shape!r}")
        if shape != "general":
            n = len(self.rows)
            if any(len(r) != n for r in self.rows):
                raise SemanticError(f"{shape} matrix must be square")
            sign = 1 if shape == "symmetric" else -1
            for i in range(n):
                for j in range(i, n):
                    a, b = self.rows[i][j], self.rows[j][i]
                    if not (a - b * sign).is_zero():
                        raise SemanticError(f"matrix is not {shape} at ({i + 1},{j + 1})")
        self.shape = shape

    @classmethod
    def identity(cls, ctx: RingCtx, n: int) -> "RingMatrix":
        return cls(ctx, [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)],
                   "symmetric")

    @classmethod
    def diagonal(cls, ctx: RingCtx, entries: Sequence) -> "RingMatrix":
        n = len(entries)
        return cls(ctx, [[ctx.elem(entries[i]) if i == j else ctx.zero for j in range(n)]
                         for i in range(n)], "symmetric")

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __iter__(self):
        return iter(self.rows)

    @property
    def T(self) -> "RingMatrix":
        return RingMatrix(self.ctx, list(zip(*self.rows)))

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        cols = list(zip(*other.rows))
        zero = self.ctx.zero
        out = []
        for row in self.rows:
            new = []
            for col in cols:
                acc = zero
                for a, b in zip(row, col):
                    if a and b:
                        acc = acc + a * b
                new.append(acc)
            out.append(new)
        return RingMatrix(self.ctx, out)

    def __add__(self, other: "RingMatrix") -> "RingMatrix":
        return RingMatrix(self.ctx, [[a + b for a, b in zip(r, s)]
                                     for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "RingMatrix") -> "RingMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "RingMatrix":
        return RingMatrix(self.ctx, [[a * c for a in r] for r in self.rows])

    def is_zero(self) -> bool:
        return all(v.is_zero() for r in self.rows for v in r)

    def first_nonzero(self):
        for i, r in enumerate(self.rows):
            for j, v in enumerate(r):
                if not v.is_zero():
                    return (i, j), v
        return None

    def lift(self, ctx: RingCtx) -> "RingMatrix":
        return RingMatrix(ctx, [[ctx.lift(v) for v in r] for r in self.rows], self.shape)

    def to_text(self) -> list[list[str]]:
        return [[v.to_text() for v in r] for r in self.rows]

    def __repr__(self):
        return f"RingMatrix({self.to_text()})"


@dataclass
class BlockDiagResult:
    V: RingMatrix
    lambdas: list[Elem]
    residual_zero_block: bool


@dataclass
class MetricConstruction:
    """Everything produced by the metric recipe; ``ctx`` is the localized ring."""

    g: RingMatrix
    lam: Elem
    eta: Elem
    V: RingMatrix
    lambdas: list[Elem]
    det_v: Elem
    ctx: RingCtx
    P: RingMatrix
    block: RingMatrix = field(repr=False)


def _as_matrix(P, ctx: RingCtx | None = None) -> RingMatrix:
    if isinstance(P, RingMatrix):
        return P
    if hasattr(P, "P") and hasattr(P, "ctx"):  # BracketTable
        return RingMatrix(P.ctx, P.P, "antisymmetric")
    if ctx is None:
        raise SemanticError("a ring context is required to build a matrix")
    return RingMatrix(ctx, P, "antisymmetric")


def eliminate_pair(P: RingMatrix) -> tuple[RingMatrix, RingMatrix]:
    """One elimination step: clear rows/columns 1,2 outside the leading 2x2 block.

    Column ``k >= 3`` of ``V`` is ``p12*e_k - p_k2*e_1 + p_k1*e_2`` (1-based), the
    combined effect of the three elementary operations for that row.
    """
    P = _as_matrix(P)
    ctx, n = P.ctx, P.n
    if n < 2:
        raise SemanticError("elimination needs at least a 2x2 matrix")
    V = [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)]
    p12 = P[0, 1]
    for k in range(2, n):
        V[k][k] = p12
        V[0][k] = -P[k, 1]
        V[1][k] = P[k, 0]
    V = RingMatrix(ctx, V)
    return V, V.T @ P @ V


def block_diagonalize(P) -> BlockDiagResult:
    P = _as_matrix(P)
    ctx, n = P.ctx, P.n
    V = RingMatrix.identity(ctx, n)
    lambdas = []
    current = P
    offset = 0
    while n - offset >= 2:
        sub = RingMatrix(ctx, [r[offset:] for r in current.rows[offset:]])
        Vk, _ = eliminate_pair(sub)
        size = n - offset
        W = [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)]
        for i in range(size):
            for j in range(size):
                W[offset + i][offset + j] = Vk[i, j]
        V = V @ RingMatrix(ctx, W)
        current = V.T @ P @ V
        lambdas.append(current[offset, offset + 1])
        offset += 2
    return BlockDiagResult(V, lambdas, n % 2 == 1)


def _det(rows: list, cache: dict, ridx: tuple, cidx: tuple, zero, one):
    """Laplace expansion along the first remaining row, memoized on index sets."""
    if not ridx:
        return one
    key = (ridx, cidx)
    hit = cache.get(key)
    if hit is not None:
        return hit
    r0, rest = ridx[0], ridx[1:]
    acc = zero
    for pos, c in enumerate(cidx):
        a = rows[r0][c]
        if not a:
            continue
        minor = _det(rows, cache, rest, cidx[:pos] + cidx[pos + 1:], zero, one)
        if not minor:
            continue
        term = a * minor
        acc = acc - term if pos % 2 else acc + term
    cache[key] = acc
    return acc


def adjugate(M: RingMatrix, max_dim: int = MAX_COFACTOR_DIM) -> tuple[RingMatrix, Elem]:
    """Adjugate and determinant by cofactor expansion."""
    ctx, n = M.ctx, M.n
    if any(len(r) != n for r in M.rows):
        raise SemanticError("adjugate needs a square matrix")
    if n > max_dim:
        raise ResourceLimitError(f"cofactor expansion limited to dimension {max_dim}, got {n}")
    rows = M.rows
    cache: dict = {}
    full = tuple(range(n))
    det = _det(rows, cache, full, full, ctx.zero, ctx.one)
    adj = [[ctx.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            # adj[i][j] = (-1)^(i+j) * minor with row j and column i removed
            ridx = full[:j] + full[j + 1:]
            cidx = full[:i] + full[i + 1:]
            minor = _det(rows, cache, ridx, cidx, ctx.zero, ctx.one)
            adj[i][j] = -minor if (i + j) % 2 else minor
    return RingMatrix(ctx, adj), det


def build_metric(P) -> MetricConstruction:
    """Metric ``g = V g0 V^T`` with ``lam = prod(lambda_k)`` and ``eta = 1/lam^2``.

    Raises :class:`VerificationError` when some ``lambda_k`` or ``det(V)`` is
    zero, or when ``det(V)^2 (P g P g P + lam^2 P)`` fails to vanish.
    """
    P = _as_matrix(P)
    ctx, n = P.ctx, P.n
    res = block_diagonalize(P)
    lambdas = res.lambdas
    for k, lk in enumerate(lambdas):
        if lk.is_zero():
            raise VerificationError(f"lambda_{k + 1} is zero: the bracket matrix is degenerate")
    lam = ctx.one
    for lk in lambdas:
        lam = lam * lk
    diag = []
    for k in range(len(lambdas)):
        gk = ctx.one
        for l, ll in enumerate(lambdas):
            if l != k:
                gk = gk * ll
        diag += [gk, gk]
    if res.residual_zero_block:
        diag.append(lam)
    g0 = RingMatrix.diagonal(ctx, diag)
    V = res.V
    g = V @ g0 @ V.T
    _, det_v = adjugate(V)
    if det_v.is_zero():
        raise VerificationError("det(V) is zero: the localization does not exist")
    PgPgP = P @ g @ P @ g @ P
    residual = (PgPgP + P.scale(lam * lam)).scale(det_v * det_v)
    bad = residual.first_nonzero()
    if bad is not None:
        (i, j), v = bad
        raise VerificationError(
            f"det(V)^2 (PgPgP + lam^2 P) is nonzero at ({i + 1},{j + 1}): {v}")
    local = ctx.with_denominators([lam, det_v])
    lam_l = local.lift(lam)
    eta = local.unit_inverse(lam_l * lam_l)
    return MetricConstruction(
        g=RingMatrix(local, [[local.lift(v) for v in r] for r in g.rows], "symmetric"),
        lam=lam_l, eta=eta, V=V.lift(local), lambdas=[local.lift(v) for v in lambdas],
        det_v=local.lift(det_v), ctx=local, P=P.lift(local),
        block=(V.T @ P @ V).lift(local))
