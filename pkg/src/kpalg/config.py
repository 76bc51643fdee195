"""Algebra configuration files and the pipeline that turns them into contexts.

Line format (one item per line, ``#`` starts a comment)::

    generators: x, y, z
    order: grevlex
    relation: x^2 + y^2 + z^2 - 1
    denominator: x^2 + y^2 + z^2
    levelset C = 1/2*(x^2 + y^2 + z^2 - 1)
    bracket: x y : z
    metric: euclidean            # or: construct, or entries "i j : elem"
    eta: 1/(x^2 + y^2 + z^2)     # or: construct
    flags: skip-jacobi

``relation``/``denominator``/``bracket``/``metric`` entries may repeat, and
``relations``/``denominators`` accept ``;``-separated lists.  Bracket and
metric indices are generator names or 1-based positions; only the upper
triangle is given.  A JSON object with the same keys is accepted too.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import KPError, ParseError, SemanticError, UnknownGeneratorError, VerificationError
from .kp import KPCtx
from .poisson import BracketTable, jacobi_check, level_set_table
from .poly import MonomialOrder, parse_expression
from .ring import MAX_TERMS, RingCtx
from .skewnf import MetricConstruction, build_metric

__all__ = ["AlgebraConfig", "Algebra", "load_config", "parse_config", "parse_config_json",
           "build_ring", "build_table", "build_algebra", "KNOWN_FLAGS"]

KNOWN_FLAGS = frozenset({"skip-jacobi"})
_KEYS = {"generators", "order", "relation", "relations", "denominator", "denominators",
         "bracket", "brackets", "metric", "eta", "flags", "levelset"}
_LEVELSET = re.compile(r"levelset\s+([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.*)$")


@dataclass
class Item:
    """A polynomial-valued string remembered with its source position."""

    text: str
    line: int | None = None
    col: int = 0


@dataclass
class Entry:
    i: int
    j: int
    value: Item


@dataclass
class AlgebraConfig:
    generators: tuple = ()
    order: str = "grevlex"
    relations: list = field(default_factory=list)
    denominators: list = field(default_factory=list)
    levelset: Item | None = None
    brackets: list = field(default_factory=list)
    metric: str | list = "euclidean"
    eta: Item | str | None = None
    flags: set = field(default_factory=set)
    source: str = "<string>"

    @property
    def constructs_metric(self) -> bool:
        return self.metric == "construct"


def _strip_comment(line: str) -> str:
    k = line.find("#")
    return line if k < 0 else line[:k]


def _split_list(value: str, col: int, lineno: int, sep: str) -> list[Item]:
    out = []
    offset = 0
    for part in value.split(sep):
        lead = len(part) - len(part.lstrip())
        if part.strip():
            out.append(Item(part.strip(), lineno, col + offset + lead))
        offset += len(part) + 1
    return out


def _index(token: str, gens: tuple, lineno: int | None, col: int) -> int:
    if token.isdigit():
        k = int(token)
        if not 1 <= k <= len(gens):
            raise SemanticError(f"line {lineno}, column {col + 1}: index {k} out of range "
                                f"1..{len(gens)}")
        return k - 1
    if token in gens:
        return gens.index(token)
    raise SemanticError(f"line {lineno}, column {col + 1}: unknown generator {token!r}")


def _entry(raw: str, lineno: int | None, col: int, gens: tuple) -> Entry:
    if ":" not in raw:
        raise ParseError("expected 'i j : value'", raw, 0, lineno)
    head, value = raw.split(":", 1)
    idx = head.split()
    if len(idx) != 2:
        raise ParseError("expected two indices before ':'", raw, 0, lineno)
    pos_i = col + head.index(idx[0])
    pos_j = col + head.index(idx[1], head.index(idx[0]) + len(idx[0]))
    i = _index(idx[0], gens, lineno, pos_i)
    j = _index(idx[1], gens, lineno, pos_j)
    vcol = col + len(head) + 1 + (len(value) - len(value.lstrip()))
    if not value.strip():
        raise ParseError("missing value after ':'", raw, len(head) + 1, lineno)
    return Entry(i, j, Item(value.strip(), lineno, vcol))


def parse_config(text: str, source: str = "<string>") -> AlgebraConfig:
    """Parse the line format.  Polynomials are syntax-checked before returning."""
    cfg = AlgebraConfig(source=source)
    pending: list = []  # (key, value, lineno, col) needing the generator list
    seen_single: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        m = _LEVELSET.match(body)
        if m:
            if cfg.levelset is not None:
                raise ParseError("levelset given twice", raw, indent, lineno)
            cfg.levelset = Item(m.group(2).strip(), lineno, indent + m.start(2))
            continue
        if ":" not in body:
            raise ParseError("expected 'key: value'", raw, indent, lineno)
        key, value = body.split(":", 1)
        key = key.strip()
        col = indent + len(body.split(":", 1)[0]) + 1
        col += len(value) - len(value.lstrip())
        value = value.strip()
        if key not in _KEYS or key == "levelset":
            raise ParseError(f"unknown key {key!r}", raw, indent, lineno)
        if key in ("generators", "order", "eta", "flags"):
            if key in seen_single:
                raise ParseError(f"{key!r} given twice (first on line {seen_single[key]})",
                                 raw, indent, lineno)
            seen_single[key] = lineno
        if not value:
            raise ParseError(f"missing value for {key!r}", raw, col, lineno)
        if key == "generators":
            names = [n.strip() for n in value.split(",")]
            for n in names:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", n):
                    raise ParseError(f"bad generator name {n!r}", raw, col, lineno)
            cfg.generators = tuple(names)
        elif key == "order":
            cfg.order = value
        elif key == "flags":
            cfg.flags = {f for f in re.split(r"[,\s]+", value) if f}
        else:
            pending.append((key, value, lineno, col, raw))
    metric_kw, metric_entries = None, []
    for key, value, lineno, col, raw in pending:
        if key in ("relation", "relations"):
            cfg.relations += _split_list(value, col, lineno, ";")
        elif key in ("denominator", "denominators"):
            cfg.denominators += _split_list(value, col, lineno, ";")
        elif key in ("bracket", "brackets"):
            for it in _split_list(value, col, lineno, ";"):
                cfg.brackets.append(_entry(it.text, lineno, it.col, cfg.generators))
        elif key == "metric":
            if value in ("euclidean", "construct"):
                if metric_kw is not None:
                    raise ParseError("metric keyword given twice", raw, col, lineno)
                metric_kw = value
            else:
                for it in _split_list(value, col, lineno, ";"):
                    metric_entries.append(_entry(it.text, lineno, it.col, cfg.generators))
            if metric_kw is not None and metric_entries:
                raise ParseError("metric keyword mixed with metric entries", raw, col, lineno)
        elif key == "eta":
            cfg.eta = "construct" if value == "construct" else Item(value, lineno, col)
    if metric_entries:
        cfg.metric = metric_entries
    elif metric_kw is not None:
        cfg.metric = metric_kw
    validate(cfg)
    return cfg


def parse_config_json(text: str, source: str = "<json>") -> AlgebraConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, text, exc.colno - 1, exc.lineno) from None
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object")
    unknown = set(data) - (_KEYS - {"relation", "denominator", "bracket"})
    if unknown:
        raise ParseError(f"unknown key(s) {sorted(unknown)}")
    cfg = AlgebraConfig(source=source)

    def strings(key):
        v = data.get(key, [])
        if isinstance(v, str):
            v = [v]
        if not isinstance(v, list) or not all(isinstance(s, str) for s in v):
            raise ParseError(f"{key!r} must be a list of strings")
        return v

    cfg.generators = tuple(strings("generators"))
    cfg.order = data.get("order", "grevlex")
    cfg.relations = [Item(s) for s in strings("relations")]
    cfg.denominators = [Item(s) for s in strings("denominators")]
    if "levelset" in data:
        cfg.levelset = Item(str(data["levelset"]))

    def entries(v, key):
        if isinstance(v, dict):
            v = [k.split() + [val] for k, val in v.items()]
        out = []
        for e in v:
            if not (isinstance(e, list) and len(e) == 3):
                raise ParseError(f"{key!r} entries must be [i, j, value]")
            i, j, val = (str(x) for x in e)
            out.append(Entry(_index(i, cfg.generators, None, 0),
                             _index(j, cfg.generators, None, 0), Item(val)))
        return out

    cfg.brackets = entries(data.get("brackets", []), "brackets")
    metric = data.get("metric", "euclidean")
    cfg.metric = metric if isinstance(metric, str) else entries(metric, "metric")
    if isinstance(cfg.metric, str) and cfg.metric not in ("euclidean", "construct"):
        raise ParseError(f"metric must be 'euclidean', 'construct' or a list of entries")
    eta = data.get("eta")
    cfg.eta = eta if eta in (None, "construct") else Item(str(eta))
    cfg.flags = set(strings("flags"))
    validate(cfg)
    return cfg


def _check_item(item: Item, gens: tuple):
    try:
        parse_expression(item.text, gens)
    except UnknownGeneratorError as exc:
        where = f"line {item.line}, " if item.line is not None else ""
        col = item.col + (exc.pos or 0)
        raise SemanticError(f"{where}column {col + 1}: unknown generator {exc.name!r} "
                            f"in {item.text!r}") from None
    except ParseError as exc:
        msg = str(exc).split(": ", 1)[-1]
        raise ParseError(msg, item.text, item.col + (exc.pos or 0), item.line) from None


def validate(cfg: AlgebraConfig):
    if not cfg.generators:
        raise SemanticError("no generators declared")
    if len(set(cfg.generators)) != len(cfg.generators):
        raise SemanticError(f"generator names are not distinct: {cfg.generators}")
    MonomialOrder.from_name(cfg.order)
    bad = cfg.flags - KNOWN_FLAGS
    if bad:
        raise SemanticError(f"unknown flag(s) {sorted(bad)}; known: {sorted(KNOWN_FLAGS)}")
    gens = cfg.generators
    items = list(cfg.relations) + list(cfg.denominators)
    if cfg.levelset is not None:
        if len(gens) != 3:
            raise SemanticError("levelset needs exactly 3 generators")
        if cfg.brackets:
            raise SemanticError("levelset and explicit brackets are exclusive")
        items.append(cfg.levelset)
    seen = set()
    for e in cfg.brackets:
        if e.i == e.j:
            raise SemanticError(f"line {e.value.line}: bracket of a generator with itself")
        key = (min(e.i, e.j), max(e.i, e.j))
        if key in seen:
            raise SemanticError(f"line {e.value.line}: bracket {key} given twice")
        seen.add(key)
        items.append(e.value)
    if isinstance(cfg.metric, list):
        seen = set()
        for e in cfg.metric:
            key = (min(e.i, e.j), max(e.i, e.j))
            if key in seen:
                raise SemanticError(f"line {e.value.line}: metric entry {key} given twice")
            seen.add(key)
            items.append(e.value)
    if isinstance(cfg.eta, Item):
        items.append(cfg.eta)
    for it in items:
        _check_item(it, gens)
    if cfg.constructs_metric:
        if isinstance(cfg.eta, Item):
            raise SemanticError("metric: construct also determines eta; drop the eta line "
                                "or write 'eta: construct'")
    else:
        if cfg.eta == "construct":
            raise SemanticError("eta: construct requires metric: construct")


def load_config(path) -> AlgebraConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SemanticError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        return parse_config_json(text, str(path))
    return parse_config(text, str(path))


# -- pipeline --------------------------------------------------------------

def build_ring(cfg: AlgebraConfig, max_pairs: int = 5000, max_terms: int = MAX_TERMS) -> RingCtx:
    rels = [r.text for r in cfg.relations]
    if cfg.levelset is not None:
        rels.append(cfg.levelset.text)
    return RingCtx(cfg.generators, rels, [d.text for d in cfg.denominators],
                   MonomialOrder.from_name(cfg.order), max_pairs, max_terms)


def _elem(ring: RingCtx, item: Item):
    try:
        return ring.parse(item.text)
    except KPError as exc:
        where = f"line {item.line}: " if item.line is not None else ""
        raise type(exc)(f"{where}{exc}") if isinstance(exc, SemanticError) else exc


def build_table(cfg: AlgebraConfig, ring: RingCtx) -> BracketTable:
    if cfg.levelset is not None:
        return level_set_table(cfg.levelset.text, ring)
    entries = {(e.i, e.j): _elem(ring, e.value) for e in cfg.brackets}
    return BracketTable.from_upper(ring, entries)


@dataclass
class Algebra:
    """Everything the commands need: ring, bracket table and (optionally) the KP context."""

    cfg: AlgebraConfig
    ring: RingCtx
    table: BracketTable
    kp: KPCtx | None = None
    construction: MetricConstruction | None = None


def build_algebra(cfg: AlgebraConfig, max_pairs: int = 5000, *, kp: bool = True,
                  verify: bool = True, max_terms: int = MAX_TERMS) -> Algebra:
    """Build ring and table, then the KP context (certifying Jacobi unless flagged off)."""
    ring = build_ring(cfg, max_pairs, max_terms)
    table = build_table(cfg, ring)
    alg = Algebra(cfg, ring, table)
    if not kp:
        return alg
    if verify and "skip-jacobi" not in cfg.flags:
        jac = jacobi_check(table)
        if not jac:
            i, j, k = (cfg.generators[t] for t in jac.witness)
            raise VerificationError(f"Jacobi identity fails on ({i}, {j}, {k}): "
                                    f"residual {jac.residual}")
    m = ring.ngens
    if cfg.constructs_metric:
        c = build_metric(table)
        alg.construction = c
        alg.ring = c.ctx
        alg.table = table.lift(c.ctx)
        alg.kp = KPCtx(alg.table, c.g, c.eta, verify=verify)
        return alg
    if cfg.metric == "euclidean":
        g = [[ring.one if i == j else ring.zero for j in range(m)] for i in range(m)]
    else:
        g = [[ring.zero] * m for _ in range(m)]
        for e in cfg.metric:
            v = _elem(ring, e.value)
            g[e.i][e.j] = g[e.j][e.i] = v
    if cfg.eta is None:
        raise SemanticError("eta is required unless metric: construct")
    alg.kp = KPCtx(table, g, _elem(ring, cfg.eta), verify=verify)
    return alg
