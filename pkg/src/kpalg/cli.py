"""Command line front end: ``kpalg <command> --config FILE``.

Exit status: 0 success, 1 a verification failed, 2 usage error, 3 parse
error, 4 semantic error, 5 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from itertools import product

from . import __version__
from .config import Algebra, AlgebraConfig, build_algebra, load_config
from .errors import (KPError, NotAUnitError, ParseError, ResourceLimitError, SemanticError,
                     VerificationError)
from .fixtures import fixture_names, load_fixture
from .geometry import geometry
from .kp import KPCtx, kp_verify
from .poisson import check_relations_central, jacobi_check
from .poly import format_poly
from .ring import MAX_TERMS
from .skewnf import RingMatrix, block_diagonalize, build_metric

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PARSE, EXIT_SEMANTIC, EXIT_RESOURCE = range(6)

COMMANDS = {
    "jacobi": "check the Jacobi identity and that relations are Poisson-central",
    "kp-check": "check the Kahler-Poisson relation for the declared metric and eta",
    "blockdiag": "bring the bracket matrix to 2x2 block normal form",
    "construct": "construct a metric and eta from the bracket matrix",
    "christoffel": "Christoffel symbols of the Levi-Civita connection",
    "curvature": "Riemann curvature with all indices lowered",
    "ricci": "Ricci curvature on the generators",
    "scalar": "scalar curvature",
    "laplacian": "Laplacian of an element",
    "verify-all": "Poisson and KP checks followed by the connection/curvature identities",
}


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class Report:
    """Status lines plus named values; text and JSON are rendered from the same data."""

    command: str
    source: str
    checks: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def check(self, name: str, ok: bool, detail: str = ""):
        self.checks.append(Check(name, bool(ok), detail))

    def to_json(self, header: dict | None) -> str:
        doc = {}
        if header is not None:
            doc["header"] = header
        doc.update({
            "command": self.command,
            "source": self.source,
            "ok": self.ok,
            "checks": [{"name": c.name, "status": "PASS" if c.ok else "FAIL",
                        "detail": c.detail} for c in self.checks],
            "values": self.values,
        })
        return json.dumps(doc, indent=2)

    def to_text(self, header: dict | None) -> str:
        out = []
        if header is not None:
            out.append("# " + "  ".join(f"{k}={v}" for k, v in header.items()))
        for c in self.checks:
            line = f"{'PASS' if c.ok else 'FAIL'}  {c.name}"
            if c.detail:
                line += f": {c.detail}"
            out.append(line)
        for key, val in self.values.items():
            if isinstance(val, str):
                out.append(f"{key} = {val}")
            elif isinstance(val, dict):
                if not val:
                    out.append(f"{key}: all entries zero")
                for idx, v in val.items():
                    out.append(f"{key}[{idx}] = {v}")
            else:
                out.append(f"{key}:")
                for row in val:
                    out.append("  [" + ", ".join(row) + "]" if isinstance(row, list)
                               else f"  {row}")
        return "\n".join(out) + "\n"


def _matrix(M) -> list:
    return [[v.to_text() for v in row] for row in M]


def _tensor(arr, names, rank: int, keep=None) -> dict:
    """Nonzero entries keyed by comma-joined generator names."""
    out = {}
    m = len(names)
    for idx in product(range(m), repeat=rank):
        if keep is not None and not keep(idx):
            continue
        v = arr
        for k in idx:
            v = v[k]
        if not v.is_zero():
            out[",".join(names[k] for k in idx)] = v.to_text()
    return out


def _witness(names, idx) -> str:
    return "(" + ", ".join(names[i] for i in idx) + ")"


# -- commands --------------------------------------------------------------

def _poisson_checks(rep: Report, alg: Algebra):
    names = alg.cfg.generators
    jac = jacobi_check(alg.table)
    rep.check("jacobi", jac.ok, "" if jac else
              f"Jacobiator on {_witness(names, jac.witness)} = {jac.residual}")
    cen = check_relations_central(alg.table)
    rep.check("relations-central", cen.ok, "" if cen else
              f"{{{names[cen.witness[0]]}, relation {cen.witness[1] + 1}}} = {cen.residual}")


def cmd_jacobi(cfg: AlgebraConfig, limits: dict, args) -> Report:
    alg = build_algebra(cfg, **limits, kp=False)
    rep = Report("jacobi", cfg.source)
    _poisson_checks(rep, alg)
    rep.values["P"] = _matrix(alg.table.P)
    return rep


def cmd_kp_check(cfg: AlgebraConfig, limits: dict, args) -> Report:
    rep = Report("kp-check", cfg.source)
    alg = build_algebra(cfg, **limits, kp=True, verify=False)
    _poisson_checks(rep, alg)
    res = kp_verify(alg.kp)
    names = cfg.generators
    rep.check("kp-relation", res.ok, "" if res else
              f"eta*PgPgP + P at {_witness(names, res.witness)} = {res.residual}")
    rep.values["eta"] = alg.kp.eta.to_text()
    rep.values["g"] = _matrix(alg.kp.g)
    rep.values["D"] = _matrix(alg.kp.D)
    return rep


def cmd_blockdiag(cfg: AlgebraConfig, limits: dict, args) -> Report:
    alg = build_algebra(cfg, **limits, kp=False)
    res = block_diagonalize(alg.table)
    V = res.V
    P = RingMatrix(alg.ring, alg.table.P, "antisymmetric")
    B = V.T @ P @ V
    n = P.n
    bad = [(i, j) for i in range(n) for j in range(n)
           if not (i // 2 == j // 2 and i != j and j < 2 * len(res.lambdas)) and B[i, j]]
    rep = Report("blockdiag", cfg.source)
    rep.check("block-shape", not bad, "" if not bad else
              f"nonzero entry at ({bad[0][0] + 1},{bad[0][1] + 1})")
    rep.values["lambdas"] = [v.to_text() for v in res.lambdas]
    rep.values["V"] = _matrix(V)
    rep.values["VtPV"] = _matrix(B)
    return rep


def cmd_construct(cfg: AlgebraConfig, limits: dict, args) -> Report:
    alg = build_algebra(cfg, **limits, kp=False)
    rep = Report("construct", cfg.source)
    c = build_metric(alg.table)
    # build_metric raises VerificationError when this residual is nonzero
    rep.check("det(V)^2 (PgPgP + lam^2 P) = 0", True)
    kp = KPCtx(alg.table.lift(c.ctx), c.g, c.eta, verify=False)
    res = kp_verify(kp)
    rep.check("kp-relation", res.ok, "" if res else
              f"at {_witness(cfg.generators, res.witness)}: {res.residual}")
    rep.values["lambdas"] = [v.to_text() for v in c.lambdas]
    rep.values["lambda"] = c.lam.to_text()
    rep.values["det(V)"] = c.det_v.to_text()
    rep.values["denominators"] = [format_poly(d) for d in c.ctx.denoms]
    rep.values["V"] = _matrix(c.V)
    rep.values["g"] = _matrix(c.g)
    rep.values["eta"] = c.eta.to_text()
    return rep


def _geometry_algebra(cfg, limits: dict) -> Algebra:
    return build_algebra(cfg, **limits, kp=True, verify=True)


def cmd_christoffel(cfg, limits, args) -> Report:
    alg = _geometry_algebra(cfg, limits)
    rep = Report("christoffel", cfg.source)
    rep.values["Gamma"] = _tensor(geometry(alg.kp).gamma, cfg.generators, 3)
    return rep


def cmd_curvature(cfg, limits, args) -> Report:
    alg = _geometry_algebra(cfg, limits)
    rep = Report("curvature", cfg.source)
    Rlow = geometry(alg.kp).Rlow
    rep.values["R"] = _tensor(Rlow, cfg.generators, 4,
                              keep=lambda t: t[0] < t[1] and t[2] < t[3])
    return rep


def cmd_ricci(cfg, limits, args) -> Report:
    alg = _geometry_algebra(cfg, limits)
    rep = Report("ricci", cfg.source)
    rep.values["Ric"] = _matrix(geometry(alg.kp).ricci_matrix)
    return rep


def cmd_scalar(cfg, limits, args) -> Report:
    alg = _geometry_algebra(cfg, limits)
    kp = alg.kp
    rep = Report("scalar", cfg.source)
    S = geometry(kp).scalar
    rep.values["S"] = S.to_text()
    try:
        inv = kp.ring.unit_inverse(kp.eta)
    except NotAUnitError:
        inv = None
    if inv is not None:
        rep.values["S / eta^2"] = (S * inv * inv).to_text()
    return rep


def cmd_laplacian(cfg, limits, args) -> Report:
    alg = _geometry_algebra(cfg, limits)
    f = alg.kp.ring.parse(args.expr)
    rep = Report("laplacian", cfg.source)
    rep.values["f"] = f.to_text()
    rep.values["Delta(f)"] = geometry(alg.kp).laplacian(f).to_text()
    return rep


def cmd_verify_all(cfg, limits, args) -> Report:
    rep = Report("verify-all", cfg.source)
    alg = build_algebra(cfg, **limits, kp=True, verify=False)
    _poisson_checks(rep, alg)
    res = kp_verify(alg.kp)
    rep.check("kp-relation", res.ok, "" if res else
              f"at {_witness(cfg.generators, res.witness)}: {res.residual}")
    jacobi_ok = rep.checks[0].ok or "skip-jacobi" in cfg.flags
    if not (jacobi_ok and rep.checks[1].ok and res.ok):
        return rep
    report = geometry(alg.kp).verify()
    for r in report.results:
        detail = f"{r.checked} tuples"
        if not r.ok:
            detail += (f", {r.failures} failing, e.g. {_witness(cfg.generators, r.witness)}: "
                       f"residual {r.worst}")
        rep.check(r.name, r.ok, detail)
    rep.values["S"] = geometry(alg.kp).scalar.to_text()
    return rep


HANDLERS = {
    "jacobi": cmd_jacobi, "kp-check": cmd_kp_check, "blockdiag": cmd_blockdiag,
    "construct": cmd_construct, "christoffel": cmd_christoffel, "curvature": cmd_curvature,
    "ricci": cmd_ricci, "scalar": cmd_scalar, "laplacian": cmd_laplacian,
    "verify-all": cmd_verify_all,
}


# -- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", metavar="FILE", help="algebra config (line format or JSON)")
    src.add_argument("--fixture", metavar="NAME", help="use a shipped fixture")
    common.add_argument("--json", action="store_true", help="emit a JSON document")
    common.add_argument("--no-header", action="store_true", help="omit the timestamp header")
    common.add_argument("--budget", type=int, default=5000, metavar="N",
                        help="Groebner basis pair budget (default 5000)")
    common.add_argument("--max-terms", type=int, default=MAX_TERMS, metavar="N",
                        help=f"largest numerator allowed, in terms (default {MAX_TERMS})")
    parser = argparse.ArgumentParser(
        prog="kpalg", description="Exact computations for Kahler-Poisson algebras.",
        epilog="exit status: 0 ok, 1 check failed, 2 usage, 3 parse, 4 semantic, 5 resource limit")
    parser.add_argument("--version", action="version", version=f"kpalg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, help_text in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "laplacian":
            p.add_argument("expr", help="element to apply the Laplacian to")
    sub.add_parser("fixtures", help="list shipped fixtures")
    return parser


def _header(command: str, source: str) -> dict:
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return {"program": f"kpalg {__version__}", "command": command, "source": source,
            "generated": stamp}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.command == "fixtures":
        print("\n".join(fixture_names()))
        return EXIT_OK
    if args.budget < 1 or args.max_terms < 1:
        print("error: --budget and --max-terms must be positive", file=sys.stderr)
        return EXIT_USAGE
    limits = {"max_pairs": args.budget, "max_terms": args.max_terms}
    try:
        cfg = load_config(args.config) if args.config else load_fixture(args.fixture)
        report = HANDLERS[args.command](cfg, limits, args)
    except ParseError as exc:
        return _fail(f"parse error: {exc}", EXIT_PARSE)
    except SemanticError as exc:
        return _fail(f"semantic error: {exc}", EXIT_SEMANTIC)
    except VerificationError as exc:
        return _fail(f"FAIL: {exc}", EXIT_FAIL)
    except ResourceLimitError as exc:
        return _fail(f"resource limit: {exc}", EXIT_RESOURCE)
    except KPError as exc:
        return _fail(f"error: {exc}", EXIT_SEMANTIC)
    header = None if args.no_header else _header(args.command, cfg.source)
    text = report.to_json(header) if args.json else report.to_text(header)
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return EXIT_OK if report.ok else EXIT_FAIL


def _fail(msg: str, code: int) -> int:
    print(msg, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
