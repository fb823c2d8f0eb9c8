"""Command-line surface: enumerate, act, audit, calibrate, character.

Exit codes: 0 success, 1 audit findings, 2 usage or input errors, 3 internal
inconsistency.  Results go to stdout (or ``--out``), logs and diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Sequence

from fockspace import __version__
from fockspace.affinec import suite_affine
from fockspace.audit import TEMPLATES, OperatorResolver, calibrate, evaluate_word, run_suite
from fockspace.config import CliConfig, required_window, resolve_config
from fockspace.diagram import color_character, diagram_parse, enumerate_diagrams
from fockspace.errors import FockspaceError, SelfCheckError
from fockspace.fock import FockVector
from fockspace.glinf import suite_brackets, suite_glinf
from fockspace.words import relation_parse

logger = logging.getLogger(__name__)

SUITES = ("glinf", "affine", "brackets")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value file overriding the defaults")
    p.add_argument("--out", type=Path, help="Write the result here instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true", help="Enable verbose logging")


def _add_basis(p: argparse.ArgumentParser, *, many: bool = False) -> None:
    p.add_argument("--charge", type=int, help="Charge n of the Fock space (default 0)")
    if many:
        p.add_argument("--charges", help="Comma list of charges, e.g. --charges=0,3")
    p.add_argument("--max-boxes", type=int, help="Largest box count in the basis (default 5)")


def _add_algebra(p: argparse.ArgumentParser) -> None:
    p.add_argument("--l", type=int, help="Rank of the folded algebra (default 2)")
    p.add_argument("--preset", choices=("paper", "dual", "std"), help="Dressing preset (default paper)")
    p.add_argument("--ri-mode", choices=("full", "half"), help="r_i = r^nu_i (full) or r^(nu_i/2) (half)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockspace",
        description="Exact two-parameter Fock space computations and relation audits",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="List the basis diagrams")
    _add_basis(p)
    p.add_argument("--count-only", action="store_true", help="Print only the number of diagrams")
    p.add_argument("--details", action="store_true", help="Add box count, corners and occupations")
    p.add_argument("--format", choices=("text", "json"), default="text")
    _add_common(p)

    p = sub.add_parser("act", help="Apply an operator expression to a diagram")
    p.add_argument("--expr", required=True, help='Expression such as "f[1]*f[0]" or "Efold[1]"')
    p.add_argument("--diagram", required=True, help='Diagram text, e.g. "0;-1,-1"')
    _add_algebra(p)
    _add_common(p)

    p = sub.add_parser("audit", help="Check a relation suite on the truncated basis")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--suite", choices=SUITES)
    target.add_argument("--relation", help="Ad hoc relation in the relation syntax")
    _add_basis(p, many=True)
    p.add_argument("--window", help="Index window lo,hi, e.g. --window=-8,8")
    _add_algebra(p)
    p.add_argument("--workers", type=int, help="Worker processes (default 1)")
    p.add_argument("--no-meta", action="store_true", default=None, help="Omit version and timing")
    _add_common(p)

    p = sub.add_parser("calibrate", help="Search convention tables satisfying a template")
    p.add_argument("--template", choices=tuple(TEMPLATES), default="root-commutator")
    p.add_argument("--grid", help="Comma list of half-integer exponents, e.g. --grid=-1,0,1")
    p.add_argument("--budget", type=int, help="Refuse searches with more candidates (default 500000)")
    _add_basis(p, many=True)
    p.add_argument("--window", help="Index window lo,hi")
    p.add_argument("--no-meta", action="store_true", default=None, help="Omit version and timing")
    _add_common(p)

    p = sub.add_parser("character", help="Color-vector multiplicities of the basis")
    _add_basis(p)
    p.add_argument("--l", type=int, help="Rank of the folded algebra (default 2)")
    _add_common(p)
    return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.write_text(text, encoding="utf-8")
    logger.info("wrote %s", out)


def _dump(data) -> str:
    return json.dumps(data, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_enumerate(args: argparse.Namespace, cfg: CliConfig) -> int:
    diagrams = enumerate_diagrams(cfg.charge, cfg.max_boxes)
    if args.count_only:
        _emit(f"{len(diagrams)}\n", args.out)
        return 0
    window = required_window((cfg.charge,), cfg.max_boxes)
    if args.format == "json":
        _emit(_dump([d.to_dict(window) for d in diagrams]), args.out)
        return 0
    lines = []
    for d in diagrams:
        if not args.details:
            lines.append(str(d))
            continue
        info = d.to_dict(window)
        lines.append("\t".join([
            info["diagram"],
            str(info["boxes"]),
            ",".join(map(str, info["concave"])),
            ",".join(map(str, info["convex"])),
            info["occupation"],
        ]))
    _emit("".join(line + "\n" for line in lines), args.out)
    return 0


def cmd_act(args: argparse.Namespace, cfg: CliConfig) -> int:
    diagram = diagram_parse(args.diagram)
    expr = relation_parse(args.expr, name="act")
    resolver = OperatorResolver(cfg.audit_config(folded=True).algebra())
    total = FockVector.zero(diagram.charge)
    for coeff, word in expr.terms:
        total = total + evaluate_word(word, diagram, resolver).scale(coeff)
    _emit(f"{total}\n", args.out)
    return 0


def cmd_audit(args: argparse.Namespace, cfg: CliConfig) -> int:
    if args.relation is not None:
        audit_cfg = cfg.audit_config(folded=True)
        suite = [relation_parse(args.relation)]
        name, with_central = "relation", False
    elif args.suite == "affine":
        audit_cfg = cfg.audit_config(folded=True)
        suite = suite_affine(audit_cfg.algebra(), audit_cfg.index_window)
        name, with_central = "affine", True
    else:
        audit_cfg = cfg.audit_config(folded=False)
        build = suite_glinf if args.suite == "glinf" else suite_brackets
        suite = build(audit_cfg.index_window)
        name, with_central = args.suite, False
    report = run_suite(suite, audit_cfg, name=name, with_central=with_central)
    _emit(report.to_json(include_meta=not cfg.no_meta), args.out)
    return report.exit_code


def cmd_calibrate(args: argparse.Namespace, cfg: CliConfig) -> int:
    start = time.perf_counter()
    audit_cfg = cfg.audit_config(folded=False)
    templates = TEMPLATES[args.template](audit_cfg.index_window)
    survivors = calibrate(templates, cfg.grid, audit_cfg, budget=cfg.budget)
    slots = sorted(survivors[0]) if survivors else ["$0", "$1"]
    data = {
        "template": args.template,
        "config": audit_cfg.echo(),
        "grid": [str(exponent) for exponent in cfg.grid],
        "slots": slots,
        "candidates": (len(cfg.grid) ** 4) ** len(slots),
        "survivors": [{slot: table.to_dict() for slot, table in found.items()} for found in survivors],
    }
    if not cfg.no_meta:
        data["meta"] = {"version": __version__, "seconds": round(time.perf_counter() - start, 3)}
    _emit(_dump(data), args.out)
    return 0


def cmd_character(args: argparse.Namespace, cfg: CliConfig) -> int:
    table = color_character(cfg.charge, cfg.max_boxes, cfg.l)
    expected = len(enumerate_diagrams(cfg.charge, cfg.max_boxes))
    if sum(table.values()) != expected:
        raise SelfCheckError(f"character multiplicities sum to {sum(table.values())}, expected {expected}")
    data = {"(" + ",".join(map(str, vector)) + ")": count for vector, count in table.items()}
    _emit(_dump(data), args.out)
    return 0


COMMANDS = {
    "enumerate": cmd_enumerate,
    "act": cmd_act,
    "audit": cmd_audit,
    "calibrate": cmd_calibrate,
    "character": cmd_character,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code is None else int(exc.code)

    level = logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")

    try:
        cfg = resolve_config(vars(args), args.config)
        return COMMANDS[args.command](args, cfg)
    except SelfCheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (FockspaceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
