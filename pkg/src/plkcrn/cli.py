"""Command-line interface: ``plkcrn analyze|equilibria|acr|report``.

Exit codes: 0 clean run, 2 input diagnostics, 3 numeric failure.
The seed is taken from ``--seed``, else ``CRN_SEED``, else the default.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dsl import DSLError, parse, to_model
from .equilibria import DEFAULT_SEED, find_equilibria
from .errors import LinearSystemInconsistent, NoConvergence
from .kinetics import t_hat
from .report import build_report, dumps, extra_anchors, flags, invariants
from .theorems import acr_verdict

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_NUMERIC = 0, 2, 3


class InputError(Exception):
    pass


def _param(text: str) -> tuple[str, Fraction | float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), Fraction(value.strip())
    except ValueError:
        try:
            return name.strip(), float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(Fraction(t)) for t in text.replace(" ", "").split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("CRN_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"CRN_SEED is not an integer: {env!r}") from None
    return DEFAULT_SEED


def _load(args):
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"{args.file}: {e.strerror}") from None
    try:
        doc = parse(text)
        net, kin = to_model(doc, dict(args.param or []))
    except DSLError as e:
        raise InputError("\n".join(d.format(args.file) for d in e.diagnostics)) from None
    except KeyError as e:
        raise InputError(f"{args.file}: {e.args[0]}") from None
    return doc, net, kin


def _anchor(args, m: int) -> np.ndarray:
    if args.anchor is None:
        return np.ones(m)
    if args.anchor.shape != (m,) or np.any(args.anchor <= 0):
        raise InputError(f"--anchor needs {m} positive entries")
    return args.anchor


def _fmt(x) -> str:
    return str(x) if not isinstance(x, float) else f"{x:.10g}"


def cmd_analyze(args, out) -> int:
    doc, net, kin = _load(args)
    print(f"network {doc.name or args.file}: {net.m} species, {net.r} reactions", file=out)
    for q in range(net.r):
        label = f"{net.labels[q]}: " if net.labels else ""
        print(f"  {label}{net.reaction_str(q)}", file=out)
    print("invariants", file=out)
    for key, val in invariants(net, kin).items():
        print(f"  {key} = {_fmt(val)}", file=out)
    print("flags", file=out)
    for key, val in flags(net, kin).items():
        print(f"  {key} = {_fmt(val)}", file=out)
    if flags(net, kin)["rdk"]:
        print("T-hat", file=out)
        for row in t_hat(net, kin):
            print("  " + " ".join(f"{str(v):>5}" for v in row), file=out)
    return EXIT_OK


def cmd_equilibria(args, out) -> int:
    _, net, kin = _load(args)
    atlas = find_equilibria(net, kin, _anchor(args, net.m), budget=args.starts, seed=_seed(args))
    anchor = ", ".join(f"{v:g}" for v in atlas.anchor)
    print(f"class of ({anchor}): {atlas.count} equilibria "
          f"({atlas.converged_starts}/{atlas.starts} starts converged, seed {atlas.seed})", file=out)
    for x, r, cb in zip(atlas.equilibria, atlas.residuals, atlas.complex_balanced):
        coords = ", ".join(f"{s}={v:.10g}" for s, v in zip(net.species, x))
        print(f"  {coords}  residual={r:.2e}  complex_balanced={cb}", file=out)
    print("note: multistart search, count is a lower bound", file=out)
    return EXIT_OK


def cmd_acr(args, out) -> int:
    _, net, kin = _load(args)
    seed = _seed(args)
    atlas = find_equilibria(net, kin, _anchor(args, net.m), budget=args.starts, seed=seed)
    others = [find_equilibria(net, kin, a, budget=max(8, args.starts // 4), seed=seed) for a in extra_anchors(net.m, seed)]
    v, rep = acr_verdict(net, kin, atlas, others)
    print(f"acr: {v.conclusion.value}", file=out)
    for h in v.hypotheses:
        print(f"  hypothesis {h.label}: {h.ok}", file=out)
    if rep is not None:
        print(f"  acr species: {', '.join(rep.acr_species) or 'none'}", file=out)
        print(f"  upper bound on acr species: {rep.bound}", file=out)
        if v.payload["screen_fired"]:
            w = ", ".join(_fmt(float(c)) for c in v.payload["screen_witness"])
            print(f"  positive vector ({w}) rules out acr in every species", file=out)
    return EXIT_OK


def cmd_report(args, out) -> int:
    doc, net, kin = _load(args)
    rep = build_report(net, kin, name=doc.name, anchor=_anchor(args, net.m), starts=args.starts, seed=_seed(args))
    text = dumps(rep)
    if args.json == "-":
        out.write(text)
    else:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.json}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plkcrn", description="Analyze power-law chemical reaction networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str, numeric: bool):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file", help=".crn network file")
        p.add_argument("--param", action="append", type=_param, metavar="NAME=VALUE", help="override a param")
        if numeric:
            p.add_argument("--anchor", type=_vector, help="positive vector fixing the stoichiometric class")
            p.add_argument("--starts", type=int, default=64, help="multistart budget (default 64)")
            p.add_argument("--seed", type=int, default=None, help="RNG seed (default: $CRN_SEED or built-in)")
        return p

    add("analyze", "structure and kinetics classification", False).set_defaults(func=cmd_analyze)
    add("equilibria", "multistart equilibria search in one class", True).set_defaults(func=cmd_equilibria)
    add("acr", "absolute concentration robustness", True).set_defaults(func=cmd_acr)
    rp = add("report", "full JSON report", True)
    rp.add_argument("--json", required=True, metavar="OUT", help="output path, or - for stdout")
    rp.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_DIAGNOSTICS if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except InputError as e:
        print(e, file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except (NoConvergence, LinearSystemInconsistent, FloatingPointError, np.linalg.LinAlgError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
