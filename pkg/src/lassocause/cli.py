"""Command-line front end.

Exit status: 0 property holds / verification passed, 1 violated / failed,
2 usage or input error, 3 lasso cap exceeded.
"""

from __future__ import annotations

import argparse
import sys

from . import oracle
from .causality import compute_causes
from .eol import BudgetTooSmall
from .ltl import LtlSyntaxError, UnresolvedAtom, check_model, parse_ltl
from .model import ModelError, complete_terminal_states, parse_model
from .report import dumps, explain_json, explain_text, lasso_json
from .search import DEFAULT_MAX_LASSOS, LassoCapExceeded

EXIT_OK, EXIT_VIOLATED, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class InputError(Exception):
    pass


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lassocause",
        description="Check an LTL property on a transition system and explain its violations.",
    )
    p.add_argument("--model", required=True, help="model file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--prop", help="LTL property text")
    src.add_argument("--prop-file", help="file holding the LTL property")
    p.add_argument("--mode", choices=("check", "explain", "verify"), default="explain")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--max-lassos", type=_positive, default=DEFAULT_MAX_LASSOS)
    p.add_argument("--max-unfold", type=_positive, default=None,
                   help="loop unfoldings for EOL checks (default: derived per formula)")
    p.add_argument("--seed", type=int, default=None,
                   help="verify mode: also cross-check the random model with this seed")
    p.add_argument("--verify", action="store_true",
                   help="explain mode: cross-check the result against the reference oracle")
    return p


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from e


def _load(args):
    text = _read(args.model)
    try:
        ts = complete_terminal_states(parse_model(text))
    except ModelError as e:
        raise InputError(f"{args.model}:{e.line}:{e.col}: {e.message}") from e
    if args.prop_file:
        where, prop = args.prop_file, _read(args.prop_file).strip()
    else:
        where, prop = "<prop>", args.prop
    try:
        phi = parse_ltl(prop)
    except LtlSyntaxError as e:
        raise InputError(f"{where}:1:{e.pos + 1}: {e.message}") from e
    return ts, prop, phi


def _check(ts, prop, phi, args, out):
    verdict = check_model(ts, phi, args.max_lassos)
    if args.format == "json":
        out.write(dumps({
            "property": prop,
            "verdict": "holds" if verdict.holds else "violated",
            "witness": None if verdict.witness is None else lasso_json(verdict.witness),
            "lassosChecked": verdict.lassos,
        }))
    else:
        out.write(f"property: {prop}\n")
        if verdict.holds:
            out.write(f"verdict: holds ({verdict.lassos} lassos)\n")
        else:
            out.write(f"verdict: violated\nwitness: {verdict.witness}\n")
    return EXIT_OK if verdict.holds else EXIT_VIOLATED


def _verify_reports(ts, phi, args, explanation=None):
    cfg = oracle.OracleConfig(max_states=10, max_lassos=args.max_lassos)
    reports = [("model", oracle.verify(ts, phi, cfg, args.max_unfold, explanation))]
    if args.seed is not None:
        rts = oracle.random_model(args.seed)
        for prop in oracle.random_properties(rts, args.seed):
            reports.append((f"seed {args.seed}: {prop}",
                            oracle.verify(rts, parse_ltl(prop), cfg, args.max_unfold)))
    return reports


def _verify_json(reports):
    return [{"target": name, "ok": r.ok, "lassos": r.lassos, "eolPairs": r.eol_pairs,
             "problems": r.problems} for name, r in reports]


def _verify_text(reports):
    lines = []
    for name, r in reports:
        status = "ok" if r.ok else "FAILED"
        lines.append(f"verify {name}: {status} ({r.lassos} lassos, {r.eol_pairs} EOL checks)")
        lines += [f"  {p}" for p in r.problems]
    return "\n".join(lines) + "\n"


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        ts, prop, phi = _load(args)
        if args.mode == "check":
            return _check(ts, prop, phi, args, out)
        if args.mode == "verify":
            reports = _verify_reports(ts, phi, args)
            out.write(dumps(_verify_json(reports)) if args.format == "json" else _verify_text(reports))
            return EXIT_OK if all(r.ok for _, r in reports) else EXIT_VIOLATED
        ex = compute_causes(ts, phi, args.max_lassos, args.max_unfold)
        reports = _verify_reports(ts, phi, args, ex) if args.verify else []
        if args.format == "json":
            doc = explain_json(ex, prop, args.max_unfold)
            if reports:
                doc["verification"] = _verify_json(reports)
            out.write(dumps(doc))
        else:
            out.write(explain_text(ex, prop))
            if reports:
                out.write(_verify_text(reports))
        if reports and not all(r.ok for _, r in reports):
            return EXIT_VIOLATED
        return EXIT_OK if ex.holds else EXIT_VIOLATED
    except InputError as e:
        err.write(f"error: {e}\n")
        return EXIT_INPUT
    except UnresolvedAtom as e:
        err.write(f"error: {e}\n")
        return EXIT_INPUT
    except BudgetTooSmall as e:
        err.write(f"error: {e}; raise --max-unfold\n")
        return EXIT_INPUT
    except (LassoCapExceeded, oracle.OracleCapExceeded) as e:
        err.write(f"error: {e}\n")
        return EXIT_CAP


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
