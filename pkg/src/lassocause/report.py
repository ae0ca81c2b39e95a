"""Text and JSON rendering of check / explain / verify results."""

from __future__ import annotations

import json

from .causality import Explanation
from .eol import to_json
from .model import Lasso

_LASSO_STEPS = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["state", "action"],
        "properties": {"state": {"type": "string"}, "action": {"type": "string"}},
        "additionalProperties": False,
    },
}

_AC_REPORT = {
    "type": "object",
    "required": ["ac1", "ac21", "ac22", "ac3", "oc"],
    "properties": {k: {"type": "boolean"} for k in ("ac1", "ac21", "ac22", "ac3", "oc")},
}

EXPLAIN_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["property", "verdict", "classes", "stats"],
    "properties": {
        "property": {"type": "string"},
        "verdict": {"enum": ["holds", "violated"]},
        "classes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["cause", "causeAst", "oc", "members", "acReport"],
                "properties": {
                    "cause": {"type": "string"},
                    "causeAst": {"type": "object", "required": ["op"]},
                    "oc": {"type": "boolean"},
                    "ordered": {"type": ["string", "null"]},
                    "nonOccurrence": {"type": "array", "items": {"type": "string"}},
                    "overlapping": {"type": "boolean"},
                    "members": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["stem", "loop"],
                            "properties": {"stem": _LASSO_STEPS, "loop": _LASSO_STEPS},
                        },
                    },
                    "acReport": _AC_REPORT,
                },
            },
        },
        "stats": {
            "type": "object",
            "required": ["lassos", "bad", "good", "refinements", "generalizations"],
            "properties": {k: {"type": "integer", "minimum": 0}
                           for k in ("lassos", "bad", "good", "refinements", "generalizations")},
        },
        "semantics": {"type": "object"},
        "unseparable": {"type": "array", "items": {"type": "string"}},
    },
}


def lasso_json(lasso: Lasso) -> dict:
    return {
        "stem": [{"state": s, "action": a} for s, a in lasso.stem],
        "loop": [{"state": s, "action": a} for s, a in lasso.loop],
    }


def explain_json(ex: Explanation, prop: str, unfold: int | None = None) -> dict:
    u = ex.universe
    classes = []
    for c in ex.classes:
        classes.append({
            "cause": str(c.cause),
            "causeAst": to_json(c.cause),
            "oc": c.report.oc,
            "ordered": None if c.ordered is None else str(c.ordered),
            "nonOccurrence": sorted(c.non_occurrence),
            "overlapping": c.overlapping,
            "members": [lasso_json(u.lassos[i]) for i in c.members],
            "acReport": c.report.as_dict(u),
        })
    return {
        "property": prop,
        "verdict": "holds" if ex.holds else "violated",
        "classes": classes,
        "stats": dict(ex.stats),
        "semantics": {
            "universe": "elementary lassos",
            "unfoldBudget": "default" if unfold is None else unfold,
            "negatedFormulaeBudgetRelative": True,
        },
        "unseparable": [str(u.lassos[i]) for i in ex.unseparable],
    }


def explain_text(ex: Explanation, prop: str, samples: int = 3) -> str:
    u = ex.universe
    lines = [f"property: {prop}"]
    if ex.holds:
        lines.append(f"verdict: holds on all {len(u.lassos)} lassos")
        return "\n".join(lines) + "\n"
    lines.append(f"verdict: violated ({len(u.bad_indices)} of {len(u.lassos)} lassos are bad)")
    for n, c in enumerate(ex.classes, 1):
        lines.append("")
        lines.append(f"class {n}: {c.cause}")
        lines.append(f"  OC: {str(c.report.oc).lower()}")
        if c.ordered is not None:
            lines.append(f"  ordered form: {c.ordered}")
        if c.overlapping:
            lines.append("  note: same members as another class")
        lines.append(f"  members: {len(c.members)}")
        for i in c.members[:samples]:
            lines.append(f"    {u.lassos[i]}")
        if len(c.members) > samples:
            lines.append(f"    ... {len(c.members) - samples} more")
    if ex.unseparable:
        lines.append("")
        lines.append("no EOL cause separates these bad lassos from good ones:")
        lines += [f"    {u.lassos[i]}" for i in ex.unseparable]
    s = ex.stats
    lines.append("")
    lines.append(f"stats: {s['lassos']} lassos, {s['bad']} bad, {s['good']} good, "
                 f"{s['refinements']} refinements, {s['generalizations']} generalizations")
    return "\n".join(lines) + "\n"


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
