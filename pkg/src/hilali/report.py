"""Structured report documents with lossless JSON encoding of exact fractions."""

from __future__ import annotations

import json
from fractions import Fraction

from .algebra import SullivanModel
from .elliptic import EllipticInvariants, class_predicates, formality_fact
from .fibration import Check, FibrationReport


def encode(obj):
    """Plain JSON-able structure; Fractions become {"num": str, "den": str}."""
    if isinstance(obj, Fraction):
        return {"num": str(obj.numerator), "den": str(obj.denominator)}
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    return obj


def decode(obj):
    if isinstance(obj, dict):
        if set(obj) == {"num", "den"} and all(isinstance(v, str) for v in obj.values()):
            return Fraction(int(obj["num"]), int(obj["den"]))
        return {k: decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [decode(v) for v in obj]
    return obj


def dumps(doc) -> str:
    return json.dumps(encode(doc), indent=2, sort_keys=False)


def loads(text: str):
    return decode(json.loads(text))


def invariants_document(inv: EllipticInvariants, model: SullivanModel | None = None) -> dict:
    doc = {
        "kind": "invariants",
        "model": model.name if model is not None else None,
        "dim_pi": inv.dim_pi,
        "dim_pi_even": inv.dim_pi_even,
        "dim_pi_odd": inv.dim_pi_odd,
        "dim_H": inv.dim_H_total,
        "h": Fraction(inv.hilali),
        "chi": inv.chi,
        "chi_pi": inv.chi_pi,
        "formal_dimension": inv.formal_dimension,
        "is_f0": inv.is_f0,
        "betti": {str(k): v for k, v in sorted(inv.betti.items())},
    }
    if inv.exponents is not None:
        doc["exponents"] = {"even": list(inv.exponents.even), "odd": list(inv.exponents.odd)}
    if model is not None:
        cp = class_predicates(model)
        formal, why = formality_fact(model)
        doc["pure"] = cp.is_pure
        doc["two_stage"] = cp.is_two_stage
        doc["formal"] = formal
        doc["formality_provenance"] = why
    return doc


def check_status(c: Check) -> str:
    if c.diagnostic:
        return "diagnostic holds" if c.holds else "diagnostic violated"
    if not c.asserted:
        return "holds (not asserted)" if c.holds else "fails (not asserted)"
    return "pass" if c.holds else "FAIL"


def check_document(c: Check) -> dict:
    return {
        "name": c.name,
        "lhs": Fraction(c.lhs),
        "relation": c.relation,
        "rhs": Fraction(c.rhs),
        "slack": c.slack,
        "holds": c.holds,
        "asserted": c.asserted,
        "diagnostic": c.diagnostic,
        "status": check_status(c),
        "note": c.note,
    }


def fibration_document(r: FibrationReport) -> dict:
    tr = r.transgression
    return {
        "kind": "fibration",
        "name": r.name,
        "F": invariants_document(r.F),
        "B": invariants_document(r.B),
        "X": invariants_document(r.X),
        "h_product": r.h_product,
        "flags": {
            "pi_trivial": r.flags.pi_trivial,
            "tnhz": r.flags.tnhz,
            "formal_F": r.flags.formal_F,
            "formal_B": r.flags.formal_B,
            "formal_X": r.flags.formal_X,
        },
        "transgression": {
            "contracted_pairs": [list(p) for p in tr.contracted_pairs],
            "c": tr.c,
            "dim_pi_X": tr.dim_pi,
            "consistent": tr.consistent,
            "pair_shape_ok": tr.shape_ok,
        },
        "checks": [check_document(c) for c in r.checks],
        "passed": r.passed,
    }


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


def invariants_text(doc: dict) -> str:
    lines = [f"model {doc.get('model')}"]
    for key in ("dim_pi", "dim_pi_even", "dim_pi_odd", "dim_H", "h", "chi", "chi_pi", "formal_dimension", "is_f0"):
        lines.append(f"  {key:18s} {_fmt(doc[key])}")
    lines.append("  betti              " + " ".join(f"{k}:{v}" for k, v in doc["betti"].items()))
    for key in ("pure", "two_stage", "formal", "formality_provenance"):
        if key in doc:
            lines.append(f"  {key:18s} {_fmt(doc[key])}")
    return "\n".join(lines)


def fibration_text(doc: dict) -> str:
    lines = [f"fibration {doc['name']}"]
    for part in ("F", "B", "X"):
        d = doc[part]
        lines.append(f"  {part}: dim_pi={d['dim_pi']} dim_H={d['dim_H']} h={_fmt(d['h'])} fd={d['formal_dimension']}")
    lines.append(f"  h(FxB) = {_fmt(doc['h_product'])}")
    lines.append("  flags: " + ", ".join(f"{k}={v}" for k, v in doc["flags"].items()))
    tr = doc["transgression"]
    lines.append(f"  contracted pairs: {tr['contracted_pairs']} (c = {tr['c']})")
    for c in doc["checks"]:
        lines.append(
            f"  {c['status']:22s} {c['name']:28s} {_fmt(c['lhs'])} {c['relation']} {_fmt(c['rhs'])}  slack {_fmt(c['slack'])}"
        )
    lines.append("  result: " + ("pass" if doc["passed"] else "FAIL"))
    return "\n".join(lines)
