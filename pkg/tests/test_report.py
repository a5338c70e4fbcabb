import json
import os
from fractions import Fraction
from pathlib import Path

from hypothesis import given, strategies as st

from hilali import report
from hilali.catalog import fibration_catalog, lookup
from hilali.elliptic import invariants
from hilali.fibration import analyze_fibration

GOLDEN = Path(__file__).parent / "golden" / "reports.json"
MODEL_KEYS = ["sphere:3", "sphere:4", "cpn:3", "hpn:2", "star:2,3,5", "w6", "sphere:3*sphere:5"]
FIB_KEYS = ["hopf:s3-s7-s4", "twistor:s2-cp3-s4", "bundle:s3-cp2", "product:s3-s4"]


def current_reports():
    out = {}
    for key in MODEL_KEYS:
        m = lookup(key).model
        out[key] = report.encode(report.invariants_document(invariants(m), m))
    for key in FIB_KEYS:
        cf = fibration_catalog()[key]
        out[key] = report.encode(report.fibration_document(analyze_fibration(cf.fibration, cf.fiber_dec, cf.base_dec)))
    return out


def test_reports_match_golden():
    now = current_reports()
    if os.environ.get("HILALI_REGEN_GOLDEN"):
        GOLDEN.write_text(json.dumps(now, indent=1, sort_keys=True) + "\n")
    assert now == json.loads(GOLDEN.read_text())


@given(st.fractions())
def test_fraction_round_trip(x):
    assert report.loads(report.dumps({"v": x}))["v"] == x


def test_fraction_encoding_is_strings():
    doc = json.loads(report.dumps({"h": Fraction(-10**30, 3)}))
    assert doc["h"] == {"num": str(-10**30), "den": "3"}


def test_status_labels():
    cf = fibration_catalog()["hopf:s3-s7-s4"]
    doc = report.fibration_document(analyze_fibration(cf.fibration, cf.fiber_dec, cf.base_dec))
    status = {c["name"]: c["status"] for c in doc["checks"]}
    assert status["base_doubling_diagnostic"] == "diagnostic violated"
    assert status["pi_doubling"] == "fails (not asserted)"
    assert status["homotopy_counts.summed"] == "pass"
    assert doc["passed"] is True


def test_text_rendering():
    m = lookup("cpn:2").model
    text = report.invariants_text(report.invariants_document(invariants(m), m))
    assert "h" in text and "2/3" in text
