import json

import pandas as pd

from lr_code import make_report
from oracle_engine import oracle_engine
from report_service import REPORT_COLUMNS, reference_instances, report_service


def test_reference_instances_cover_flagship_families():
    labels = [label for label, _ in reference_instances()]
    assert len(labels) == len(set(labels))
    families = {spec.family.value for _, spec in reference_instances()}
    assert {"baseline", "tamo-barg", "cyclic", "p1xp1-refined", "ulmer"} <= families


def test_reports_frame(tamo_barg_13, cyclic_13):
    reports = [make_report(tamo_barg_13.code), make_report(cyclic_13.code, d_measured=12, oracle_mode="exact")]
    frame = report_service.reports_frame(reports, labels=["tb", "cyclic"])
    assert list(frame.columns) == ["instance"] + REPORT_COLUMNS + ["notes"]
    assert frame["verdict"].tolist() == ["OPTIMAL-by-bounds", "OPTIMAL"]
    assert report_service.summary(frame) == {"rows": 2, "OPTIMAL-by-bounds": 1, "OPTIMAL": 1}


def test_empty_reports_frame():
    assert list(report_service.reports_frame([]).columns) == REPORT_COLUMNS


def test_verification_frame(cyclic_13):
    verification = oracle_engine.certify(cyclic_13.code, cyclic_13.plan, exhaustive=True)
    frame = report_service.verification_frame(verification)
    rows = dict(zip(frame["quantity"], frame["measured"]))
    assert rows["k"] == "4"
    assert rows["d"] == "12"
    assert rows["recovery"] == "ok"
    assert rows["verdict"] == "OPTIMAL"


def test_render_formats():
    frame = pd.DataFrame([{"a": 1, "b": "δ"}])
    assert report_service.render(frame, "csv") == "a,b\n1,δ\n"
    assert json.loads(report_service.render(frame, "json")) == [{"a": 1, "b": "δ"}]
    assert report_service.render(frame).splitlines()[0].split() == ["a", "b"]


def test_optimality_table_keeps_marked_rows():
    frame = report_service.optimality_table(range(3, 4), range(2, 5))
    assert "marked" not in frame.columns
    assert (frame["d_lower"] == frame["d_upper"]).all()
    # δ=0 com b=N+1 e δ=1 com b−N=2, para b = 2, 3, 4
    assert len(frame) == 6
