import csv
import io
import xml.etree.ElementTree as ET

import pytest

from dub import report
from dub.errors import ValidationError


def sweep(target, points, method="ga", model="llama"):
    return {
        "target": target,
        "method": method,
        "model": model,
        "per_point": [
            {"label": lab, "recall_exact": r, "accuracy_exact": a, "superficially_unlearned": s}
            for lab, r, a, s in points
        ],
    }


DOCS = [
    {"reports": [
        sweep(["a", "child", "b"], [("1", "1/2", "1", True), ("2", "1", "3/4", True)]),
        sweep(["c", "child", "d"], [("1", "1/3", "9/10", False), ("2", "2/3", "4/5", True)]),
    ]},
    sweep(["a", "child", "b"], [("1", "1", "1", True)], method="npo"),
]


def test_threshold_metrics_are_recomputed():
    s = report.sweep_from_dict(DOCS[0]["reports"][0], threshold=0.8)
    assert s.acc_at_recall == pytest.approx(0.75)
    assert s.recall_at_acc == pytest.approx(0.5)
    assert s.acc_at_superficial == 1
    s = report.sweep_from_dict(DOCS[0]["reports"][1], threshold="0.8")
    assert s.acc_at_recall is None and s.recall_at_acc == pytest.approx(2 / 3)
    assert s.acc_at_superficial == pytest.approx(0.8)


def test_summary_groups_and_grid():
    summary = report.summarize(DOCS)
    groups = {(g["method"], g["model"]): g for g in summary["groups"]}
    assert set(groups) == {("ga", "llama"), ("npo", "llama")}
    ga = groups[("ga", "llama")]
    assert ga["n_targets"] == 2
    assert ga["aggregates"]["acc_at_recall"]["mean"] == pytest.approx(0.375)
    assert ga["aggregates"]["acc_at_recall"]["imputed"] == 1
    header, rows = report.grid_rows(summary)
    assert header == ["model", "recall_at_acc:ga", "recall_at_acc:npo", "acc_at_recall:ga", "acc_at_recall:npo"]
    assert rows == [["llama", "0.5833", "1.0000", "0.3750", "1.0000"]]
    table = list(csv.reader(io.StringIO(report.grid_csv(summary))))
    assert table[1] == rows[0]
    assert report.grid_markdown(summary).count("\n") == 3


def test_curve_outputs():
    summary = report.summarize(DOCS)
    rows = list(csv.DictReader(io.StringIO(report.curve_csv(summary))))
    ga = [r for r in rows if r["method"] == "ga"]
    assert [r["label"] for r in ga] == ["1", "2"]
    assert float(ga[1]["mean_recall"]) == pytest.approx(5 / 6)
    svg = ET.fromstring(report.curve_svg(summary))
    ns = "{http://www.w3.org/2000/svg}"
    assert len(svg.findall(f"{ns}polyline")) == 2


def test_missing_model_and_bad_input():
    s = report.summarize([sweep(["a", "child", "b"], [("x", "1", "1", True)], model=None)])
    assert s["groups"][0]["model"] == report.NO_MODEL
    with pytest.raises(ValidationError):
        report.summarize([{"reports": []}])
    with pytest.raises(ValidationError):
        report.sweep_from_dict({"target": ["a", "child", "b"]})
