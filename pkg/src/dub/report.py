"""Aggregation of benchmark outputs into a results grid and accuracy-recall curves.

Inputs are the JSON documents written by ``dub bench`` (or ``dub eval``).
Per-target threshold metrics are recomputed from the exact per-point values,
so totals never depend on numbers cached in the files.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ValidationError
from .metrics import PointReport, SweepReport, aggregate

NO_MODEL = "-"


def _fraction(point: dict, key: str) -> Fraction:
    exact = point.get(f"{key}_exact")
    if exact is not None:
        return Fraction(exact)
    if point.get(key) is None:
        raise ValidationError(f"sweep point lacks {key!r}")
    return Fraction(str(point[key]))


def _best(values) -> Optional[Fraction]:
    values = list(values)
    return max(values) if values else None


def sweep_from_dict(data: dict, threshold=None, method=None, model=None) -> SweepReport:
    """Rebuild a sweep report from its JSON form without a knowledge base."""
    try:
        raw_points = data["per_point"]
    except (KeyError, TypeError):
        raise ValidationError("sweep report without 'per_point'") from None
    thr = Fraction(str(threshold if threshold is not None else data.get("threshold", 0.8)))
    points = [
        PointReport(str(p["label"]), _fraction(p, "recall"), _fraction(p, "accuracy"), None,
                    None, None, bool(p.get("superficially_unlearned", False)))
        for p in raw_points
    ]
    return SweepReport(
        tuple(data.get("target") or ()),
        points,
        _best(p.accuracy for p in points if p.recall >= thr),
        _best(p.recall for p in points if p.accuracy >= thr),
        _best(p.accuracy for p in points if p.superficially_unlearned),
        thr,
        method if method is not None else data.get("method"),
        model if model is not None else data.get("model"),
    )


def collect(documents: Sequence[dict], threshold=None) -> dict:
    """Group per-target sweep reports by ``(method, model)``."""
    groups: dict = {}
    for doc in documents:
        reports = doc.get("reports")
        if reports is None:
            reports = [doc]
        for r in reports:
            sr = sweep_from_dict(r, threshold, r.get("method") or doc.get("method"), r.get("model") or doc.get("model"))
            key = (sr.method or "unknown", sr.model or NO_MODEL)
            groups.setdefault(key, []).append(sr)
    if not groups:
        raise ValidationError("no sweep reports found in the inputs")
    return groups


def summarize(documents: Sequence[dict], threshold=None) -> dict:
    groups = collect(documents, threshold)
    out = []
    for (method, model) in sorted(groups):
        agg = aggregate(groups[(method, model)])
        out.append({
            "method": method,
            "model": model,
            "n_targets": len(groups[(method, model)]),
            "aggregates": agg.aggregates,
            "curve": agg.curve,
        })
    thr = threshold if threshold is not None else 0.8
    return {"threshold": float(Fraction(str(thr))), "std": "population", "groups": out}


def grid_rows(summary: dict) -> tuple:
    """Header and rows: one row per model, recall@acc then acc@recall per method."""
    methods = sorted({g["method"] for g in summary["groups"]})
    models = sorted({g["model"] for g in summary["groups"]})
    cell = {(g["method"], g["model"]): g["aggregates"] for g in summary["groups"]}
    header = ["model"] + [f"recall_at_acc:{m}" for m in methods] + [f"acc_at_recall:{m}" for m in methods]
    rows = []
    for model in models:
        row = [model]
        for metric in ("recall_at_acc", "acc_at_recall"):
            for m in methods:
                agg = cell.get((m, model))
                row.append("" if agg is None else f"{agg[metric]['mean']:.4f}")
        rows.append(row)
    return header, rows


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def grid_csv(summary: dict) -> str:
    return _csv(*grid_rows(summary))


def grid_markdown(summary: dict) -> str:
    header, rows = grid_rows(summary)
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def curve_csv(summary: dict) -> str:
    rows = []
    for g in summary["groups"]:
        for c in g["curve"]:
            rows.append([g["method"], g["model"], c["label"], f"{c['mean_accuracy']:.6f}", f"{c['mean_recall']:.6f}"])
    return _csv(["method", "model", "label", "mean_accuracy", "mean_recall"], rows)


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def curve_svg(summary: dict, width: int = 480, height: int = 400) -> str:
    """Accuracy (y) against recall (x), one polyline per method/model."""
    left, right, top, bottom = 60, 150, 20, 50
    pw, ph = width - left - right, height - top - bottom

    def xy(recall, acc):
        return left + recall * pw, top + (1 - acc) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>',
    ]
    for i in range(6):
        v = i / 5
        x, _ = xy(v, 0)
        _, y = xy(0, v)
        parts.append(f'<text x="{x:.1f}" y="{top + ph + 16}" font-size="11" text-anchor="middle">{v:.1f}</text>')
        parts.append(f'<text x="{left - 6}" y="{y + 4:.1f}" font-size="11" text-anchor="end">{v:.1f}</text>')
    parts.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" font-size="12" text-anchor="middle">Recall</text>')
    parts.append(f'<text x="14" y="{top + ph / 2:.1f}" font-size="12" text-anchor="middle" '
                 f'transform="rotate(-90 14 {top + ph / 2:.1f})">Accuracy</text>')
    for k, g in enumerate(summary["groups"]):
        color = _COLORS[k % len(_COLORS)]
        pts = sorted((c["mean_recall"], c["mean_accuracy"]) for c in g["curve"])
        coords = " ".join("{:.1f},{:.1f}".format(*xy(r, a)) for r, a in pts)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        for r, a in pts:
            cx, cy = xy(r, a)
            parts.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="3" fill="{color}"/>')
        label = g["method"] if g["model"] == NO_MODEL else f"{g['method']} / {g['model']}"
        ly = top + 14 + 18 * k
        parts.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 30}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{left + pw + 34}" y="{ly}" font-size="11">{_escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
