"""Config files, provenance headers and the comparison table."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import ShapeError

__all__ = [
    "PROBLEM_DEFAULTS",
    "WALK_DEFAULTS",
    "TABLE_COLUMNS",
    "load_config",
    "provenance_header",
    "strip_provenance",
    "read_provenance",
    "emit_comparison_table",
]

PROBLEM_DEFAULTS = {
    "mu": 0.0,
    "sigma": 0.1,
    "levels": 32,
    "input_bits": 12,
    "slope": 1.0,
    "offset": 1.0,
    "calib_bits": 12,
}

WALK_DEFAULTS = {
    "days": 2,
    "step_bits": 1,
    "step_min": -0.01,
    "step_delta": 0.02,
    "drift": 0.0,
    "lambda": "auto",
    "S0": 1.0,
}

TABLE_COLUMNS = ("pipeline", "gate_count", "depth", "max_error_pct", "estimate", "exact",
                 "relative_error_pct", "cost_model")


def load_config(path: str | Path | None, defaults: dict) -> dict:
    """Merge a JSON config file over ``defaults``; unknown keys are rejected."""
    cfg = dict(defaults)
    if path is None:
        return cfg
    text = Path(path).read_text()
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ShapeError("config must be a JSON object")
    unknown = set(data) - set(defaults)
    if unknown:
        raise ShapeError(f"unknown config fields: {sorted(unknown)}")
    cfg.update(data)
    return cfg


def provenance_header(command: str, config: dict, seed: int | None) -> str:
    lines = [
        f"# qmixsig {__version__}",
        f"# command: {command}",
        f"# seed: {seed}",
        f"# config: {json.dumps(config, sort_keys=True)}",
    ]
    return "\n".join(lines) + "\n"


def strip_provenance(text: str) -> str:
    return "".join(ln for ln in text.splitlines(keepends=True) if not ln.startswith("#"))


def read_provenance(text: str) -> dict:
    out = {}
    for ln in text.splitlines():
        if not ln.startswith("# ") or ":" not in ln:
            continue
        key, _, value = ln[2:].partition(":")
        out[key.strip()] = value.strip()
    if "config" in out:
        out["config"] = json.loads(out["config"])
    return out


@dataclass
class ComparisonTable:
    rows: list[dict] = field(default_factory=list)

    def to_text(self) -> str:
        shown = [dict(r) for r in self.rows]
        for r in shown:
            if r["cost_model"]:
                r["gate_count"] = f"{r['gate_count']} ({r['cost_model']})"
            for key in ("max_error_pct", "relative_error_pct"):
                r[key] = f"{r[key]:.4g}"
            for key in ("estimate", "exact"):
                r[key] = f"{r[key]:.10g}"
        cols = TABLE_COLUMNS[:-1]
        widths = {c: max(len(c), *(len(str(r[c])) for r in shown)) for c in cols}
        out = ["  ".join(c.ljust(widths[c]) for c in cols)]
        out.extend("  ".join(str(r[c]).ljust(widths[c]) for c in cols) for r in shown)
        return "\n".join(out) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(TABLE_COLUMNS) + "\n")
        for r in self.rows:
            cells = [r["pipeline"], str(r["gate_count"]), str(r["depth"])]
            cells += [repr(float(r[k])) for k in ("max_error_pct", "estimate", "exact", "relative_error_pct")]
            cells.append(r["cost_model"])
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ComparisonTable":
        lines = [ln for ln in strip_provenance(text).splitlines() if ln.strip()]
        header = tuple(lines[0].split(","))
        if header != TABLE_COLUMNS:
            raise ShapeError(f"unexpected comparison header {header}")
        rows = []
        for ln in lines[1:]:
            cells = dict(zip(header, ln.split(",")))
            rows.append({
                "pipeline": cells["pipeline"],
                "gate_count": int(cells["gate_count"]),
                "depth": int(cells["depth"]),
                "max_error_pct": float(cells["max_error_pct"]),
                "estimate": float(cells["estimate"]),
                "exact": float(cells["exact"]),
                "relative_error_pct": float(cells["relative_error_pct"]),
                "cost_model": cells["cost_model"],
            })
        return cls(rows)


def emit_comparison_table(reports) -> ComparisonTable:
    """One row per pricing report, columns in :data:`TABLE_COLUMNS` order.

    Pre-processing costs from the synthesis model (rather than from counting
    circuit gates) carry the model name in ``cost_model``.
    """
    reports = list(reports)
    if not reports:
        raise ShapeError("need at least one report")
    rows = []
    for r in reports:
        rows.append({
            "pipeline": r.pipeline,
            "gate_count": r.prep_gate_count,
            "depth": r.prep_depth,
            "max_error_pct": r.max_error_pct,
            "estimate": r.estimate,
            "exact": r.exact,
            "relative_error_pct": r.relative_error,
            "cost_model": r.synthesis.model_name if r.synthesis else "",
        })
    return ComparisonTable(rows)
