"""Report envelope shared by all subcommands, with JSON, CSV and table renderers.

Reals are written with 17 significant digits, which is enough for any double
to survive a text round trip unchanged.  Key order is the insertion order of
the payload, so equal inputs give byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = 1


def format_real(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = "%.17g" % x
    # keep reals recognisable as reals after a round trip
    if all(ch not in text for ch in ".en"):
        text += ".0"
    return text


def to_plain(obj):
    """numpy scalars/arrays and tuples to builtin JSON-able values."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _flat(v) -> bool:
    if isinstance(v, dict):
        return False
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) for x in v)
    return True


def dump_json(obj, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dump_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(_flat(v) for v in obj):
            return "[" + ", ".join(dump_json(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dump_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_real(obj)
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(str(obj))


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_real(v).strip('"')
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    return "" if v is None else str(v)


@dataclass
class Report:
    command: str
    family: str
    parameters: dict
    results: dict
    tolerances: dict
    checks: dict
    columns: list[str] = field(default_factory=list)
    rows: list[list] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(bool(v) for v in self.checks.values())

    def envelope(self) -> dict:
        results = dict(self.results)
        if self.columns:
            results["table"] = {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}
        return to_plain(
            {
                "schema": SCHEMA_VERSION,
                "command": self.command,
                "family": self.family,
                "parameters": self.parameters,
                "results": results,
                "tolerances": self.tolerances,
                "summary": {"passed": self.passed, "checks": self.checks},
            }
        )

    def to_json(self) -> str:
        return dump_json(self.envelope()) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.columns:
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([_cell(v) for v in to_plain(r)])
        else:
            w.writerow(["key", "value"])
            for k, v in to_plain(self.results).items():
                w.writerow([k, _cell(v) if not isinstance(v, dict) else json.dumps(v, sort_keys=False)])
        return buf.getvalue()

    def to_table(self) -> str:
        out = [f"{self.command}  {self.family}".rstrip()]
        plain = to_plain(self.results)
        scalars = {k: v for k, v in plain.items() if _flat(v)}
        if scalars:
            width = max(len(k) for k in scalars)
            out += [f"  {k.ljust(width)}  {_cell(v)}" for k, v in scalars.items()]
        if self.columns:
            cells = [[_cell(v) for v in to_plain(r)] for r in self.rows]
            widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(self.columns)]
            out.append("")
            out.append("  " + "  ".join(c.ljust(wd) for c, wd in zip(self.columns, widths)))
            out.append("  " + "  ".join("-" * wd for wd in widths))
            out += ["  " + "  ".join(v.ljust(wd) for v, wd in zip(r, widths)) for r in cells]
        out.append("")
        for name, ok in self.checks.items():
            out.append(f"  [{'ok' if ok else 'FAIL'}] {name}")
        out.append(f"  => {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(out) + "\n"

    def render(self, fmt: str) -> str:
        return {"json": self.to_json, "csv": self.to_csv, "table": self.to_table}[fmt]()
