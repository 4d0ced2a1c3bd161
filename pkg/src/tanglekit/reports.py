"""Rendering of command results as JSON, CSV or aligned text."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction


def _plain(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if hasattr(x, "item") and callable(x.item):  # numpy scalars
        return x.item()
    return x


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x)


@dataclass
class Result:
    """Output of one command: a table plus named boolean checks."""

    command: str
    config: dict
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    checks: dict[str, bool] = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    bare: bool = False  # text form is just the first column, one value per line

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def render(self, fmt: str) -> str:
        if fmt == "json":
            body = {"command": self.command, "config": self.config,
                    "columns": self.columns, "rows": self.rows,
                    "checks": self.checks, "passed": self.passed, **self.extra}
            return json.dumps(_plain(body), indent=2, sort_keys=True) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([_cell(x) for x in r])
            return buf.getvalue()
        return self._text()

    def _text(self) -> str:
        if self.bare:
            return "".join(f"{_cell(r[0])}\n" for r in self.rows)
        table = [self.columns] + [[_cell(x) for x in r] for r in self.rows]
        widths = [max(len(r[i]) for r in table) for i in range(len(self.columns))]
        lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in table]
        for name, value in self.extra.items():
            if not isinstance(value, (dict, list)):
                lines.append(f"# {name}: {_cell(value)}")
        for name, ok in self.checks.items():
            lines.append(f"# check {name}: {'PASS' if ok else 'FAIL'}")
        return "\n".join(lines) + "\n"
