"""Reports: what a command prints, as a fixed-width table or versioned JSON.

Reports hold only data that is a function of the inputs, so a cold and a warm
cache give byte-identical output.  Timing and cache statistics go to stderr.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

REPORT_SCHEMA = "diopkit.report/1"


@dataclass
class Table:
    title: str
    columns: List[str]
    rows: List[List[Any]]


@dataclass
class Report:
    command: str
    presentation: Optional[Dict[str, str]] = None
    tables: List[Table] = field(default_factory=list)
    verdict: Optional[str] = None
    messages: List[str] = field(default_factory=list)
    text: Optional[str] = None          # verbatim payload, e.g. a presentation file
    exit_code: int = 0

    def to_json(self) -> str:
        doc = {
            "schema": REPORT_SCHEMA,
            "command": self.command,
            "presentation": self.presentation,
            "tables": [{"title": t.title, "columns": t.columns, "rows": t.rows} for t in self.tables],
            "verdict": self.verdict,
            "messages": self.messages,
            "text": self.text,
            "exit_code": self.exit_code,
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    def to_table(self) -> str:
        if self.text is not None and not self.tables:
            return self.text
        out = [f"# {self.command}"]
        if self.presentation:
            out.append(f"# presentation {self.presentation['name']} digest {self.presentation['digest']}")
        for t in self.tables:
            out.append("")
            out.append(t.title)
            out.extend(format_rows(t.columns, t.rows))
        if self.text is not None:
            out.append("")
            out.append(self.text.rstrip("\n"))
        for m in self.messages:
            out.append(m)
        if self.verdict is not None:
            out.append("")
            out.append(f"verdict: {self.verdict}")
        return "\n".join(out) + "\n"


def _cell(x: Any) -> str:
    if isinstance(x, dict):
        return " ".join(f"{k}:{v}" for k, v in x.items()) or "-"
    if isinstance(x, (list, tuple)):
        return "(" + ",".join(map(str, x)) + ")"
    if x is None:
        return "-"
    return str(x)


def format_rows(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> List[str]:
    cells = [[_cell(x) for x in r] for r in rows]
    widths = [max([len(c)] + [len(r[k]) for r in cells]) for k, c in enumerate(columns)]
    line = lambda xs: "  ".join(x.ljust(w) for x, w in zip(xs, widths)).rstrip()
    return [line(columns), line(["-" * w for w in widths])] + [line(r) for r in cells]
