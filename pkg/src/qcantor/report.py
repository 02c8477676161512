"""Result tables and their CSV / JSON-lines renderings."""

from __future__ import annotations

import csv
import decimal
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

SIG_DIGITS = 12
UNDEFINED = "undef"
KINDS = ("int", "exact", "float", "text")

_CTX = decimal.Context(prec=SIG_DIGITS, rounding=decimal.ROUND_HALF_EVEN)


def render_exact(x: Fraction, raw: bool = False) -> str:
    """12 significant digits, round-half-even; ``raw`` gives ``p/q`` instead."""
    if raw:
        return str(x)
    d = _CTX.divide(decimal.Decimal(x.numerator), decimal.Decimal(x.denominator))
    return str(d)


def render_cell(value, kind: str, raw: bool = False) -> str:
    if value is None:
        return UNDEFINED
    if kind == "exact":
        return render_exact(Fraction(value), raw)
    if kind == "int":
        return str(int(value))
    if kind == "float":
        return repr(float(value))
    return str(value)


@dataclass
class ResultTable:
    """Rows keyed by ``n`` (first column), sorted on output, plus a provenance header."""

    columns: list[tuple[str, str]]
    header: list[tuple[str, str]] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)

    def add(self, **row) -> None:
        missing = [c for c, _ in self.columns if c not in row]
        if missing:
            raise KeyError(f"row lacks columns {missing}")
        self.rows.append(row)

    def sorted_rows(self) -> list[dict]:
        key = self.columns[0][0]
        return sorted(self.rows, key=lambda r: r[key])

    def rendered(self, raw: bool = False) -> list[list[str]]:
        return [[render_cell(r[c], kind, raw) for c, kind in self.columns] for r in self.sorted_rows()]

    def column(self, name: str) -> list:
        return [r[name] for r in self.sorted_rows()]


def to_csv(table: ResultTable, raw: bool = False) -> str:
    buf = io.StringIO()
    for k, v in table.header:
        buf.write(f"# {k} = {v}\n")
    buf.write("# columns = " + ",".join(f"{c}:{kind}" for c, kind in table.columns) + "\n")
    buf.write(f"# exact = {'raw rational' if raw else f'{SIG_DIGITS} significant digits, round-half-even'}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([c for c, _ in table.columns])
    w.writerows(table.rendered(raw))
    return buf.getvalue()


def to_jsonl(table: ResultTable, raw: bool = False) -> str:
    head = {"header": dict(table.header),
            "columns": {c: kind for c, kind in table.columns},
            "exact": "raw" if raw else f"{SIG_DIGITS}sig-half-even"}
    lines = [json.dumps(head, sort_keys=True)]
    names = [c for c, _ in table.columns]
    for cells in table.rendered(raw):
        lines.append(json.dumps(dict(zip(names, cells))))
    return "\n".join(lines) + "\n"


def read_csv(text: str) -> tuple[dict, list[dict]]:
    """Parse :func:`to_csv` output back into (header, rows of strings)."""
    header, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            k, _, v = line[2:].partition(" = ")
            header[k] = v
        else:
            body.append(line)
    return header, list(csv.DictReader(body))
