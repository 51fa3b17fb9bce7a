"""LP-format model export and CSV / Markdown / JSON benchmark reports."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import IO, Iterable, Sequence, Union

from .core import iter_pairs
from .formulations import EXPERIMENTAL_NOTE, ConstraintSet

# CPLEX rejects LP lines longer than 560 characters
_TERMS_PER_LINE = 8

PathOrIO = Union[str, Path, IO[str]]


def var_name(i: int, j: int) -> str:
    if i > j:
        i, j = j, i
    return f"x_{i}_{j}"


def constraint_name(i: int, j: int, k: int) -> str:
    return f"t_{i}_{j}_{k}"


def _wrap(head: str, terms: Sequence[str]) -> list[str]:
    if not terms:
        return [head.rstrip()]
    lines = []
    for start in range(0, len(terms), _TERMS_PER_LINE):
        chunk = " ".join(terms[start:start + _TERMS_PER_LINE])
        lines.append((head if start == 0 else "   ") + chunk)
    return lines


def lp_lines(cs: ConstraintSet) -> list[str]:
    n = cs.n
    out = [f"\\ clique partitioning, formulation {cs.kind.value}, n={n}"]
    if cs.is_scaled:
        out.append(f"\\ objective scaled by {cs.scaled.factor} and shifted by -1 per pair")
    if cs.experimental:
        out.append(f"\\ {EXPERIMENTAL_NOTE}")
    terms = []
    for (i, j), w in zip(iter_pairs(n), cs.objective_weights):
        if w == 0:
            continue
        sign = "-" if w < 0 else "+"
        coef = f"{abs(w)} " if abs(w) != 1 else ""
        terms.append(f"{sign} {coef}{var_name(i, j)}")
    if terms and terms[0].startswith("+ "):
        terms[0] = terms[0][2:]
    out.append("Maximize")
    out.extend(_wrap(" obj: ", terms or ["0 " + var_name(0, 1)]))
    out.append("Subject To")
    for i, j, k in cs.constraints:
        out.append(
            f" {constraint_name(i, j, k)}: {var_name(i, j)} + {var_name(j, k)} - {var_name(i, k)} <= 1"
        )
    out.append("Binaries")
    out.extend(_wrap(" ", [var_name(i, j) for i, j in iter_pairs(n)]))
    out.append("End")
    return out


def dumps_lp(cs: ConstraintSet) -> str:
    return "\n".join(lp_lines(cs)) + "\n"


def write_lp(cs: ConstraintSet, sink: PathOrIO) -> int:
    """Write ``cs`` as a CPLEX-LP model; returns the number of bytes written."""
    data = dumps_lp(cs)
    if isinstance(sink, (str, Path)):
        with open(sink, "w", newline="\n") as fh:
            fh.write(data)
    else:
        sink.write(data)
    return len(data.encode("ascii"))


# --- benchmark reports ------------------------------------------------------

@dataclass
class BenchRow:
    instance: str
    family: str
    n: int
    seed: int | None
    kind: str
    count: int
    solver: str
    status: str
    value: int | None
    elapsed: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


TIMING_COLUMNS = ("elapsed",)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.3f}"
    return str(v)


def write_report(rows: Iterable[BenchRow], format: str = "csv", sink: IO[str] | None = None) -> str:
    """Render rows as csv, markdown (one table per family) or json.

    Returns the rendered text and also writes it to ``sink`` when given.
    """
    rows = list(rows)
    cols = BenchRow.columns()
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for r in rows:
            writer.writerow([_cell(getattr(r, c)) for c in cols])
        text = buf.getvalue()
    elif format == "markdown":
        text = _markdown(rows, cols)
    elif format == "json":
        text = json.dumps([asdict(r) for r in rows], indent=1) + "\n"
    else:
        raise ValueError(f"unknown report format {format!r}")
    if sink is not None:
        sink.write(text)
    return text


def _markdown(rows: list[BenchRow], cols: list[str]) -> str:
    head = "| " + " | ".join(cols) + " |\n" + "|" + "---|" * len(cols) + "\n"
    if not rows:
        return head
    families: dict[str, list[BenchRow]] = {}
    for r in rows:
        families.setdefault(r.family, []).append(r)
    parts = []
    for fam, fam_rows in families.items():
        body = "".join(
            "| " + " | ".join(_cell(getattr(r, c)) for c in cols) + " |\n" for r in fam_rows
        )
        parts.append(f"### {fam}\n\n{head}{body}")
    return "\n".join(parts)



def write_table(header: Sequence[str], rows: Sequence[Sequence], format: str = "csv") -> str:
    """Generic table rendering used for count reports."""
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([[_cell(v) for v in r] for r in rows])
        return buf.getvalue()
    if format == "markdown":
        lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
        lines += ["| " + " | ".join(_cell(v) for v in r) + " |" for r in rows]
        return "\n".join(lines) + "\n"
    if format == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n"
    raise ValueError(f"unknown report format {format!r}")
