"""CSV emission with round-trip float formatting."""
from __future__ import annotations

import csv
from fractions import Fraction
from typing import Iterable, Sequence, TextIO


def fmt(x) -> str:
    """17 significant digits for floats, exact text for ints and fractions."""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (int, Fraction, str)):
        return str(x)
    return format(float(x), ".17g")


def write_csv(fh: TextIO, header: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = ()) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    for line in comments:
        fh.write(f"# {line}\n")
