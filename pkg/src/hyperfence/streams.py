"""Line-oriented trace stream protocol shared by the enforcement drivers.

Each step of an n-copy run is two lines: ``O: set1|...|setn`` with the
system's proposed outputs, then ``I: set1|...|setn`` with the environment's
inputs.  A set is a comma-separated list of proposition names, or ``-``
for the empty set.  Echoed output lines that the enforcer corrected carry
a trailing ``#enforced`` marker.  Sequential runs separate sessions with a
bare ``NEWSESSION`` line.  Blank lines and lines starting with ``#`` are
ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, Iterable, Iterator, Sequence

from .errors import StreamFormatError

NEWSESSION = "NEWSESSION"
ENFORCED_FLAG = "#enforced"


@dataclass(frozen=True)
class StreamItem:
    kind: str  # "outputs" | "inputs" | "newsession"
    sets: tuple[frozenset[str], ...] | None
    enforced: bool
    line_no: int


def parse_sets(field: str, n: int, line_no: int) -> tuple[frozenset[str], ...]:
    parts = field.split("|")
    if len(parts) != n:
        raise StreamFormatError(
            f"line {line_no}: expected {n} event set(s), got {len(parts)}"
        )
    out = []
    for part in parts:
        part = part.strip()
        if part == "-":
            out.append(frozenset())
            continue
        names = [w.strip() for w in part.split(",")]
        if not part or any(not w for w in names):
            raise StreamFormatError(
                f"line {line_no}: malformed event set (use '-' for empty)"
            )
        out.append(frozenset(names))
    return tuple(out)


def format_sets(sets: Sequence[AbstractSet[str]]) -> str:
    return "|".join(",".join(sorted(s)) or "-" for s in sets)


def format_output_line(sets: Sequence[AbstractSet[str]], enforced: bool = False) -> str:
    line = f"O: {format_sets(sets)}"
    return f"{line} {ENFORCED_FLAG}" if enforced else line


def format_input_line(sets: Sequence[AbstractSet[str]]) -> str:
    return f"I: {format_sets(sets)}"


def parse_stream(lines: Iterable[str], n: int) -> Iterator[StreamItem]:
    """Lexical pass over a stream; alternation and alphabet checks are the
    consumer's job."""
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == NEWSESSION:
            yield StreamItem("newsession", None, False, line_no)
            continue
        enforced = False
        if line.endswith(ENFORCED_FLAG):
            line = line[: -len(ENFORCED_FLAG)].rstrip()
            enforced = True
        if line.startswith("O:"):
            yield StreamItem("outputs", parse_sets(line[2:], n, line_no), enforced, line_no)
        elif line.startswith("I:"):
            if enforced:
                raise StreamFormatError(
                    f"line {line_no}: {ENFORCED_FLAG} is only valid on output lines"
                )
            yield StreamItem("inputs", parse_sets(line[2:], n, line_no), False, line_no)
        else:
            raise StreamFormatError(
                f"line {line_no}: expected 'O:', 'I:' or {NEWSESSION}"
            )
