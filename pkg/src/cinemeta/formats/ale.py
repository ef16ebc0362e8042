"""Avid Log Exchange (ALE) reader and writer.

The grammar is the classic three-section tab-delimited form:

    Heading
    KEY<TAB>VALUE ...
    <blank>
    Column
    name<TAB>name...
    <blank>
    Data
    cell<TAB>cell... until EOF

Stray blank lines are tolerated on parse (some vendors pad sections) but
never emitted; the writer's output is canonical and byte-deterministic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..model import MetadataRecord
from ..profile import EmptySelectionError, UserProfile
from .cells import render_cell

_CONTROL_RE = re.compile(r"[\x00-\x08\x0b-\x1f]")


class AleError(ValueError):
    pass


class MissingSectionError(AleError):
    def __init__(self, section: str):
        super().__init__(f"missing section {section!r}")
        self.section = section


class RowArityError(AleError):
    def __init__(self, line_no: int, expected: int, got: int):
        super().__init__(f"line {line_no}: expected {expected} cells, got {got}")
        self.line_no = line_no
        self.expected = expected
        self.got = got


@dataclass(frozen=True)
class AleDocument:
    heading: tuple[tuple[str, str], ...]
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != len(self.columns):
                raise AleError(
                    f"row has {len(row)} cells for {len(self.columns)} columns"
                )
        for cell in self._all_cells():
            if "\t" in cell or "\n" in cell or "\r" in cell:
                raise AleError(f"cell contains tab/newline: {cell!r}")

    def _all_cells(self):
        for key, value in self.heading:
            yield key
            yield value
        yield from self.columns
        for row in self.rows:
            yield from row


def parse_ale(text: str) -> AleDocument:
    lines = text.split("\n")
    # Strip a trailing CR per line so CRLF files parse, then index by 1-based
    # line number for error messages.
    numbered = [(i + 1, line.rstrip("\r")) for i, line in enumerate(lines)]
    pos = 0

    def skip_blank() -> None:
        nonlocal pos
        while pos < len(numbered) and not numbered[pos][1].strip():
            pos += 1

    def check_cells(line_no: int, cells: tuple[str, ...]) -> tuple[str, ...]:
        for cell in cells:
            if _CONTROL_RE.search(cell):
                raise AleError(f"line {line_no}: cell contains control character")
        return cells

    skip_blank()
    if pos >= len(numbered) or numbered[pos][1] != "Heading":
        raise MissingSectionError("Heading")
    pos += 1

    heading: list[tuple[str, str]] = []
    while pos < len(numbered):
        line_no, line = numbered[pos]
        if not line.strip() or line == "Column":
            break
        if "\t" not in line:
            raise AleError(f"line {line_no}: heading line is not key<TAB>value")
        key, value = line.split("\t", 1)
        check_cells(line_no, (key, value))
        heading.append((key, value))
        pos += 1

    skip_blank()
    if pos >= len(numbered) or numbered[pos][1] != "Column":
        raise MissingSectionError("Column")
    pos += 1
    skip_blank()
    if pos >= len(numbered):
        raise MissingSectionError("Data")
    line_no, line = numbered[pos]
    columns = check_cells(line_no, tuple(line.split("\t")))
    pos += 1

    skip_blank()
    if pos >= len(numbered) or numbered[pos][1] != "Data":
        raise MissingSectionError("Data")
    pos += 1

    rows: list[tuple[str, ...]] = []
    while pos < len(numbered):
        line_no, line = numbered[pos]
        pos += 1
        if not line.strip():
            continue
        cells = tuple(line.split("\t"))
        if len(cells) != len(columns):
            raise RowArityError(line_no, len(columns), len(cells))
        rows.append(check_cells(line_no, cells))

    return AleDocument(tuple(heading), columns, tuple(rows))


def write_ale_document(doc: AleDocument) -> str:
    parts = ["Heading"]
    parts.extend(f"{key}\t{value}" for key, value in doc.heading)
    parts.append("")
    parts.append("Column")
    parts.append("\t".join(doc.columns))
    parts.append("")
    parts.append("Data")
    parts.extend("\t".join(row) for row in doc.rows)
    return "\n".join(parts) + "\n"


def _sanitize(cell: str) -> str:
    # ALE cells cannot carry tabs or line breaks; free text gets flattened.
    return re.sub(r"[\t\r\n]", " ", cell)


def _format_fps(fps: float) -> str:
    return str(int(fps)) if float(fps).is_integer() else str(fps)


def export_columns(profile: UserProfile) -> list[str]:
    """Name always leads; remaining selected labels keep profile order."""
    return ["Name"] + [lb for lb in profile.selected_labels if lb != "Name"]


def records_to_ale(records: list[MetadataRecord], profile: UserProfile) -> AleDocument:
    if not profile.selected_labels:
        raise EmptySelectionError("profile selects no labels")
    labels = export_columns(profile)
    heading = [("FIELD_DELIM", "TABS"), ("VIDEO_FORMAT", "1080")]
    if records:
        heading.append(("FPS", _format_fps(records[0].basic.fps)))
    rows = tuple(
        tuple(_sanitize(render_cell(record, label)) for label in labels)
        for record in records
    )
    columns = tuple(profile.header_for(label) for label in labels)
    return AleDocument(tuple(heading), columns, rows)


def write_ale(records: list[MetadataRecord], profile: UserProfile) -> str:
    return write_ale_document(records_to_ale(records, profile))
