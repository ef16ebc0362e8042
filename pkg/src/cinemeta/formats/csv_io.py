"""RFC-4180 CSV export/import (the DaVinci-compatible interchange path).

Writing goes through the stdlib csv module (minimal quoting, CRLF rows);
parsing is a strict hand-rolled state machine so malformed quoting is
reported with a line number instead of being silently swallowed. The two
sides cross-check each other in the round-trip property tests.
"""

from __future__ import annotations

import csv
import io

from ..model import (
    BasicMetadata,
    ClipId,
    LABEL_FIELDS,
    MetadataRecord,
    SemanticFields,
    Timecode,
)
from ..profile import UserProfile
from .ale import export_columns
from .cells import parse_cell, render_cell


class CsvError(ValueError):
    pass


class HeaderMismatchError(CsvError):
    pass


class CsvSyntaxError(CsvError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


#: Placeholder camera block for records re-imported from a spreadsheet,
#: which carries no basic metadata columns.
REIMPORT_BASIC = BasicMetadata(fps=24.0, timecode_start=Timecode(0, 0, 0, 0, 24))


def write_csv(records: list[MetadataRecord], profile: UserProfile) -> str:
    labels = export_columns(profile)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow([profile.header_for(label) for label in labels])
    for record in records:
        writer.writerow([render_cell(record, label) for label in labels])
    return buf.getvalue()


def parse_csv_rows(text: str) -> list[tuple[int, list[str]]]:
    """Strict RFC-4180 tokenizer: (starting line number, cells) per row."""

    rows: list[tuple[int, list[str]]] = []
    cells: list[str] = []
    cur: list[str] = []
    line_no = 1
    row_start = 1
    quote_open_line = 0
    state = "start"  # start | plain | quoted | quote_end

    def end_cell() -> None:
        nonlocal state
        cells.append("".join(cur))
        cur.clear()
        state = "start"

    def end_row() -> None:
        nonlocal row_start
        end_cell()
        rows.append((row_start, cells.copy()))
        cells.clear()

    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if state == "quoted":
            if ch == '"':
                if i + 1 < n and text[i + 1] == '"':
                    cur.append('"')
                    i += 2
                    continue
                state = "quote_end"
            else:
                if ch == "\n":
                    line_no += 1
                cur.append(ch)
            i += 1
            continue
        if ch == '"':
            if state == "start":
                state = "quoted"
                quote_open_line = line_no
            elif state == "quote_end":
                raise CsvSyntaxError(line_no, "quote reopened after closing quote")
            else:
                raise CsvSyntaxError(line_no, "quote inside unquoted cell")
            i += 1
            continue
        if ch == ",":
            end_cell()
            i += 1
            continue
        if ch == "\r" or ch == "\n":
            end_row()
            if ch == "\r" and i + 1 < n and text[i + 1] == "\n":
                i += 1
            line_no += 1
            row_start = line_no
            i += 1
            continue
        if state == "quote_end":
            raise CsvSyntaxError(line_no, "text after closing quote")
        if state == "start":
            state = "plain"
        cur.append(ch)
        i += 1

    if state == "quoted":
        raise CsvSyntaxError(quote_open_line, "unbalanced quote")
    if cur or cells or state == "quote_end":
        end_row()
    return rows


def parse_csv(text: str, profile: UserProfile) -> list[MetadataRecord]:
    """Inverse of write_csv for the profile-covered fields.

    Cells that fail to parse (e.g. an alphanumeric scene code in an integer
    column) become notes on the record rather than errors. Basic metadata is
    not representable in the CSV projection, so records carry
    REIMPORT_BASIC placeholders.
    """

    labels = export_columns(profile)
    expected_header = [profile.header_for(label) for label in labels]
    rows = parse_csv_rows(text)
    if not rows:
        raise HeaderMismatchError("empty document, expected a header row")
    header_line, header = rows[0]
    if header != expected_header:
        raise HeaderMismatchError(
            f"line {header_line}: header {header!r} does not match profile "
            f"columns {expected_header!r}"
        )

    records: list[MetadataRecord] = []
    for line_no, cells in rows[1:]:
        if len(cells) != len(labels):
            raise CsvSyntaxError(
                line_no, f"expected {len(labels)} cells, got {len(cells)}"
            )
        semantic_kwargs: dict = {}
        notes: str | None = None
        parse_notes: list[str] = []
        clip_id: ClipId | None = None
        for label, cell in zip(labels, cells):
            if label == "Name":
                clip_id = ClipId(cell)
            elif label == "Notes":
                notes = cell or None
            else:
                value, note = parse_cell(label, cell)
                if note is not None:
                    parse_notes.append(note)
                elif value is not None and value != ():
                    semantic_kwargs[LABEL_FIELDS[label][0]] = value
        if clip_id is None:
            raise CsvSyntaxError(line_no, "row lacks a Name cell")
        if parse_notes:
            joined = "; ".join(parse_notes)
            notes = f"{notes}; {joined}" if notes else joined
        records.append(
            MetadataRecord(
                clip_id=clip_id,
                basic=REIMPORT_BASIC,
                semantic=SemanticFields(**semantic_kwargs),
                notes=notes,
            )
        )
    return records
