"""Tabular cell rendering shared by the ALE and CSV writers/parsers.

Exports project an annotated record down to plain text cells: value only,
no confidence/provenance. Absent optional fields render as the empty cell
(never a fabricated zero). List fields join entries with ';'.
"""

from __future__ import annotations

from ..model import (
    ActorPID,
    AnnotatedValue,
    LABEL_ENUMS,
    LABEL_FIELDS,
    MetadataRecord,
    Provenance,
)

LIST_SEPARATOR = ";"


def render_cell(record: MetadataRecord, label: str) -> str:
    """Text form of one label's value for one record; '' when absent."""

    if label == "Name":
        return str(record.clip_id)
    if label == "Notes":
        return record.notes or ""
    attr, kind = LABEL_FIELDS[label]
    got = getattr(record.semantic, attr)
    if kind == "actor_list":
        return LIST_SEPARATOR.join(a.value.pid for a in got)
    if kind == "str_list":
        return LIST_SEPARATOR.join(o.value for o in got)
    if got is None:
        return ""
    value = got.value
    if kind == "enum":
        return value.value
    return str(value)


def parse_cell(label: str, text: str):
    """Inverse of render_cell for one semantic label.

    Returns (field_value, note). Unparseable text yields (None, note) so the
    caller can record the raw cell instead of failing the row; re-imported
    values carry manual provenance at confidence 1.0.
    """

    attr, kind = LABEL_FIELDS[label]
    if kind in ("actor_list", "str_list"):
        if not text:
            return (), None
        parts = text.split(LIST_SEPARATOR)
        if kind == "actor_list":
            return (
                tuple(
                    AnnotatedValue(ActorPID(p), 1.0, Provenance.MANUAL)
                    for p in parts
                ),
                None,
            )
        return (
            tuple(AnnotatedValue(p, 1.0, Provenance.MANUAL) for p in parts),
            None,
        )
    if not text:
        return None, None
    if kind == "int":
        try:
            value = int(text)
            if value < 0:
                raise ValueError
        except ValueError:
            return None, f"{label}={text}(unparsed)"
        return AnnotatedValue(value, 1.0, Provenance.MANUAL), None
    if kind == "enum":
        try:
            member = LABEL_ENUMS[label](text)
        except ValueError:
            return None, f"{label}={text}(unparsed)"
        return AnnotatedValue(member, 1.0, Provenance.MANUAL), None
    return AnnotatedValue(text, 1.0, Provenance.MANUAL), None
