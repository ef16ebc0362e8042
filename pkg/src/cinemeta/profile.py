"""User demand profiles: which labels to export, in what format, who wins.

A profile is the run-level contract between the pipeline and the
post-production software that will consume its output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .model import SELECTABLE_LABELS, Provenance


class ProfileError(ValueError):
    pass


class UnknownLabelError(ProfileError):
    pass


class EmptySelectionError(ProfileError):
    pass


class BadPrecedenceError(ProfileError):
    pass


OUTPUT_FORMATS = ("ale", "csv", "json")

#: Slate is the on-set source of truth for scene/shot/take, so it outranks
#: annotators and the production manifest; manual edits outrank everything.
DEFAULT_PRECEDENCE: tuple[Provenance, ...] = (
    Provenance.MANUAL,
    Provenance.SLATE_OCR,
    Provenance.ANNOTATOR,
    Provenance.MANIFEST,
    Provenance.CAMERA,
)


@dataclass(frozen=True)
class UserProfile:
    selected_labels: tuple[str, ...]
    output_format: str = "json"
    column_renames: dict[str, str] = field(default_factory=dict)
    precedence: tuple[Provenance, ...] = DEFAULT_PRECEDENCE
    min_confidence: float = 0.0

    def __post_init__(self) -> None:
        if not self.selected_labels:
            raise EmptySelectionError("profile selects no labels")
        for label in self.selected_labels:
            if label not in SELECTABLE_LABELS:
                raise UnknownLabelError(f"unknown label {label!r}")
        if len(set(self.selected_labels)) != len(self.selected_labels):
            raise ProfileError("selected_labels contains duplicates")
        if self.output_format not in OUTPUT_FORMATS:
            raise ProfileError(f"unknown output format {self.output_format!r}")
        for label in self.column_renames:
            if label not in self.selected_labels and label != "Name":
                raise ProfileError(
                    f"rename target {label!r} is not a selected label"
                )
        if len(set(self.precedence)) != len(self.precedence):
            raise BadPrecedenceError("precedence lists a provenance twice")
        if not 0.0 <= self.min_confidence <= 1.0:
            raise ProfileError("min_confidence must lie in [0, 1]")

    def header_for(self, label: str) -> str:
        return self.column_renames.get(label, label)

    def rank(self, provenance: Provenance) -> int:
        """Position in the precedence order; unlisted provenance ranks last."""
        try:
            return self.precedence.index(provenance)
        except ValueError:
            return len(self.precedence)


def load_profile(text: str) -> UserProfile:
    """Parse a profile JSON document, applying defaults for absent keys."""

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProfileError(f"profile is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ProfileError("profile must be a JSON object")

    labels = raw.get("selected_labels")
    if labels is None or not isinstance(labels, list):
        raise EmptySelectionError("profile must list selected_labels")
    precedence_names = raw.get("precedence")
    if precedence_names is None:
        precedence = DEFAULT_PRECEDENCE
    else:
        precedence = []
        for name in precedence_names:
            try:
                precedence.append(Provenance(name))
            except ValueError:
                raise BadPrecedenceError(f"unknown provenance {name!r}") from None
        precedence = tuple(precedence)

    return UserProfile(
        selected_labels=tuple(labels),
        output_format=raw.get("output_format", "json"),
        column_renames=dict(raw.get("column_renames", {})),
        precedence=precedence,
        min_confidence=float(raw.get("min_confidence", 0.0)),
    )
