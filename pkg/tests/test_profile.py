"""User profile validation and parsing."""

import pytest

from cinemeta.model import Provenance
from cinemeta.profile import (
    BadPrecedenceError,
    DEFAULT_PRECEDENCE,
    EmptySelectionError,
    ProfileError,
    UnknownLabelError,
    UserProfile,
    load_profile,
)


def test_minimal_profile_gets_defaults():
    profile = load_profile('{"selected_labels":["SceneNum","CameraMove"],"output_format":"ale"}')
    assert profile.selected_labels == ("SceneNum", "CameraMove")
    assert profile.output_format == "ale"
    assert profile.precedence == DEFAULT_PRECEDENCE
    assert profile.min_confidence == 0.0
    assert profile.column_renames == {}


def test_default_precedence_order():
    assert DEFAULT_PRECEDENCE == (
        Provenance.MANUAL,
        Provenance.SLATE_OCR,
        Provenance.ANNOTATOR,
        Provenance.MANIFEST,
        Provenance.CAMERA,
    )


def test_unknown_label():
    with pytest.raises(UnknownLabelError):
        UserProfile(selected_labels=("Vibe",))


def test_empty_selection():
    with pytest.raises(EmptySelectionError):
        UserProfile(selected_labels=())
    with pytest.raises(EmptySelectionError):
        load_profile('{"output_format":"csv"}')


def test_duplicate_labels_rejected():
    with pytest.raises(ProfileError):
        UserProfile(selected_labels=("SceneNum", "SceneNum"))


def test_unknown_output_format():
    with pytest.raises(ProfileError):
        UserProfile(selected_labels=("SceneNum",), output_format="xml")


def test_rename_must_target_selected_label():
    UserProfile(selected_labels=("SceneNum",), column_renames={"SceneNum": "Scene"})
    UserProfile(selected_labels=("SceneNum",), column_renames={"Name": "Clip"})
    with pytest.raises(ProfileError):
        UserProfile(selected_labels=("SceneNum",), column_renames={"TakeNum": "Take"})


def test_bad_precedence():
    with pytest.raises(BadPrecedenceError):
        load_profile('{"selected_labels":["SceneNum"],"precedence":["psychic"]}')
    with pytest.raises(BadPrecedenceError):
        UserProfile(
            selected_labels=("SceneNum",),
            precedence=(Provenance.MANUAL, Provenance.MANUAL),
        )


def test_min_confidence_range():
    with pytest.raises(ProfileError):
        UserProfile(selected_labels=("SceneNum",), min_confidence=1.5)


def test_rank_unlisted_provenance_last():
    profile = UserProfile(
        selected_labels=("SceneNum",),
        precedence=(Provenance.MANUAL, Provenance.SLATE_OCR),
    )
    assert profile.rank(Provenance.MANUAL) == 0
    assert profile.rank(Provenance.SLATE_OCR) == 1
    assert profile.rank(Provenance.ANNOTATOR) == 2  # unlisted, after everything


def test_header_for():
    profile = UserProfile(
        selected_labels=("SceneNum",), column_renames={"SceneNum": "Scene #"}
    )
    assert profile.header_for("SceneNum") == "Scene #"
    assert profile.header_for("Name") == "Name"


def test_load_profile_error_paths():
    with pytest.raises(ProfileError, match="JSON"):
        load_profile("{nope")
    with pytest.raises(ProfileError, match="object"):
        load_profile("[1,2]")
