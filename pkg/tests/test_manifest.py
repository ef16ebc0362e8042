"""Clip manifest parsing and serialization."""

import json

import pytest

from cinemeta.formats.manifest import ClipManifest, manifest_to_dict, parse_manifest
from cinemeta.formats.sidecar import BadTypeError, MissingKeyError


def _minimal(**overrides):
    raw = {
        "clip_id": "A001_C001",
        "frames_dir": "frames/A001_C001",
        "frame_pattern": "frame_%04d.ppm",
        "frame_count": 12,
        "fps": 24,
    }
    raw.update(overrides)
    return raw


def test_minimal_manifest_defaults():
    m = parse_manifest(json.dumps(_minimal()))
    assert str(m.clip_id) == "A001_C001"
    assert m.frame_count == 12
    assert m.basic.fps == 24.0
    assert m.basic.timecode_start.to_text() == "00:00:00:00"
    assert m.basic.timecode_start.fps_base == 24
    assert m.bayer_pattern is None and m.lut is None
    assert m.scene_num is None


def test_full_manifest_round_trips_through_dict():
    raw = _minimal(
        timecode_start="01:02:03:04",
        shutter=180.0,
        aperture=2.8,
        iso=800,
        focus=35.0,
        slate_template_id="prod_a",
        slate_scan_frames=30,
        bayer_pattern="RGGB",
        lut="luts/log_to_rec709.cube",
        scene_num=5,
        shot_num=1,
        take_num=2,
    )
    m = parse_manifest(json.dumps(raw))
    assert manifest_to_dict(m) == raw
    assert parse_manifest(json.dumps(manifest_to_dict(m))) == m


def test_fps_base_rounds_fractional_rates():
    m = parse_manifest(json.dumps(_minimal(fps=23.976)))
    assert m.basic.fps == 23.976
    assert m.basic.timecode_start.fps_base == 24


def test_frame_path_formats_index():
    m = parse_manifest(json.dumps(_minimal()))
    assert m.frame_path(0) == "frames/A001_C001/frame_0000.ppm"
    assert m.frame_path(37) == "frames/A001_C001/frame_0037.ppm"


@pytest.mark.parametrize("key", ["clip_id", "frames_dir", "frame_pattern", "frame_count", "fps"])
def test_required_keys(key):
    raw = _minimal()
    del raw[key]
    with pytest.raises(MissingKeyError, match=key):
        parse_manifest(json.dumps(raw))


@pytest.mark.parametrize(
    "overrides,match",
    [
        ({"fps": 0}, "fps"),
        ({"fps": "24"}, "fps"),
        ({"fps": True}, "fps"),
        ({"frame_count": 0}, "frame_count"),
        ({"frame_count": 2.5}, "frame_count"),
        ({"timecode_start": "1:2:3"}, "timecode"),
        ({"timecode_start": 42}, "timecode_start"),
        ({"shutter": -1}, "shutter"),
        ({"iso": 12.5}, "iso"),
        ({"iso": -100}, "iso"),
        ({"slate_scan_frames": "many"}, "slate_scan_frames"),
        ({"bayer_pattern": "XYZW"}, "bayer_pattern"),
        ({"scene_num": -3}, "scene_num"),
    ],
)
def test_bad_values_rejected(overrides, match):
    with pytest.raises(BadTypeError, match=match):
        parse_manifest(json.dumps(_minimal(**overrides)))


def test_not_json_rejected():
    with pytest.raises(BadTypeError, match="not valid JSON"):
        parse_manifest("{")
    with pytest.raises(BadTypeError, match="object"):
        parse_manifest("[]")


def test_manifest_frame_count_validated_at_construction():
    m = parse_manifest(json.dumps(_minimal()))
    with pytest.raises(BadTypeError, match="frame_count"):
        ClipManifest(
            clip_id=m.clip_id,
            frames_dir=m.frames_dir,
            frame_pattern=m.frame_pattern,
            frame_count=0,
            basic=m.basic,
        )
