"""Camera-move decision table and end-to-end classification smoke."""

import numpy as np
import pytest

from cinemeta.camera_move import (
    CameraMoveConfig,
    PairSample,
    classify_camera_move,
    decide,
    measure_pair,
)
from cinemeta.model import CameraMove
from cinemeta.synthetic import move_clip, value_noise

DIAG = 1000.0  # translation floor = static_t * DIAG = 2.0 px with defaults


def _samples(n=6, **kw):
    return [PairSample(valid=True, **kw) for _ in range(n)]


class TestConfig:
    def test_defaults_valid(self):
        CameraMoveConfig()

    def test_stride_validated(self):
        with pytest.raises(ValueError, match="stride"):
            CameraMoveConfig(stride=0)

    def test_sign_agreement_validated(self):
        with pytest.raises(ValueError, match="sign_agreement"):
            CameraMoveConfig(sign_agreement=0.0)
        with pytest.raises(ValueError, match="sign_agreement"):
            CameraMoveConfig(sign_agreement=1.5)


def test_t_norm_is_euclidean():
    assert PairSample(valid=True, tx=3.0, ty=4.0).t_norm == 5.0


class TestDecideTable:
    def test_static(self):
        move, conf = decide(_samples(tx=0.1, ty=0.1, scale=1.0005), DIAG)
        assert move is CameraMove.STATIC
        assert conf == 1.0

    def test_static_confidence_counts_conforming_samples(self):
        samples = _samples(5, tx=0.1, ty=0.0) + [PairSample(valid=True, tx=5.0)]
        move, conf = decide(samples, DIAG)
        assert move is CameraMove.STATIC
        assert conf == pytest.approx(5 / 6)

    def test_handheld_thrashing_direction(self):
        samples = [
            PairSample(valid=True, tx=4.0 * (-1) ** i, ty=0.5) for i in range(6)
        ]
        move, conf = decide(samples, DIAG)
        assert move is CameraMove.HANDHELD
        assert conf == 1.0

    def test_zoom_low_parallax(self):
        move, conf = decide(_samples(scale=1.01, parallax_ratio=0.05), DIAG)
        assert (move, conf) == (CameraMove.ZOOM, 1.0)

    def test_dolly_high_parallax(self):
        move, _ = decide(_samples(scale=1.01, parallax_ratio=0.3), DIAG)
        assert move is CameraMove.DOLLY

    def test_parallax_tie_breaks_to_zoom(self):
        # tau is an exclusive bound: exactly at it still reads as lens zoom
        move, _ = decide(_samples(scale=1.01, parallax_ratio=0.15), DIAG)
        assert move is CameraMove.ZOOM

    def test_pan_low_parallax(self):
        move, conf = decide(_samples(tx=5.0, ty=0.1, parallax_ratio=0.05), DIAG)
        assert (move, conf) == (CameraMove.PAN, 1.0)

    def test_truck_high_parallax(self):
        move, _ = decide(_samples(tx=5.0, ty=0.1, parallax_ratio=0.4), DIAG)
        assert move is CameraMove.TRUCK

    def test_tilt_and_pedestal(self):
        move, _ = decide(_samples(tx=0.1, ty=5.0, parallax_ratio=0.05), DIAG)
        assert move is CameraMove.TILT
        move, _ = decide(_samples(tx=0.1, ty=5.0, parallax_ratio=0.5), DIAG)
        assert move is CameraMove.PEDESTAL

    def test_translation_at_floor_is_not_static(self):
        move, _ = decide(_samples(tx=2.0, ty=0.0), DIAG)
        assert move is CameraMove.PAN

    def test_diagonal_translation_is_unknown(self):
        move, conf = decide(_samples(tx=3.0, ty=3.0), DIAG)
        assert (move, conf) == (CameraMove.UNKNOWN, 0.0)

    def test_scale_sign_disagreement_falls_through(self):
        samples = [
            PairSample(valid=True, scale=1.01 if i % 2 else 0.99) for i in range(6)
        ]
        move, conf = decide(samples, DIAG)
        assert (move, conf) == (CameraMove.UNKNOWN, 0.0)

    def test_pan_confidence_counts_sign_agreement(self):
        samples = _samples(5, tx=5.0, ty=0.1) + [PairSample(valid=True, tx=-5.0)]
        move, conf = decide(samples, DIAG)
        assert move is CameraMove.PAN
        assert conf == pytest.approx(5 / 6)

    def test_no_valid_samples_is_unknown(self):
        assert decide([PairSample(valid=False)], DIAG) == (CameraMove.UNKNOWN, 0.0)
        assert decide([], DIAG) == (CameraMove.UNKNOWN, 0.0)

    def test_invalid_samples_are_ignored(self):
        samples = _samples(4, tx=5.0, ty=0.1) + [
            PairSample(valid=False, tx=-99.0, ty=99.0)
        ]
        move, _ = decide(samples, DIAG)
        assert move is CameraMove.PAN


class TestMeasurePair:
    def test_identical_frames_measure_still(self):
        plane = value_noise(np.random.default_rng(70), 192, 108)
        sample = measure_pair(plane, plane, CameraMoveConfig(), seed=0)
        assert sample.valid
        assert abs(sample.scale - 1.0) < 1e-3
        assert sample.t_norm < 0.1

    def test_decorrelated_frames_are_invalid(self):
        rng = np.random.default_rng(71)
        a = rng.random((108, 192))
        b = rng.random((108, 192))
        sample = measure_pair(a, b, CameraMoveConfig(), seed=0)
        assert not sample.valid


class TestClassifyClip:
    @pytest.mark.parametrize(
        "move",
        [
            CameraMove.STATIC,
            CameraMove.PAN,
            CameraMove.TILT,
            CameraMove.TRUCK,
            CameraMove.PEDESTAL,
            CameraMove.ZOOM,
            CameraMove.DOLLY,
            CameraMove.HANDHELD,
        ],
    )
    def test_each_scripted_move_classified(self, move):
        i = list(CameraMove).index(move)
        frames = move_clip(move, np.random.default_rng(7 + i))
        result = classify_camera_move(frames, seed=i)
        assert result.move is move
        assert result.confidence > 0.0
        assert result.n_valid > 0

    def test_too_few_frames_is_unknown(self):
        frames = move_clip(CameraMove.STATIC, np.random.default_rng(72), n_frames=2)
        result = classify_camera_move(frames)
        assert result.move is CameraMove.UNKNOWN
        assert result.samples == ()
