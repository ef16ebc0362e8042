"""Detector bridge: stdio protocol, fixture backend, schema conformance."""

import io
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from cinemeta.bridge import (
    NO_FIXTURE,
    UNSUPPORTED_KIND,
    BackendExitError,
    BridgeTimeoutError,
    DetectorClient,
    DetectorError,
    FixtureConnection,
    ProtocolError,
    fixture_key,
    pgm_base64_to_plane,
    plane_to_pgm_base64,
    serve_fixtures,
)

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "schemas"


def _schema(name):
    return json.loads((SCHEMA_DIR / name).read_text())


def _validate(instance, schema):
    jsonschema.Draft202012Validator(schema).validate(instance)


class TestPgmEncoding:
    def test_round_trip_exact_on_quantized_plane(self):
        rng = np.random.default_rng(0)
        plane = rng.integers(0, 256, size=(12, 16)) / 255.0
        assert np.array_equal(pgm_base64_to_plane(plane_to_pgm_base64(plane)), plane)

    def test_out_of_range_values_clipped(self):
        plane = np.array([[1.5, -0.5]])
        out = pgm_base64_to_plane(plane_to_pgm_base64(plane))
        assert out[0, 0] == 1.0
        assert out[0, 1] == 0.0


def test_fixture_key_prefers_region():
    assert fixture_key(7, {"region": "scene_num"}) == "scene_num"
    assert fixture_key(7, {}) == "7"


@pytest.fixture()
def fixture_root(tmp_path):
    root = tmp_path / "fixtures"
    ocr_dir = root / "A001_C001" / "ocr"
    ocr_dir.mkdir(parents=True)
    (ocr_dir / "scene_num.json").write_text('{"text": "12", "confidence": 0.93}')
    fd_dir = root / "A001_C001" / "face_detect"
    fd_dir.mkdir(parents=True)
    (fd_dir / "3.json").write_text('[{"box": [4, 5, 20, 24], "confidence": 0.8}]')
    return root


class TestFixtureConnection:
    def test_missing_root_rejected(self, tmp_path):
        with pytest.raises(ProtocolError, match="does not exist"):
            FixtureConnection(tmp_path / "absent")

    def test_region_keyed_lookup(self, fixture_root):
        with FixtureConnection(fixture_root) as conn:
            result = conn.request(
                "ocr", "A001_C001", 3, {"region": "scene_num", "image": "aGk="}
            )
        assert result == {"text": "12", "confidence": 0.93}

    def test_frame_keyed_lookup(self, fixture_root):
        with FixtureConnection(fixture_root) as conn:
            result = conn.request("face_detect", "A001_C001", 3)
        assert result[0]["box"] == [4, 5, 20, 24]

    def test_missing_fixture(self, fixture_root):
        with FixtureConnection(fixture_root) as conn:
            with pytest.raises(DetectorError, match=NO_FIXTURE):
                conn.request("ocr", "A001_C001", 99)

    def test_unsupported_kind(self, fixture_root):
        with FixtureConnection(fixture_root) as conn:
            with pytest.raises(DetectorError, match=UNSUPPORTED_KIND):
                conn.request("emotion_detect", "A001_C001", 0)

    def test_malformed_fixture_names_path(self, fixture_root):
        bad = fixture_root / "A001_C001" / "ocr" / "shot_num.json"
        bad.write_text("{nope")
        with FixtureConnection(fixture_root) as conn:
            with pytest.raises(ProtocolError, match="shot_num.json"):
                conn.request("ocr", "A001_C001", 0, {"region": "shot_num"})


def _serve_cmd(root):
    return [
        sys.executable,
        "-m",
        "cinemeta.bridge",
        "--serve",
        "--fixture-root",
        str(root),
    ]


class TestDetectorClient:
    def test_request_against_live_backend(self, fixture_root):
        with DetectorClient(_serve_cmd(fixture_root)) as client:
            result = client.request("ocr", "A001_C001", 3, {"region": "scene_num"})
            assert result == {"text": "12", "confidence": 0.93}
            # second request exercises the incrementing id path
            faces = client.request("face_detect", "A001_C001", 3)
            assert faces[0]["confidence"] == 0.8

    def test_backend_error_surfaces(self, fixture_root):
        with DetectorClient(_serve_cmd(fixture_root)) as client:
            with pytest.raises(DetectorError, match=NO_FIXTURE):
                client.request("ocr", "A001_C001", 42)
            with pytest.raises(DetectorError, match=UNSUPPORTED_KIND):
                client.request("emotion_detect", "A001_C001", 0)

    def test_backend_that_exits_immediately(self):
        client = DetectorClient([sys.executable, "-c", "pass"])
        try:
            with pytest.raises(BackendExitError):
                client.request("ocr", "clip", 0)
        finally:
            client.close()

    def test_non_json_response(self):
        prog = "import sys; sys.stdin.readline(); print('not json'); sys.stdout.flush(); sys.stdin.read()"
        with DetectorClient([sys.executable, "-c", prog]) as client:
            with pytest.raises(ProtocolError, match="not JSON"):
                client.request("ocr", "clip", 0)

    def test_mismatched_response_id(self):
        prog = (
            "import sys, json\n"
            "sys.stdin.readline()\n"
            "print(json.dumps({'id': 'wrong', 'ok': True, 'result': {}}))\n"
            "sys.stdout.flush()\n"
            "sys.stdin.read()\n"
        )
        with DetectorClient([sys.executable, "-c", prog]) as client:
            with pytest.raises(ProtocolError, match="response id"):
                client.request("ocr", "clip", 0)

    def test_ok_without_result(self):
        prog = (
            "import sys, json\n"
            "sys.stdin.readline()\n"
            "print(json.dumps({'id': '0', 'ok': True}))\n"
            "sys.stdout.flush()\n"
            "sys.stdin.read()\n"
        )
        with DetectorClient([sys.executable, "-c", prog]) as client:
            with pytest.raises(ProtocolError, match="without a result"):
                client.request("ocr", "clip", 0)

    def test_timeout_on_silent_backend(self):
        prog = "import sys; sys.stdin.readline(); sys.stdin.read()"
        with DetectorClient([sys.executable, "-c", prog], timeout=0.3) as client:
            with pytest.raises(BridgeTimeoutError):
                client.request("ocr", "clip", 0)


class TestServeLoop:
    def _run(self, root, request_lines):
        stdout = io.StringIO()
        serve_fixtures(root, stdin=io.StringIO("".join(request_lines)), stdout=stdout)
        out = stdout.getvalue()
        assert out.endswith("\n")
        return [json.loads(line) for line in out.splitlines()]

    def test_blank_lines_skipped(self, fixture_root):
        req = json.dumps(
            {
                "id": "1",
                "kind": "ocr",
                "clip": "A001_C001",
                "frame": 0,
                "payload": {"region": "scene_num"},
            }
        )
        replies = self._run(fixture_root, ["\n", req + "\n", "\n"])
        assert len(replies) == 1
        assert replies[0] == {
            "id": "1",
            "ok": True,
            "result": {"text": "12", "confidence": 0.93},
        }

    def test_unparseable_request_gets_null_id_error(self, fixture_root):
        replies = self._run(fixture_root, ["{nope\n"])
        assert replies[0]["id"] is None
        assert replies[0]["ok"] is False
        assert "bad request" in replies[0]["error"]

    def test_request_missing_kind(self, fixture_root):
        replies = self._run(fixture_root, ['{"id": "4"}\n'])
        assert replies[0] == {"id": "4", "ok": False, "error": "bad request: 'kind'"}


class TestSchemaConformance:
    """Every line of a bridge session validates against the wire schemas."""

    def test_transcript_validates(self, fixture_root):
        request_schema = _schema("detector_request.schema.json")
        response_schema = _schema("detector_response.schema.json")
        requests = [
            {
                "id": "1",
                "kind": "ocr",
                "clip": "A001_C001",
                "frame": 0,
                "payload": {"region": "scene_num", "image": "aGk="},
            },
            {
                "id": "2",
                "kind": "face_detect",
                "clip": "A001_C001",
                "frame": 3,
                "payload": {},
            },
            {
                "id": "3",
                "kind": "ocr",
                "clip": "A001_C001",
                "frame": 99,
                "payload": {},
            },
        ]
        for req in requests:
            _validate(req, request_schema)
        stdout = io.StringIO()
        serve_fixtures(
            fixture_root,
            stdin=io.StringIO("".join(json.dumps(r) + "\n" for r in requests)),
            stdout=stdout,
        )
        replies = [json.loads(line) for line in stdout.getvalue().splitlines()]
        assert len(replies) == len(requests)
        for req, reply in zip(requests, replies):
            _validate(reply, response_schema)
            assert reply["id"] == req["id"]
            if reply["ok"]:
                _validate(reply["result"], _schema(f"results/{req['kind']}.schema.json"))
        assert [r["ok"] for r in replies] == [True, True, False]

    def test_error_response_shape_excludes_result(self):
        response_schema = _schema("detector_response.schema.json")
        with pytest.raises(jsonschema.ValidationError):
            _validate({"id": "1", "ok": False}, response_schema)
        with pytest.raises(jsonschema.ValidationError):
            _validate(
                {"id": "1", "ok": True, "result": {}, "error": "x"}, response_schema
            )

    def test_request_schema_rejects_unknown_kind(self):
        request_schema = _schema("detector_request.schema.json")
        with pytest.raises(jsonschema.ValidationError):
            _validate(
                {
                    "id": "1",
                    "kind": "emotion_detect",
                    "clip": "c",
                    "frame": 0,
                    "payload": {},
                },
                request_schema,
            )
