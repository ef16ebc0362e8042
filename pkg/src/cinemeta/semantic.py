"""Framing, cast, time-of-day, scene, and prop annotators.

Every classifier here is a pure function over detector results so it can be
unit-tested with hand-written detections. Orchestration (sampling frames,
calling the detector bridge, assembling AnnotatedValues) lives in
annotate_clip at the bottom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .imaging import Image, rgb_to_hsv
from .model import (
    ActorPID,
    AnnotatedValue,
    Provenance,
    SceneType,
    SemanticFields,
    ShotType,
    TimeOfDay,
)

_SHOT_ORDER = (
    ShotType.FULL,
    ShotType.MEDIUM_FULL,
    ShotType.MEDIUM,
    ShotType.CLOSE,
    ShotType.CLOSE_UP,
)


@dataclass(frozen=True)
class SemanticConfig:
    # framing: face height / frame height breakpoints, broadest to tightest
    face_breaks: tuple[float, float, float, float] = (0.05, 0.10, 0.20, 0.35)
    # fallback: body height / frame height; > 1 means the body overflows frame
    body_breaks: tuple[float, float, float, float] = (1.0, 1.4, 2.2, 3.5)
    body_confidence_damp: float = 0.5
    min_face_confidence: float = 0.2
    actor_threshold: float = 0.7
    objects_min_share: float = 0.3
    night_value: float = 0.25
    day_value: float = 0.40
    blue_red_ratio: float = 1.15
    inside_damp: float = 0.7


@dataclass(frozen=True)
class FaceBox:
    x: float
    y: float
    w: float
    h: float
    confidence: float = 1.0


@dataclass(frozen=True)
class FrameDetections:
    """Detector results for one sampled frame (absent pieces stay None)."""

    faces: tuple[FaceBox, ...] = ()
    embeddings: tuple[np.ndarray, ...] = ()  # one per face, same order
    body_height_px: float | None = None
    body_confidence: float = 0.0
    scene_labels: tuple[tuple[str, float], ...] = ()  # place names
    scene_type: tuple[str, float] | None = None  # ("Inside"|"Outside", conf)
    objects: tuple[tuple[str, float], ...] = ()


def _bucket(ratio: float, breaks: Sequence[float]) -> ShotType:
    idx = 0
    for b in breaks:
        if ratio >= b:
            idx += 1
    return _SHOT_ORDER[idx]


def shot_from_face(face_height_ratio: float, config: SemanticConfig | None = None) -> ShotType:
    """Framing from the dominant face: bigger face, tighter shot."""
    cfg = config or SemanticConfig()
    return _bucket(face_height_ratio, cfg.face_breaks)


def shot_from_body(body_height_ratio: float, config: SemanticConfig | None = None) -> ShotType:
    """Framing from apparent body height when no face is usable."""
    cfg = config or SemanticConfig()
    return _bucket(body_height_ratio, cfg.body_breaks)


def frame_shot_vote(
    det: FrameDetections, frame_height: int, config: SemanticConfig | None = None
) -> tuple[ShotType, float] | None:
    """One frame's framing vote, face-first with the body fallback."""

    cfg = config or SemanticConfig()
    usable = [f for f in det.faces if f.confidence >= cfg.min_face_confidence]
    if usable:
        top = max(usable, key=lambda f: f.h)
        return shot_from_face(top.h / frame_height, cfg), top.confidence
    if det.body_height_px is not None and det.body_confidence > 0.0:
        return (
            shot_from_body(det.body_height_px / frame_height, cfg),
            cfg.body_confidence_damp * det.body_confidence,
        )
    return None


def vote(pairs: Sequence[tuple[object, float]]) -> tuple[object, float] | None:
    """Confidence-weighted majority vote.

    Returns (winner, share) where share is the winner's weight fraction.
    Ties break toward the value seen first, keeping results stable under
    frame order.
    """

    if not pairs:
        return None
    weights: dict[object, float] = {}
    order: list[object] = []
    for value, conf in pairs:
        if value not in weights:
            weights[value] = 0.0
            order.append(value)
        weights[value] += max(conf, 0.0)
    total = sum(weights.values())
    if total <= 0.0:
        return None
    winner = max(order, key=lambda v: weights[v])
    return winner, weights[winner] / total


def annotate_shot_type(
    detections: Sequence[FrameDetections],
    frame_height: int,
    config: SemanticConfig | None = None,
) -> AnnotatedValue | None:
    cfg = config or SemanticConfig()
    votes = []
    for det in detections:
        v = frame_shot_vote(det, frame_height, cfg)
        if v is not None:
            votes.append(v)
    result = vote(votes)
    if result is None:
        return None
    winner, share = result
    winner_confs = [c for v, c in votes if v == winner]
    conf = share * float(np.mean(winner_confs))
    return AnnotatedValue(winner, min(conf, 1.0), Provenance.ANNOTATOR)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def match_actor(
    embedding: np.ndarray,
    gallery: Sequence[tuple[str, np.ndarray]],
    threshold: float,
) -> tuple[str, float] | None:
    """Best gallery identity at or above the similarity threshold.

    Exact similarity ties keep the earliest gallery entry, so a stable
    gallery file gives stable assignments.
    """

    best: tuple[str, float] | None = None
    for pid, ref in gallery:
        if np.shape(embedding) != np.shape(ref):
            continue  # different embedding family (e.g. after a backend swap)
        sim = cosine_similarity(embedding, ref)
        if best is None or sim > best[1]:
            best = (pid, sim)
    if best is None or best[1] < threshold:
        return None
    return best


def annotate_actors(
    detections: Sequence[FrameDetections],
    gallery: Sequence[tuple[str, np.ndarray]],
    config: SemanticConfig | None = None,
) -> tuple[AnnotatedValue, ...]:
    """Union of gallery identities seen across the sampled frames.

    Each matched pid is reported once with its best similarity as the
    confidence, ordered by gallery position.
    """

    cfg = config or SemanticConfig()
    best_sim: dict[str, float] = {}
    for det in detections:
        for emb in det.embeddings:
            hit = match_actor(emb, gallery, cfg.actor_threshold)
            if hit is None:
                continue
            pid, sim = hit
            if sim > best_sim.get(pid, -1.0):
                best_sim[pid] = sim
    ordered = [pid for pid, _ in gallery if pid in best_sim]
    return tuple(
        AnnotatedValue(ActorPID(pid), min(best_sim[pid], 1.0), Provenance.ANNOTATOR)
        for pid in ordered
    )


def frame_time_vote(img: Image, config: SemanticConfig | None = None) -> TimeOfDay:
    """Day/night tendency of one frame.

    Dark frames read night and bright frames day straight from mean HSV
    value; the ambiguous middle band falls back to color temperature, where
    a blue-shifted cast (moonlight/practical night grade) reads night.
    """

    cfg = config or SemanticConfig()
    hsv = rgb_to_hsv(img.data)
    mean_v = float(hsv[..., 2].mean())
    if mean_v < cfg.night_value:
        return TimeOfDay.NIGHT
    if mean_v >= cfg.day_value:
        return TimeOfDay.DAY
    mean_r = float(img.data[:, :, 0].mean())
    mean_b = float(img.data[:, :, 2].mean())
    if mean_b > cfg.blue_red_ratio * mean_r:
        return TimeOfDay.NIGHT
    return TimeOfDay.DAY


def annotate_time(
    frames: Sequence[Image],
    scene_type: SceneType | None = None,
    config: SemanticConfig | None = None,
) -> AnnotatedValue | None:
    """Majority day/night vote, damped when the scene is interior.

    Indoor lighting says little about the hour, so an Inside scene keeps the
    vote but carries reduced confidence.
    """

    cfg = config or SemanticConfig()
    if not frames:
        return None
    votes = [(frame_time_vote(f, cfg), 1.0) for f in frames]
    winner, share = vote(votes)
    conf = share
    if scene_type is SceneType.INSIDE:
        conf *= cfg.inside_damp
    return AnnotatedValue(winner, min(conf, 1.0), Provenance.ANNOTATOR)


def annotate_scene(
    detections: Sequence[FrameDetections],
    config: SemanticConfig | None = None,
) -> tuple[AnnotatedValue | None, AnnotatedValue | None]:
    """(scene_type, places) from the scene classifier's per-frame output."""

    type_votes = []
    place_weight: dict[str, float] = {}
    place_order: list[str] = []
    for det in detections:
        if det.scene_type is not None:
            name, conf = det.scene_type
            try:
                value = SceneType(name.capitalize())
            except ValueError:
                continue
            type_votes.append((value, conf))
        for label, conf in det.scene_labels:
            if label not in place_weight:
                place_weight[label] = 0.0
                place_order.append(label)
            place_weight[label] += max(conf, 0.0)

    scene_av = None
    voted = vote(type_votes)
    if voted is not None:
        winner, share = voted
        winner_confs = [c for v, c in type_votes if v == winner]
        scene_av = AnnotatedValue(
            winner, min(share * float(np.mean(winner_confs)), 1.0), Provenance.ANNOTATOR
        )

    places_av = None
    if place_weight:
        n = max(len(detections), 1)
        top = max(place_order, key=lambda k: place_weight[k])
        places_av = AnnotatedValue(
            top, min(place_weight[top] / n, 1.0), Provenance.ANNOTATOR
        )
    return scene_av, places_av


def annotate_objects(
    detections: Sequence[FrameDetections],
    config: SemanticConfig | None = None,
) -> tuple[AnnotatedValue, ...]:
    """Prop labels persisting across enough of the clip to matter.

    A label must be detected in at least objects_min_share of the sampled
    frames; its confidence is the mean of its strongest per-frame scores.
    """

    cfg = config or SemanticConfig()
    if not detections:
        return ()
    seen: dict[str, list[float]] = {}
    order: list[str] = []
    for det in detections:
        per_frame_best: dict[str, float] = {}
        for label, conf in det.objects:
            if conf > per_frame_best.get(label, -1.0):
                per_frame_best[label] = conf
        for label, conf in per_frame_best.items():
            if label not in seen:
                seen[label] = []
                order.append(label)
            seen[label].append(conf)
    n = len(detections)
    out = []
    for label in order:
        confs = seen[label]
        if len(confs) / n < cfg.objects_min_share:
            continue
        out.append(
            AnnotatedValue(label, min(float(np.mean(confs)), 1.0), Provenance.ANNOTATOR)
        )
    out.sort(key=lambda av: (-av.confidence, av.value))
    return tuple(out)


# --- orchestration ----------------------------------------------------------


def parse_detections(
    face_detect: Sequence[Mapping] | None = None,
    face_embed: Sequence[Mapping] | None = None,
    object_detect: Sequence[Mapping] | None = None,
    scene_classify: Mapping | None = None,
    pose_height: Mapping | None = None,
) -> FrameDetections:
    """Normalize raw detector results into FrameDetections.

    Shapes follow the published result schemas: face_detect and
    object_detect are lists, scene_classify carries one scene_type and one
    place, pose_height reports the person's apparent height in pixels.
    """

    faces: list[FaceBox] = []
    if face_detect:
        for f in face_detect:
            x, y, w, h = (float(v) for v in f["box"])
            faces.append(FaceBox(x, y, w, h, float(f.get("confidence", 1.0))))
    embeddings: list[np.ndarray] = []
    if face_embed:
        for r in face_embed:
            embeddings.append(np.asarray(r["embedding"], dtype=np.float64))
    body_px = None
    body_conf = 0.0
    if pose_height and "height_px" in pose_height:
        body_px = float(pose_height["height_px"])
        body_conf = float(pose_height.get("confidence", 1.0))
    scene_labels: tuple[tuple[str, float], ...] = ()
    scene_type = None
    if scene_classify:
        conf = float(scene_classify.get("confidence", 1.0))
        if "place" in scene_classify:
            scene_labels = ((str(scene_classify["place"]), conf),)
        if "scene_type" in scene_classify:
            scene_type = (str(scene_classify["scene_type"]), conf)
    objects: tuple[tuple[str, float], ...] = ()
    if object_detect:
        objects = tuple(
            (str(d["category"]), float(d.get("confidence", 1.0)))
            for d in object_detect
        )
    return FrameDetections(
        faces=tuple(faces),
        embeddings=tuple(embeddings),
        body_height_px=body_px,
        body_confidence=body_conf,
        scene_labels=scene_labels,
        scene_type=scene_type,
        objects=objects,
    )


@dataclass(frozen=True)
class ClipAnnotations:
    shot_type: AnnotatedValue | None = None
    actors: tuple[AnnotatedValue, ...] = ()
    time: AnnotatedValue | None = None
    scene_type: AnnotatedValue | None = None
    places: AnnotatedValue | None = None
    objects: tuple[AnnotatedValue, ...] = ()

    def merge_into(self, semantic: SemanticFields) -> SemanticFields:
        """Fill the annotator-owned fields of a SemanticFields."""
        from dataclasses import replace

        return replace(
            semantic,
            shot_type=self.shot_type,
            actors=self.actors,
            time=self.time,
            scene_type=self.scene_type,
            places=self.places,
            objects=self.objects,
        )


def annotate_clip(
    frames: Sequence[Image],
    detections: Sequence[FrameDetections],
    gallery: Sequence[tuple[str, np.ndarray]] = (),
    config: SemanticConfig | None = None,
) -> ClipAnnotations:
    """Run every annotator over aligned frames and detections.

    frames[i] and detections[i] describe the same sampled frame. Annotators
    that find nothing leave their field None/empty rather than guessing.
    """

    cfg = config or SemanticConfig()
    if len(frames) != len(detections):
        raise ValueError("frames and detections must align")
    frame_height = frames[0].height if frames else 0
    scene_av, places_av = annotate_scene(detections, cfg)
    scene_value = scene_av.value if scene_av is not None else None
    return ClipAnnotations(
        shot_type=annotate_shot_type(detections, frame_height, cfg) if frames else None,
        actors=annotate_actors(detections, gallery, cfg),
        time=annotate_time(frames, scene_value, cfg),
        scene_type=scene_av,
        places=places_av,
        objects=annotate_objects(detections, cfg),
    )
