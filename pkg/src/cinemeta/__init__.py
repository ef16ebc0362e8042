"""cinemeta: shot metadata extraction and interchange for film dailies.

The package turns graded or raw frame sequences plus a clip manifest into
reviewed-quality metadata records (scene/shot/take from the slate, camera
move from sparse flow, framing and cast from pluggable detectors) and writes
them to ALE, CSV, or JSON sidecars.
"""

from .model import (
    AnnotatedValue,
    BasicMetadata,
    CameraMove,
    ClipId,
    MetadataRecord,
    Provenance,
    SceneType,
    SemanticFields,
    ShotType,
    Timecode,
    TimeOfDay,
)
from .profile import DEFAULT_PRECEDENCE, UserProfile, load_profile

__all__ = [
    "AnnotatedValue",
    "BasicMetadata",
    "CameraMove",
    "ClipId",
    "MetadataRecord",
    "Provenance",
    "SceneType",
    "SemanticFields",
    "ShotType",
    "Timecode",
    "TimeOfDay",
    "UserProfile",
    "DEFAULT_PRECEDENCE",
    "load_profile",
]

__version__ = "0.1.0"
