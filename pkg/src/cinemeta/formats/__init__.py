"""File format ETL: ALE, CSV, JSON sidecar/catalog, manifests, PGM/PPM."""

from .ale import (
    AleDocument,
    AleError,
    MissingSectionError,
    RowArityError,
    parse_ale,
    write_ale,
    write_ale_document,
)
from .cells import parse_cell, render_cell
from .csv_io import CsvError, CsvSyntaxError, HeaderMismatchError, parse_csv, write_csv
from .manifest import ClipManifest, manifest_to_dict, parse_manifest
from .raster import (
    BadMagicError,
    RasterError,
    RasterFile,
    TruncatedPayloadError,
    UnsupportedMaxValueError,
    raster_from_bytes,
    raster_to_bytes,
    read_frame,
    read_raster,
    write_frame,
    write_raster,
)
from .sidecar import (
    BadTypeError,
    DuplicateClipIdError,
    MissingKeyError,
    SidecarError,
    dumps_record,
    loads_record,
    read_catalog,
    record_from_dict,
    record_to_dict,
    write_catalog,
)

__all__ = [
    "AleDocument",
    "AleError",
    "BadMagicError",
    "BadTypeError",
    "ClipManifest",
    "CsvError",
    "CsvSyntaxError",
    "DuplicateClipIdError",
    "HeaderMismatchError",
    "MissingKeyError",
    "MissingSectionError",
    "RasterError",
    "RasterFile",
    "RowArityError",
    "SidecarError",
    "TruncatedPayloadError",
    "UnsupportedMaxValueError",
    "dumps_record",
    "loads_record",
    "manifest_to_dict",
    "parse_ale",
    "parse_cell",
    "parse_csv",
    "parse_manifest",
    "read_catalog",
    "read_frame",
    "raster_from_bytes",
    "raster_to_bytes",
    "read_raster",
    "record_from_dict",
    "record_to_dict",
    "render_cell",
    "write_ale",
    "write_ale_document",
    "write_catalog",
    "write_csv",
    "write_frame",
    "write_raster",
]
