"""Patient visualization engine: DICOM and mesh loading, volume rendering, session protocol."""

import json

from ._core import (
    ImhotepError,
    Scene,
    Session,
    load_dicom_series,
    parse_frame,
    validate_patient_directory,
)

__all__ = [
    "ImhotepError",
    "Scene",
    "Session",
    "command",
    "load_dicom_series",
    "parse_frame",
    "validate_patient_directory",
]


def command(id, type, **payload):
    """JSON text for one session command."""
    return json.dumps({"id": id, "type": type, "payload": payload})
