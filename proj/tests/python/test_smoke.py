import json

import numpy as np
import pytest

import imhotep

ORGANS = ["Liver", "Kidney", "Tumor"]


def test_load_dicom_series(patient_dir):
    vol = imhotep.load_dicom_series(patient_dir / "dicom")
    assert vol["voxels"].shape == (16, 16, 16)
    assert vol["voxels"].dtype == np.int16
    assert len(vol["spacing"]) == 3
    assert vol["orientation"].shape == (3, 3)


def test_missing_series_raises_with_code(tmp_path):
    with pytest.raises(imhotep.ImhotepError) as info:
        imhotep.load_dicom_series(tmp_path / "nope")
    assert info.value.code == "InvalidArgument"


def test_validate_patient_directory(patient_dir):
    reports = imhotep.validate_patient_directory(patient_dir)
    assert reports
    assert all(ok for _, ok, _ in reports)


def test_scene_render_and_pick(patient_dir):
    scene = imhotep.Scene(48, 32)
    scene.load(patient_dir)
    assert scene.loaded and scene.has_volume
    assert [o["name"] for o in scene.organs] == ORGANS

    img = scene.render(workers=1)
    assert img.shape == (32, 48, 4) and img.dtype == np.uint8
    assert img[..., :3].any()
    assert np.array_equal(img, scene.render(workers=3))

    left, right = scene.render(stereo=True, ipd=64.0)
    assert left.shape == right.shape == (32, 48, 4)
    same_left, same_right = scene.render(stereo=True, ipd=0.0)
    assert np.array_equal(same_left, same_right)

    scene.set_view("sagittal")
    assert scene.view == "sagittal"
    scene.orbit(yaw=10.0)
    assert scene.view == "custom"

    scene.set_organ_opacity("Kidney", 0.25)
    assert scene.organs[1]["opacity"] == pytest.approx(0.25)
    with pytest.raises(imhotep.ImhotepError):
        scene.set_organ_opacity("Spleen", 0.5)

    n = len(scene.annotations)
    aid = scene.add_annotation([0.0, 0.0, 0.0], [0.0, 0.0, 1.0], "note")
    assert len(scene.annotations) == n + 1
    assert scene.annotations[-1]["id"] == aid

    assert scene.pick([0.0, 0.0, 1e6], [0.0, 0.0, 1.0]) is None


def test_session_protocol(patient_dir):
    s = imhotep.Session(40, 30, workers=2)
    replies = s.handle(imhotep.command(1, "load_patient", path=str(patient_dir)))
    assert json.loads(replies[0])["type"] == "ack"
    loaded = [json.loads(r) for r in s.drain() if isinstance(r, str)]
    assert any(r["type"] == "patient_loaded" and r["id"] == 1 for r in loaded)
    assert [o["name"] for o in s.scene["organs"]] == ORGANS

    out = s.handle(imhotep.command(2, "set_view", view="coronal")) + s.drain()
    texts = [json.loads(r) for r in out if isinstance(r, str)]
    frames = [imhotep.parse_frame(r) for r in out if isinstance(r, bytes)]
    assert texts[0] == {"id": 2, "type": "ack", "payload": texts[0]["payload"]}
    assert frames and frames[0]["pixels"].shape == (30, 40, 4)
    assert frames[0]["format"] == "raw"

    err = json.loads(s.handle(imhotep.command(3, "bogus"))[0])
    assert err["type"] == "error" and err["id"] == 3


def test_parse_frame_rejects_garbage():
    with pytest.raises(imhotep.ImhotepError):
        imhotep.parse_frame(b"not a frame")
