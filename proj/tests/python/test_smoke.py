import os
import pathlib

import numpy as np
import pytest

import dermaprep

SOURCE = pathlib.Path(os.environ.get("DERMAPREP_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))


def test_shape_inference():
    assert dermaprep.infer_conv(380, 3) == 378
    assert dermaprep.infer_conv(44, 3, dilation=2) == 40
    assert dermaprep.infer_transconv(4, 4, stride=2, padding=1) == 8
    with pytest.raises(dermaprep.ShapeError):
        dermaprep.infer_conv(2, 5)


def test_verify_arch():
    r = dermaprep.verify_arch(str(SOURCE / "arch" / "table2_disc.arch"))
    assert not r["ok"]
    assert r["mismatched_rows"] == 1
    assert (512, 7, 7, False) in r["networks"][0]["rows"]
    with pytest.raises(dermaprep.IoError):
        dermaprep.verify_arch(str(SOURCE / "arch" / "missing.arch"))


def test_stack_seven():
    st = dermaprep.stack_seven(np.full((50, 70, 3), 0.5, dtype=np.float32))
    assert st.shape == (380, 380, 7)
    assert np.all(st[..., [0, 1, 2, 5]] == 0.0)
    with pytest.raises(dermaprep.InvalidArgument):
        dermaprep.stack_seven(np.zeros((8, 8, 2), dtype=np.float32))


def test_masks():
    ring = np.zeros((21, 21), dtype=bool)
    yy, xx = np.mgrid[:21, :21]
    d2 = (xx - 10) ** 2 + (yy - 10) ** 2
    ring[(d2 <= 64) & (d2 > 9)] = True
    filled = dermaprep.fill_holes(ring)
    assert filled.dtype == bool
    assert np.array_equal(filled, d2 <= 64)
    assert dermaprep.jaccard(ring, filled) == pytest.approx(ring.sum() / filled.sum())
    closed = dermaprep.close_disk(ring, 2)
    assert np.array_equal(dermaprep.close_disk(closed, 2), closed)


def test_purify_line():
    img = np.ones((64, 64, 3), dtype=np.float32)
    img[30:32, :, :] = 0.1
    restored, occ = dermaprep.purify(img, np.zeros((64, 64), dtype=bool))
    assert occ[30, 10:54].all()
    assert restored[30, 20:44].min() > 0.9
    assert np.array_equal(restored[~occ], img[~occ])


def test_metrics():
    assert dermaprep.roc_auc([0.9, 0.8, 0.3, 0.1], [1, 0, 1, 0]) == pytest.approx(0.75)
    r = dermaprep.evaluate(str(SOURCE / "tests" / "data" / "predictions_fixture.csv"))
    assert f"{r['auc']['melanoma']:.3f}" == "0.880"
    assert f"{r['mean_auc']:.3f}" == "0.915"
    assert r["accuracy"] == pytest.approx(0.816)
    assert dermaprep.mse(np.zeros((4, 4, 3)), np.ones((4, 4, 3))) == 1.0
