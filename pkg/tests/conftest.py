import pytest

from synthpages.evaluation import Detection, PredictionSet
from synthpages.labels import label_id
from synthpages.style import bundled_profile


@pytest.fixture(scope="session")
def acl():
    return bundled_profile("acl")


@pytest.fixture(scope="session")
def vis():
    return bundled_profile("vis")


@pytest.fixture(scope="session")
def cs150():
    return bundled_profile("cs150")


def make_manifest(images, annotations):
    """Minimal valid manifest from (id, w, h, page_kind) image tuples and
    (id, image_id, label, bbox) annotation tuples."""
    from synthpages.corpus import empty_manifest
    m = empty_manifest("test", 0)
    for img_id, w, h, kind in images:
        m["images"].append({"id": img_id, "file_name": f"p{img_id}.png",
                            "width": w, "height": h, "page_kind": kind,
                            "stream_id": img_id, "dropped_elements": 0})
    for ann_id, img_id, label, bbox in annotations:
        m["annotations"].append({"id": ann_id, "image_id": img_id,
                                 "category_id": label_id(label),
                                 "bbox": list(bbox),
                                 "area": bbox[2] * bbox[3], "iscrowd": 0})
    return m


def gt_as_predictions(manifest, score=0.9):
    names = {c["id"]: c["name"] for c in manifest["categories"]}
    dets = [Detection(a["image_id"], names[a["category_id"]],
                      tuple(a["bbox"]), score)
            for a in manifest["annotations"]]
    return PredictionSet(dets, space="pixel")
