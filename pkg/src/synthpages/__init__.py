"""Synthetic scholarly-page corpora with nine-class layout ground truth."""

__version__ = "0.1.0"

from .labels import CLASS_LABELS, LABEL_TO_ID  # noqa: F401
from .sampler import BBox, RngSeed  # noqa: F401
from .style import (  # noqa: F401
    Range,
    StyleProfile,
    bundled_profile,
    load_style_profile,
    merge_profiles,
    save_style_profile,
)
