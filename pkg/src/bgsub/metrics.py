"""Pixel-level scoring of predicted class masks against ground truth."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, LengthMismatch
from .gmm import FOREGROUND
from .shadow import SHADOW

# Background is the complement class; only the two detection targets get scored.
CLASS_NAMES = {FOREGROUND: "foreground", SHADOW: "shadow"}


def _ratio(num: int, denom: int) -> float | None:
    # 0/0 stays undefined rather than pretending to be perfect or zero.
    if denom == 0:
        return None
    return num / denom


def score(
    pred: list[np.ndarray], truth: list[np.ndarray], warmup: int = 0
) -> dict:
    """Pooled per-class precision/recall/F1 over frames from `warmup` on.

    pred and truth are equal-length sequences of (h, w) uint8 class maps
    (0 background, 128 shadow, 255 foreground). Counts are pooled over
    all scored pixels before the ratios are taken. Undefined ratios come
    back as None.
    """
    if warmup < 0:
        raise ValueError(f"warmup must be >= 0, got {warmup}")
    if len(pred) != len(truth):
        raise LengthMismatch(f"{len(pred)} predictions vs {len(truth)} truth frames")
    counts = {name: {"tp": 0, "fp": 0, "fn": 0} for name in CLASS_NAMES.values()}
    scored = 0
    for i, (p, t) in enumerate(zip(pred, truth)):
        if p.shape != t.shape:
            raise DimensionMismatch(f"frame {i}: prediction {p.shape} vs truth {t.shape}")
        if i < warmup:
            continue
        scored += 1
        for value, name in CLASS_NAMES.items():
            pm = p == value
            tm = t == value
            c = counts[name]
            c["tp"] += int(np.count_nonzero(pm & tm))
            c["fp"] += int(np.count_nonzero(pm & ~tm))
            c["fn"] += int(np.count_nonzero(~pm & tm))
    per_class = {}
    for name, c in counts.items():
        precision = _ratio(c["tp"], c["tp"] + c["fp"])
        recall = _ratio(c["tp"], c["tp"] + c["fn"])
        if precision is None or recall is None or precision + recall == 0.0:
            f1 = None
        else:
            f1 = 2.0 * precision * recall / (precision + recall)
        per_class[name] = {
            "tp": c["tp"],
            "fp": c["fp"],
            "fn": c["fn"],
            "precision": precision,
            "recall": recall,
            "f1": f1,
        }
    return {"frames_scored": scored, "per_class": per_class}
