"""Full-range BT.601 luminance/chrominance conversion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import as_gray, as_rgb

__all__ = ["YccImage", "rgb_to_ycc", "ycc_to_rgb"]

KR, KG, KB = 0.299, 0.587, 0.114
CB_SCALE = 0.564
CR_SCALE = 0.713
CHROMA_OFFSET = 128.0


@dataclass(frozen=True)
class YccImage:
    """Luminance plane ``y`` and chroma planes ``cb``/``cr`` centred on 128."""

    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray

    def __post_init__(self):
        planes = [as_gray(p) for p in (self.y, self.cb, self.cr)]
        if not planes[0].shape == planes[1].shape == planes[2].shape:
            raise ValueError("Y, Cb and Cr planes must share dimensions")
        for name, p in zip(("y", "cb", "cr"), planes):
            object.__setattr__(self, name, p)

    @property
    def shape(self) -> tuple[int, int]:
        return self.y.shape


def rgb_to_ycc(img) -> YccImage:
    rgb = as_rgb(img)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = KR * r + KG * g + KB * b
    cb = CHROMA_OFFSET + (b - y) * CB_SCALE
    cr = CHROMA_OFFSET + (r - y) * CR_SCALE
    return YccImage(y, cb, cr)


def ycc_to_rgb(img: YccImage) -> np.ndarray:
    """Inverse of :func:`rgb_to_ycc`; no clamping, so values may leave [0, 255]."""
    y = img.y
    r = y + (img.cr - CHROMA_OFFSET) / CR_SCALE
    b = y + (img.cb - CHROMA_OFFSET) / CB_SCALE
    g = (y - KR * r - KB * b) / KG
    return np.stack([r, g, b], axis=-1)
