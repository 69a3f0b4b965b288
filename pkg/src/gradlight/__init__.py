"""Gradient-domain low-light image enhancement.

Dark-region gradients are amplified and the image is re-integrated under a
box constraint, so the output keeps the boosted gradients while staying
inside the target intensity range.
"""

from .baseline import gain_map_enhance, histogram_equalize
from .color import YccImage, rgb_to_ycc, ycc_to_rgb
from .gradient import (
    EnhancementParams,
    GradientField,
    compute_gradients,
    divergence,
    enhance_gradients,
    enhancement_gain,
    manipulate,
)
from .image import IntensityRange, load_image, quantize, save_image
from .integrator import SolveReport, SolverConfig, anchor, integrate, kkt_report, objective
from .pipeline import enhance, enhance_color, enhance_gray, enhanced_field

__version__ = "0.1.0"

__all__ = [
    "EnhancementParams",
    "GradientField",
    "IntensityRange",
    "SolveReport",
    "SolverConfig",
    "YccImage",
    "anchor",
    "compute_gradients",
    "divergence",
    "enhance",
    "enhance_color",
    "enhance_gradients",
    "enhance_gray",
    "enhanced_field",
    "enhancement_gain",
    "gain_map_enhance",
    "histogram_equalize",
    "integrate",
    "kkt_report",
    "load_image",
    "manipulate",
    "objective",
    "quantize",
    "rgb_to_ycc",
    "save_image",
    "ycc_to_rgb",
]
