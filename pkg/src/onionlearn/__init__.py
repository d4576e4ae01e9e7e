"""Online shape-concept learning with convex-layer templates."""

from ._kernels import BACKEND
from .descriptors import Descriptor, DescriptorConfig, geometric_descriptor, normalize_pose, visual_descriptor
from .geometry import LayerStack, Point2, PointSet, Polygon, convex_hull, generate_polygon, onion_peel
from .learner import Decision, Learner, LearnerConfig
from .metrics import MetricConfig, aligned_distance, similarity
from .templates import Embedding, Template, TemplateLibrary, build_template, embed

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Decision",
    "Descriptor",
    "DescriptorConfig",
    "Embedding",
    "LayerStack",
    "Learner",
    "LearnerConfig",
    "MetricConfig",
    "Point2",
    "PointSet",
    "Polygon",
    "Template",
    "TemplateLibrary",
    "aligned_distance",
    "build_template",
    "convex_hull",
    "embed",
    "generate_polygon",
    "geometric_descriptor",
    "normalize_pose",
    "onion_peel",
    "similarity",
    "visual_descriptor",
]
