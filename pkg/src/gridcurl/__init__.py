"""Two-axis difficulty curriculum tooling for video RL post-training.

Pipeline: score visual/text difficulty per sample, quantile-normalize onto
a K x K grid, schedule training with a competence-gated wavefront, and
validate the whole loop against a synthetic learner.
"""

__version__ = "0.1.0"

from .errors import GridcurlError
from .grid import CurriculumGrid, ScoredSample, assign_bucket, build_grid, quantile_normalize
from .ingest import FrameSequence, SampleManifestEntry, load_frames, load_manifest, to_grayscale
from .rlcore import PolicyEval, RewardGroup, group_advantages, grpo_objective, kl_divergence, kl_gate
from .scheduler import BatchPlan, SchedulerConfig, WavefrontScheduler, verify_trace
from .visual import FlowConfig, FlowField, VisualProxies, estimate_flow, fuse_visual

__all__ = [
    "GridcurlError",
    "CurriculumGrid",
    "ScoredSample",
    "assign_bucket",
    "build_grid",
    "quantile_normalize",
    "FrameSequence",
    "SampleManifestEntry",
    "load_frames",
    "load_manifest",
    "to_grayscale",
    "PolicyEval",
    "RewardGroup",
    "group_advantages",
    "grpo_objective",
    "kl_divergence",
    "kl_gate",
    "BatchPlan",
    "SchedulerConfig",
    "WavefrontScheduler",
    "verify_trace",
    "FlowConfig",
    "FlowField",
    "VisualProxies",
    "estimate_flow",
    "fuse_visual",
    "__version__",
]
