"""Training-free visual-temporal complexity proxies.

Two per-clip scores are produced from a grayscale frame sequence:

* motion intensity: dense optical flow between adjacent frames, reduced to
  the spatial mean of displacement magnitudes, then averaged over time;
* information density: Shannon entropy (bits) of the absolute
  frame-difference histogram, averaged over time. Uniform change (all pixels
  shifting brightness by the same amount) has zero entropy, which is exactly
  the redundancy the metric is meant to discount.

Flow is estimated either with the Farneback polynomial-expansion method
(OpenCV backend, the production default) or with a coarse-to-fine
Horn-Schunck solver implemented here on top of numpy/scipy. Both are checked
against synthetic-translation oracles rather than against each other.
"""

import math
from dataclasses import dataclass

import cv2
import numpy as np
from scipy.ndimage import convolve, correlate, map_coordinates

from .errors import ConfigInvalid, OutOfRange, ShapeMismatch, TooFewFrames
from .ingest import FrameSequence

# Frames whose long side exceeds this are shrunk (area averaging) before flow
# estimation; entropy always runs at native resolution.
FLOW_MAX_SIDE = 512

# Additive stabilizer inside log2 of the entropy; zero-probability bins are
# skipped outright so it only perturbs occupied bins.
ENTROPY_EPS = 1e-12

HIST_LEVELS = 256

BACKENDS = ("farneback", "horn_schunck")


@dataclass(frozen=True)
class FlowConfig:
    """Dense-flow estimator settings.

    Defaults mirror a standard CPU configuration: half-resolution pyramid,
    3 levels, 15-pixel window, 3 iterations. ``poly_n``/``poly_sigma`` only
    affect the Farneback backend; ``hs_*`` only the Horn-Schunck backend.
    """

    pyramid_scale: float = 0.5
    levels: int = 3
    window_size: int = 15
    iterations: int = 3
    backend: str = "farneback"
    poly_n: int = 5
    poly_sigma: float = 1.2
    hs_iterations: int = 100
    hs_smoothness: float = 0.1

    def validate(self) -> None:
        if not 0.0 < self.pyramid_scale < 1.0:
            raise ConfigInvalid(f"pyramid_scale must be in (0,1), got {self.pyramid_scale}")
        if self.levels < 1:
            raise ConfigInvalid(f"levels must be >= 1, got {self.levels}")
        if self.window_size < 3 or self.window_size % 2 == 0:
            raise ConfigInvalid(f"window_size must be odd and >= 3, got {self.window_size}")
        if self.iterations < 1:
            raise ConfigInvalid(f"iterations must be >= 1, got {self.iterations}")
        if self.backend not in BACKENDS:
            raise ConfigInvalid(f"backend must be one of {BACKENDS}, got {self.backend!r}")


@dataclass
class FlowField:
    """Per-pixel displacement (u horizontal, v vertical), pixels/frame."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=np.float64)
        self.v = np.asarray(self.v, dtype=np.float64)
        if self.u.shape != self.v.shape or self.u.ndim != 2:
            raise ShapeMismatch(f"u/v must be equal 2-D shapes, got {self.u.shape} vs {self.v.shape}")
        if not (np.isfinite(self.u).all() and np.isfinite(self.v).all()):
            raise ShapeMismatch("flow field contains non-finite entries")


@dataclass
class VisualProxies:
    phi_flow: float
    phi_ent: float
    per_frame_m: list[float]
    per_frame_E: list[float]


def estimate_flow(f_a, f_b, cfg: FlowConfig = FlowConfig()) -> FlowField:
    """Estimate dense motion from frame ``f_a`` to ``f_b``.

    Deterministic for fixed inputs and config; both backends are pure
    functions of their arguments.
    """
    cfg.validate()
    a = np.asarray(f_a)
    b = np.asarray(f_b)
    if a.shape != b.shape or a.ndim != 2:
        raise ShapeMismatch(f"frames must share an (H, W) shape, got {a.shape} vs {b.shape}")
    if cfg.window_size >= min(a.shape):
        raise ConfigInvalid(
            f"window_size {cfg.window_size} must be smaller than the frame ({a.shape})"
        )
    if cfg.backend == "farneback":
        flow = cv2.calcOpticalFlowFarneback(
            a.astype(np.uint8),
            b.astype(np.uint8),
            None,
            pyr_scale=cfg.pyramid_scale,
            levels=cfg.levels,
            winsize=cfg.window_size,
            iterations=cfg.iterations,
            poly_n=cfg.poly_n,
            poly_sigma=cfg.poly_sigma,
            flags=0,
        )
        return FlowField(u=flow[..., 0], v=flow[..., 1])
    return _horn_schunck_pyramid(a, b, cfg)


def frame_motion_score(flow: FlowField) -> float:
    """Spatial mean of Euclidean displacement magnitudes (Eq. m)."""
    return float(np.mean(np.hypot(flow.u, flow.v)))


def motion_intensity(seq: FrameSequence, cfg: FlowConfig = FlowConfig()):
    """Return (phi_flow, per-pair scores): mean motion over the T-1 pairs.

    Frames larger than FLOW_MAX_SIDE on the long side are downscaled (area
    averaging) first, so magnitudes are in downscaled-pixel units. That is
    consistent across a corpus because downstream normalization is rank-based.
    """
    frames = _maybe_shrink(seq.frames)
    scores = []
    for t in range(frames.shape[0] - 1):
        flow = estimate_flow(frames[t], frames[t + 1], cfg)
        scores.append(frame_motion_score(flow))
    return float(np.mean(scores)), scores


def frame_diff(f_a, f_b) -> np.ndarray:
    """Elementwise absolute intensity difference, integers in [0, 255]."""
    a = np.asarray(f_a)
    b = np.asarray(f_b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"frames must share a shape, got {a.shape} vs {b.shape}")
    return np.abs(a.astype(np.int16) - b.astype(np.int16)).astype(np.uint8)


def diff_distribution(diff) -> np.ndarray:
    """Normalized 256-bin histogram of a difference map (sums to 1 exactly)."""
    diff = np.asarray(diff, dtype=np.uint8)
    counts = np.bincount(diff.ravel(), minlength=HIST_LEVELS)
    return counts / diff.size


def diff_entropy(p) -> float:
    """Shannon entropy in bits of a 256-level distribution.

    Zero-probability bins contribute exactly 0 (they are skipped, never
    evaluated as 0*log(eps)); occupied bins use log2(p + ENTROPY_EPS).
    """
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (HIST_LEVELS,):
        raise ShapeMismatch(f"expected a ({HIST_LEVELS},) distribution, got {p.shape}")
    occupied = p > 0.0
    return float(-np.sum(p[occupied] * np.log2(p[occupied] + ENTROPY_EPS)))


def info_density(seq: FrameSequence):
    """Return (phi_ent, per-pair entropies): mean difference entropy in bits."""
    frames = seq.frames
    if frames.shape[0] < 2:
        raise TooFewFrames(seq.id, frames.shape[0])
    entropies = []
    for t in range(frames.shape[0] - 1):
        d = frame_diff(frames[t], frames[t + 1])
        entropies.append(diff_entropy(diff_distribution(d)))
    return float(np.mean(entropies)), entropies


def fuse_visual(q_flow: float, q_ent: float, alpha: float = 0.5) -> float:
    """Weighted blend of two already-normalized scores: a*q_flow + (1-a)*q_ent."""
    for name, value in (("q_flow", q_flow), ("q_ent", q_ent), ("alpha", alpha)):
        if not 0.0 <= value <= 1.0:
            raise OutOfRange(f"{name} must lie in [0,1], got {value}")
    return alpha * q_flow + (1.0 - alpha) * q_ent


def score_sample(seq: FrameSequence, cfg: FlowConfig = FlowConfig()) -> VisualProxies:
    """Compute both raw proxies for one sample."""
    phi_flow, per_m = motion_intensity(seq, cfg)
    phi_ent, per_e = info_density(seq)
    return VisualProxies(phi_flow=phi_flow, phi_ent=phi_ent, per_frame_m=per_m, per_frame_E=per_e)


def _maybe_shrink(frames: np.ndarray) -> np.ndarray:
    long_side = max(frames.shape[1], frames.shape[2])
    if long_side <= FLOW_MAX_SIDE:
        return frames
    scale = FLOW_MAX_SIDE / long_side
    new_w = max(1, int(round(frames.shape[2] * scale)))
    new_h = max(1, int(round(frames.shape[1] * scale)))
    shrunk = [
        cv2.resize(f, (new_w, new_h), interpolation=cv2.INTER_AREA) for f in frames
    ]
    return np.stack(shrunk)


# --- Horn-Schunck backend ----------------------------------------------------

# Neighbor-averaging stencil from the classic formulation.
_HS_KERNEL = np.array(
    [[1 / 12, 1 / 6, 1 / 12],
     [1 / 6, 0.0, 1 / 6],
     [1 / 12, 1 / 6, 1 / 12]]
)


def _horn_schunck_pyramid(a, b, cfg: FlowConfig) -> FlowField:
    """Coarse-to-fine Horn-Schunck with backward warping between levels.

    Plain Horn-Schunck only converges for sub-pixel motion; the pyramid
    extends its range to the few-pixel shifts the corpus actually contains.
    """
    a_f = a.astype(np.float64) / 255.0
    b_f = b.astype(np.float64) / 255.0

    pyramid = [(a_f, b_f)]
    for _ in range(cfg.levels - 1):
        prev_a, prev_b = pyramid[-1]
        h = max(8, int(round(prev_a.shape[0] * cfg.pyramid_scale)))
        w = max(8, int(round(prev_a.shape[1] * cfg.pyramid_scale)))
        if (h, w) == prev_a.shape:
            break
        pyramid.append(
            (
                cv2.resize(prev_a, (w, h), interpolation=cv2.INTER_AREA),
                cv2.resize(prev_b, (w, h), interpolation=cv2.INTER_AREA),
            )
        )

    u = np.zeros(pyramid[-1][0].shape)
    v = np.zeros_like(u)
    for level_a, level_b in reversed(pyramid):
        if u.shape != level_a.shape:
            scale_y = level_a.shape[0] / u.shape[0]
            scale_x = level_a.shape[1] / u.shape[1]
            u = cv2.resize(u, (level_a.shape[1], level_a.shape[0])) * scale_x
            v = cv2.resize(v, (level_a.shape[1], level_a.shape[0])) * scale_y
        warped_b = _warp(level_b, u, v)
        du, dv = _hs_increment(level_a, warped_b, cfg.hs_smoothness, cfg.hs_iterations)
        u = u + du
        v = v + dv
    return FlowField(u=u, v=v)


def _warp(img, u, v):
    """Sample ``img`` at (y+v, x+u); out-of-range coordinates clamp to edge."""
    h, w = img.shape
    yy, xx = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    coords = np.stack([yy + v, xx + u])
    return map_coordinates(img, coords, order=1, mode="nearest")


def _hs_increment(f1, f2, alpha, n_iter):
    """One Horn-Schunck solve for the residual flow between f1 and f2."""
    kx = np.array([[-1.0, 1.0], [-1.0, 1.0]]) * 0.25
    ky = np.array([[-1.0, -1.0], [1.0, 1.0]]) * 0.25
    kt = np.ones((2, 2)) * 0.25

    # correlate, not convolve: the derivative stencils are asymmetric and a
    # flipped kernel inverts the sign convention u = motion from f1 to f2
    fx = correlate(f1, kx) + correlate(f2, kx)
    fy = correlate(f1, ky) + correlate(f2, ky)
    ft = correlate(f2, kt) - correlate(f1, kt)

    u = np.zeros_like(f1)
    v = np.zeros_like(f1)
    denom_base = alpha**2 + fx**2 + fy**2
    for _ in range(n_iter):
        u_avg = convolve(u, _HS_KERNEL)
        v_avg = convolve(v, _HS_KERNEL)
        common = (fx * u_avg + fy * v_avg + ft) / denom_base
        u = u_avg - fx * common
        v = v_avg - fy * common
    return u, v
