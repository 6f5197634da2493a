"""Rank-based score normalization and the K x K curriculum grid.

Raw proxy scores are mapped to (0, 1] by average-rank quantile
normalization, the two visual proxies are blended, and every sample is
assigned a (visual level, cognitive level) bucket. Difficulty level ``i``
owns the quantile band (i/K, (i+1)/K], so N distinct-valued samples split
into exactly N/K samples per level whenever K divides N.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import ConfigInvalid, IdMismatch, NonFiniteInput, OutOfRange
from .jsonl import read_json, write_json

GRID_FILE_VERSION = 1


@dataclass
class ScoredSample:
    id: str
    d_visual: float
    d_text: float
    bucket: tuple[int, int]
    phi_flow: float | None = None
    phi_ent: float | None = None
    s_cog: float | None = None


@dataclass
class CurriculumGrid:
    """K x K partition of sample ids; ``buckets[(i, j)]`` lists bucket members."""

    k: int
    buckets: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        for i in range(self.k):
            for j in range(self.k):
                self.buckets.setdefault((i, j), [])

    def bucket(self, i: int, j: int) -> list[str]:
        return self.buckets[(i, j)]

    def nonempty(self) -> list[tuple[int, int]]:
        return sorted(b for b, ids in self.buckets.items() if ids)

    def size(self) -> int:
        return sum(len(ids) for ids in self.buckets.values())


def quantile_normalize(scores) -> list[float]:
    """Map raw scores to average-rank / N, preserving order; ties share rank.

    Distinct inputs of size N land exactly on {1/N, 2/N, ..., 1}.
    """
    arr = np.asarray(scores, dtype=np.float64)
    if arr.size == 0:
        raise ConfigInvalid("need at least one score")
    if not np.isfinite(arr).all():
        raise NonFiniteInput("scores contain NaN or infinity")
    ranks = rankdata(arr, method="average")
    return list(ranks / arr.size)


def assign_bucket(d_visual: float, d_text: float, k: int) -> tuple[int, int]:
    """Map normalized coordinates to the (i, j) bucket.

    Level ``i`` covers the band (i/K, (i+1)/K]: band edges belong to the
    lower level, which keeps rank/N outputs exactly N/K per level. 0 clamps
    up into level 0 and 1 lands in level K-1.
    """
    if k < 1:
        raise ConfigInvalid(f"K must be >= 1, got {k}")
    for name, value in (("d_visual", d_visual), ("d_text", d_text)):
        if not 0.0 <= value <= 1.0:
            raise OutOfRange(f"{name} must lie in [0,1], got {value}")
    i = min(max(math.ceil(d_visual * k) - 1, 0), k - 1)
    j = min(max(math.ceil(d_text * k) - 1, 0), k - 1)
    return i, j


def build_grid(visual_scores, text_scores, k: int = 4, alpha: float = 0.5, seed: int = 0):
    """Normalize, fuse, and bin a corpus.

    ``visual_scores``: iterable of (id, phi_flow, phi_ent).
    ``text_scores``: iterable of (id, s_cog). The id sets must match.

    Returns (CurriculumGrid, list[ScoredSample]) with samples in
    visual-score input order. The fused visual coordinate is binned as-is
    (no second normalization pass), so its marginal is exactly uniform only
    when the two proxy rankings agree or alpha is 0 or 1.
    """
    if not 0.0 <= alpha <= 1.0:
        raise OutOfRange(f"alpha must lie in [0,1], got {alpha}")
    visual_scores = list(visual_scores)
    text_by_id = {sid: value for sid, value in text_scores}
    visual_ids = [sid for sid, _, _ in visual_scores]
    if len(set(visual_ids)) != len(visual_ids):
        raise IdMismatch("duplicate ids in visual scores")
    if set(visual_ids) != set(text_by_id):
        missing = set(visual_ids) ^ set(text_by_id)
        raise IdMismatch(f"visual/text id sets differ on {sorted(missing)[:5]}")

    q_flow = quantile_normalize([f for _, f, _ in visual_scores])
    q_ent = quantile_normalize([e for _, _, e in visual_scores])
    q_cog = quantile_normalize([text_by_id[sid] for sid in visual_ids])

    grid = CurriculumGrid(k=k, config={"alpha": alpha, "K": k, "seed": seed})
    samples = []
    for idx, (sid, phi_flow, phi_ent) in enumerate(visual_scores):
        d_visual = alpha * q_flow[idx] + (1.0 - alpha) * q_ent[idx]
        d_text = q_cog[idx]
        bucket = assign_bucket(d_visual, d_text, k)
        grid.buckets[bucket].append(sid)
        samples.append(
            ScoredSample(
                id=sid,
                d_visual=d_visual,
                d_text=d_text,
                bucket=bucket,
                phi_flow=phi_flow,
                phi_ent=phi_ent,
                s_cog=text_by_id[sid],
            )
        )
    return grid, samples


def row_marginals(grid: CurriculumGrid) -> list[int]:
    """Sample count per visual level."""
    return [sum(len(grid.buckets[(i, j)]) for j in range(grid.k)) for i in range(grid.k)]


def col_marginals(grid: CurriculumGrid) -> list[int]:
    """Sample count per cognitive level."""
    return [sum(len(grid.buckets[(i, j)]) for i in range(grid.k)) for j in range(grid.k)]


def save_grid(path, grid: CurriculumGrid, samples) -> None:
    """Single-document grid file; buckets are row-major (index i*K + j)."""
    document = {
        "version": GRID_FILE_VERSION,
        "K": grid.k,
        "alpha": grid.config.get("alpha"),
        "seed": grid.config.get("seed", 0),
        "buckets": [grid.buckets[(i, j)] for i in range(grid.k) for j in range(grid.k)],
        "samples": [
            {
                "id": s.id,
                "d_visual": s.d_visual,
                "d_text": s.d_text,
                "bucket": list(s.bucket),
            }
            for s in samples
        ],
    }
    write_json(path, document)


def load_grid(path):
    """Inverse of save_grid. Raw proxy scores are not stored in the file."""
    document = read_json(path)
    if document.get("version") != GRID_FILE_VERSION:
        raise ConfigInvalid(f"unsupported grid file version {document.get('version')}")
    k = int(document["K"])
    grid = CurriculumGrid(
        k=k, config={"alpha": document.get("alpha"), "K": k, "seed": document.get("seed", 0)}
    )
    flat = document["buckets"]
    if len(flat) != k * k:
        raise ConfigInvalid(f"grid file has {len(flat)} buckets, expected {k * k}")
    for i in range(k):
        for j in range(k):
            grid.buckets[(i, j)] = list(flat[i * k + j])
    samples = [
        ScoredSample(
            id=s["id"],
            d_visual=float(s["d_visual"]),
            d_text=float(s["d_text"]),
            bucket=tuple(s["bucket"]),
        )
        for s in document["samples"]
    ]
    return grid, samples
