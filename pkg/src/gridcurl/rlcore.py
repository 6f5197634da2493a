"""Group-relative policy optimization math with two stabilizers.

Everything here is a pure function over small arrays: group-normalized
advantages, the clipped surrogate, exact KL over a discrete support, and a
variance gate that drops the KL penalty whenever a rollout group's rewards
collapse to a single value (all wrong or all right). Rewards in this
artifact are rule-based discrete values, so the gate tests exact equality,
not a tolerance.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    GroupTooSmall,
    LengthMismatch,
    NonFiniteInput,
    SupportMismatch,
    Unnormalized,
)

DEFAULT_EPS = 1e-8
DEFAULT_BETA = 0.04
DEFAULT_CLIP_EPS = 0.2


@dataclass
class RewardGroup:
    """G rollout rewards for one prompt plus the optimizer constants."""

    rewards: list
    eps: float = DEFAULT_EPS
    beta: float = DEFAULT_BETA
    clip_eps: float = DEFAULT_CLIP_EPS

    def __post_init__(self):
        arr = np.asarray(self.rewards, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 2:
            raise GroupTooSmall(int(arr.size))
        if not np.isfinite(arr).all():
            raise NonFiniteInput("rewards contain NaN or infinity")
        self.rewards = arr

    @property
    def size(self) -> int:
        return int(self.rewards.size)


@dataclass
class PolicyEval:
    """Per-rollout log-probabilities under the new, old, and reference policies."""

    logp_new: list
    logp_old: list
    logp_ref: list = field(default_factory=list)

    def __post_init__(self):
        self.logp_new = np.asarray(self.logp_new, dtype=np.float64)
        self.logp_old = np.asarray(self.logp_old, dtype=np.float64)
        self.logp_ref = np.asarray(self.logp_ref, dtype=np.float64)
        if self.logp_new.shape != self.logp_old.shape:
            raise LengthMismatch(
                f"logp_new has shape {self.logp_new.shape}, logp_old {self.logp_old.shape}"
            )
        if not (np.isfinite(self.logp_new).all() and np.isfinite(self.logp_old).all()):
            raise NonFiniteInput("log-probabilities contain NaN or infinity")


def group_advantages(group: RewardGroup) -> np.ndarray:
    """(r - mean) / (population std + eps); an all-equal group gets exact zeros."""
    r = group.rewards
    if _all_equal(r):
        return np.zeros_like(r)
    return (r - r.mean()) / (r.std() + group.eps)


def kl_gate(group: RewardGroup) -> float:
    """Effective KL coefficient: 0 when reward variance is exactly zero."""
    return 0.0 if _all_equal(group.rewards) else group.beta


def kl_divergence(logp_policy, logp_ref) -> float:
    """Exact KL(p || q) over a shared finite support, from log-probabilities.

    Zero-probability entries of p contribute nothing; a zero in q under
    p's support yields +inf, which is the correct limit.
    """
    lp = np.asarray(logp_policy, dtype=np.float64)
    lq = np.asarray(logp_ref, dtype=np.float64)
    if lp.shape != lq.shape or lp.ndim != 1:
        raise SupportMismatch(f"supports differ: {lp.shape} vs {lq.shape}")
    p = np.exp(lp)
    q = np.exp(lq)
    for name, dist in (("policy", p), ("reference", q)):
        if abs(dist.sum() - 1.0) > 1e-6:
            raise Unnormalized(f"{name} log-distribution sums to {dist.sum():.9f}")
    mask = p > 0.0
    if np.any(q[mask] == 0.0):
        return float("inf")
    return float(np.sum(p[mask] * (lp[mask] - lq[mask])))


def grpo_objective(pe: PolicyEval, group: RewardGroup, kl: float) -> float:
    """Clipped group-relative surrogate minus the gated KL penalty (maximize).

    ratio_i = exp(logp_new_i - logp_old_i); each term takes the pessimistic
    min of the raw and clipped ratio times the advantage; the KL term uses
    kl_gate, so it vanishes for variance-collapsed groups.
    """
    if pe.logp_new.shape != group.rewards.shape:
        raise LengthMismatch(
            f"policy eval covers {pe.logp_new.shape}, rewards {group.rewards.shape}"
        )
    adv = group_advantages(group)
    ratio = np.exp(pe.logp_new - pe.logp_old)
    clipped = np.clip(ratio, 1.0 - group.clip_eps, 1.0 + group.clip_eps)
    surrogate = np.minimum(ratio * adv, clipped * adv).mean()
    return float(surrogate - kl_gate(group) * kl)


def _all_equal(arr: np.ndarray) -> bool:
    return bool(np.all(arr == arr[0]))
