"""Synthetic two-skill learner and the experiment runner built around it.

The learner keeps one competence value per difficulty axis; its chance of
answering a sample is the product of a logistic margin on each axis, so a
batch only pays off when both skills roughly match the sample. Training on a
batch nudges the exercised skills up in proportion to the batch reward and
the batch's difficulty, while skills that were not exercised above a floor
decay - which is what makes forgetting, and revisiting, observable at desk
scale.

Four scheduling strategies run on the same learner: the gated wavefront, a
uniform-random control, a single-scalar curriculum ordered by the mean of
the two difficulty coordinates, and a simulated generation-based curriculum
ordered by a frozen probe learner's failure rate. Each run is seeded,
single-threaded, and bit-reproducible, and can be snapshotted and resumed.
"""

import math
from dataclasses import dataclass, field, replace, asdict

import numpy as np

from .errors import ConfigInvalid, Exhausted, IdMismatch
from .grid import CurriculumGrid, ScoredSample, build_grid
from .rlcore import (
    DEFAULT_BETA,
    DEFAULT_CLIP_EPS,
    PolicyEval,
    RewardGroup,
    grpo_objective,
    kl_gate,
)
from .scheduler import BatchPlan, SchedulerConfig, WavefrontScheduler, verify_trace

STRATEGIES = ("wavefront", "random", "scalar_length", "scalar_generation_sim")
REVISIT_MODES = ("structured", "none", "random_replay")

RUN_SNAPSHOT_VERSION = 1


@dataclass
class LearnerParams:
    """Defaults are tuned only for non-degenerate dynamics, not realism."""

    c_init: tuple = (0.3, 0.3)
    slope: float = 10.0
    learn_rate: float = 0.02
    forget_rate: float = 0.002
    exercise_floor: float = 0.25


@dataclass
class SyntheticLearner:
    c_v: float
    c_t: float
    slope: float
    learn_rate: float
    forget_rate: float
    exercise_floor: float

    @classmethod
    def from_params(cls, p: LearnerParams) -> "SyntheticLearner":
        return cls(
            c_v=float(p.c_init[0]),
            c_t=float(p.c_init[1]),
            slope=p.slope,
            learn_rate=p.learn_rate,
            forget_rate=p.forget_rate,
            exercise_floor=p.exercise_floor,
        )


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def success_prob(learner: SyntheticLearner, sample: ScoredSample) -> float:
    """Product of per-axis logistic margins between competence and difficulty."""
    a = learner.slope
    return float(
        _sigmoid(a * (learner.c_v - sample.d_visual)) * _sigmoid(a * (learner.c_t - sample.d_text))
    )


class CorpusView:
    """Vectorized difficulty lookups over one grid's samples."""

    def __init__(self, grid: CurriculumGrid, samples):
        self.grid = grid
        self.k = grid.k
        self.samples = {s.id: s for s in samples}
        self.ids = [s.id for s in samples]
        self.d_visual = np.array([s.d_visual for s in samples])
        self.d_text = np.array([s.d_text for s in samples])
        self._index = {sid: i for i, sid in enumerate(self.ids)}

    def coords(self, ids):
        idx = [self._index[sid] for sid in ids]
        return self.d_visual[idx], self.d_text[idx]

    def mean_success(self, learner: SyntheticLearner) -> float:
        """Expected reward over the whole corpus (the grid-wide probe)."""
        a = learner.slope
        p = _sigmoid(a * (learner.c_v - self.d_visual)) * _sigmoid(a * (learner.c_t - self.d_text))
        return float(p.mean())

    def bucket_mean_success(self, learner: SyntheticLearner, bucket) -> float:
        ids = self.grid.bucket(*bucket)
        if not ids:
            return 0.0
        dv, dt = self.coords(ids)
        a = learner.slope
        return float(np.mean(_sigmoid(a * (learner.c_v - dv)) * _sigmoid(a * (learner.c_t - dt))))


def train_step(learner: SyntheticLearner, plan: BatchPlan, corpus: CorpusView, rng) -> np.ndarray:
    """Draw Bernoulli rewards for the batch and update the learner in place.

    Each axis gains learn_rate * mean_reward * (batch mean difficulty on
    that axis); an axis whose batch difficulty stays at or below the
    exercise floor decays by the forget rate instead of being reinforced.
    Competence is clamped to [0, 1].
    """
    dv, dt = corpus.coords(plan.sample_ids)
    a = learner.slope
    p = _sigmoid(a * (learner.c_v - dv)) * _sigmoid(a * (learner.c_t - dt))
    rewards = (rng.random(len(p)) < p).astype(np.float64)
    mean_r = float(rewards.mean())

    weight_v = float(dv.mean())
    weight_t = float(dt.mean())
    eta = learner.learn_rate
    lam = learner.forget_rate
    floor = learner.exercise_floor

    c_v = learner.c_v + eta * mean_r * weight_v
    c_t = learner.c_t + eta * mean_r * weight_t
    if weight_v <= floor:
        c_v *= 1.0 - lam
    if weight_t <= floor:
        c_t *= 1.0 - lam
    learner.c_v = min(max(c_v, 0.0), 1.0)
    learner.c_t = min(max(c_t, 0.0), 1.0)
    return rewards


@dataclass
class ExperimentConfig:
    strategy: str = "wavefront"
    k: int = 4
    seeds: tuple = (0,)
    steps: int = 400
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    learner: LearnerParams = field(default_factory=LearnerParams)
    revisit: str = "structured"
    # Scalar arms default to K stages: the same number of difficulty levels
    # as one grid axis, so the comparison isolates the second axis itself.
    stages: int | None = None
    threshold_reward: float = 0.8
    threshold_window: int = 50
    beta: float = DEFAULT_BETA
    clip_eps: float = DEFAULT_CLIP_EPS

    def validate(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ConfigInvalid(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.revisit not in REVISIT_MODES:
            raise ConfigInvalid(f"revisit must be one of {REVISIT_MODES}, got {self.revisit!r}")
        if not self.seeds:
            raise ConfigInvalid("seeds must be nonempty")
        if self.steps < 0:
            raise ConfigInvalid("steps must be >= 0")
        self.scheduler.validate()


@dataclass
class RunMetrics:
    strategy: str
    seed: int
    steps_to_threshold: int | None
    final_mean_reward: float
    forgetting_gap: float
    trace: list
    events: list


class ExperimentRun:
    """One (strategy, seed) execution; resumable via snapshot()/restore()."""

    def __init__(self, cfg: ExperimentConfig, grid, samples, seed: int):
        cfg.validate()
        self.cfg = cfg
        self.seed = seed
        self.corpus = CorpusView(grid, samples)
        self.learner = SyntheticLearner.from_params(cfg.learner)
        self.global_step = 0
        self.probes: list[float] = []
        self.basis_probes: list[float] = []
        self.trace: list[dict] = []
        self.exhausted = False

        self.sched = None
        self.rng = None
        self.stage_ids: list[list[str]] | None = None
        self.stage_idx = 0
        self.stage_lcs: list[float] | None = None

        if cfg.strategy == "wavefront":
            rho = cfg.scheduler.revisit_prob if cfg.revisit == "structured" else 0.0
            sched_cfg = replace(cfg.scheduler, seed=seed, revisit_prob=rho)
            self.sched = WavefrontScheduler(grid, sched_cfg)
            self.rng = self.sched.rng
        else:
            self.rng = np.random.Generator(np.random.PCG64(seed))
            if cfg.strategy in ("scalar_length", "scalar_generation_sim"):
                self.stage_ids = self._build_stages()
                self.stage_lcs = [0.0] * len(self.stage_ids)

    # -- strategy internals -----------------------------------------------------

    def _build_stages(self) -> list[list[str]]:
        if self.cfg.strategy == "scalar_length":
            def scalar(s):
                return (s.d_visual + s.d_text) / 2.0
        else:
            probe = SyntheticLearner.from_params(self.cfg.learner)
            def scalar(s):
                return 1.0 - success_prob(probe, s)
        ordered = sorted(self.corpus.samples.values(), key=lambda s: (scalar(s), s.id))
        n_stages = self.cfg.stages or self.cfg.k
        n_stages = max(1, min(n_stages, len(ordered)))
        chunks = np.array_split(np.arange(len(ordered)), n_stages)
        return [[ordered[i].id for i in chunk] for chunk in chunks]

    def _draw_from(self, ids: list[str]) -> list[str]:
        n = min(self.cfg.scheduler.batch_size, len(ids))
        if len(ids) < self.cfg.scheduler.batch_size:
            idx = self.rng.integers(0, len(ids), size=n)
        else:
            idx = self.rng.choice(len(ids), size=n, replace=False)
        return [ids[int(i)] for i in idx]

    def _next_plan(self):
        cfg = self.cfg
        if cfg.strategy == "wavefront":
            if cfg.revisit == "random_replay" and self.sched.mastered:
                if self.rng.random() < cfg.scheduler.revisit_prob:
                    pool = sorted(self.sched.mastered)
                    pool = [b for b in pool if self.corpus.grid.bucket(*b)]
                    if pool:
                        bucket = pool[int(self.rng.integers(len(pool)))]
                        return BatchPlan(bucket, self._draw_from(self.corpus.grid.bucket(*bucket)), True)
            return self.sched.next_batch()
        if cfg.strategy == "random":
            buckets = self.corpus.grid.nonempty()
            bucket = buckets[int(self.rng.integers(len(buckets)))]
            return BatchPlan(bucket, self._draw_from(self.corpus.grid.bucket(*bucket)), False)
        # scalar arms: train the current stage, advance when its EMA passes
        ids = self.stage_ids[self.stage_idx]
        return BatchPlan(None, self._draw_from(ids), False)

    def step_once(self, reward_override=None) -> bool:
        """Run one scheduler/learner/optimizer iteration. False once exhausted."""
        if self.exhausted:
            return False
        try:
            plan = self._next_plan()
        except Exhausted:
            self.exhausted = True
            return False
        self.global_step += 1

        if reward_override is None:
            rewards = train_step(self.learner, plan, self.corpus, self.rng)
        else:
            rewards = np.asarray(reward_override(plan), dtype=np.float64)
            self._apply_update(plan, rewards)
        mean_r = float(rewards.mean())

        if rewards.size >= 2:
            group = RewardGroup(list(rewards), beta=self.cfg.beta, clip_eps=self.cfg.clip_eps)
            beta_eff = kl_gate(group)
            zeros = np.zeros(rewards.size)
            # On-policy evaluation point: ratios 1, kl 0. beta_eff carries the
            # gate signal; the objective value is logged for trace completeness.
            objective = grpo_objective(PolicyEval(zeros, zeros, zeros), group, kl=0.0)
        else:
            beta_eff = 0.0  # single-rollout group has zero variance by definition
            objective = 0.0

        cfg = self.cfg
        if cfg.strategy == "wavefront":
            if plan.bucket in self.sched.active or plan.bucket in self.sched.mastered:
                self.sched.update_lcs(plan.bucket, mean_r)
                self.sched.maybe_expand()
        elif cfg.strategy in ("scalar_length", "scalar_generation_sim") and not plan.is_revisit:
            g = cfg.scheduler.gamma
            self.stage_lcs[self.stage_idx] = (
                g * self.stage_lcs[self.stage_idx] + (1.0 - g) * mean_r
            )
            if (
                self.stage_lcs[self.stage_idx] > cfg.scheduler.threshold
                and self.stage_idx < len(self.stage_ids) - 1
            ):
                self.stage_idx += 1

        probe = self.corpus.mean_success(self.learner)
        self.probes.append(probe)
        basis = (self.cfg.k - 1, 0)
        self.basis_probes.append(self.corpus.bucket_mean_success(self.learner, basis))
        row = {
            "step": self.global_step,
            "bucket": list(plan.bucket) if plan.bucket is not None else None,
            "mean_reward": mean_r,
            "beta_eff": beta_eff,
            "objective": objective,
            "probe": probe,
            "revisit": plan.is_revisit,
        }
        if plan.bucket is None:
            row["stage"] = self.stage_idx
        self.trace.append(row)
        return True

    def _apply_update(self, plan, rewards):
        """Learner update used when rewards come from an override."""
        dv, dt = self.corpus.coords(plan.sample_ids)
        mean_r = float(np.mean(rewards))
        lp = self.learner
        c_v = lp.c_v + lp.learn_rate * mean_r * float(dv.mean())
        c_t = lp.c_t + lp.learn_rate * mean_r * float(dt.mean())
        if float(dv.mean()) <= lp.exercise_floor:
            c_v *= 1.0 - lp.forget_rate
        if float(dt.mean()) <= lp.exercise_floor:
            c_t *= 1.0 - lp.forget_rate
        lp.c_v = min(max(c_v, 0.0), 1.0)
        lp.c_t = min(max(c_t, 0.0), 1.0)

    def run(self, steps: int, reward_override=None) -> "ExperimentRun":
        for _ in range(steps):
            if not self.step_once(reward_override=reward_override):
                break
        return self

    # -- reporting -----------------------------------------------------------------

    def steps_to_threshold(self) -> int | None:
        w = self.cfg.threshold_window
        target = self.cfg.threshold_reward
        if len(self.probes) < w:
            return None
        probes = np.asarray(self.probes)
        csum = np.concatenate([[0.0], np.cumsum(probes)])
        trailing = (csum[w:] - csum[:-w]) / w
        hits = np.nonzero(trailing >= target)[0]
        return int(hits[0] + w) if hits.size else None

    def metrics(self) -> RunMetrics:
        return RunMetrics(
            strategy=self.cfg.strategy,
            seed=self.seed,
            steps_to_threshold=self.steps_to_threshold(),
            final_mean_reward=self.probes[-1] if self.probes else 0.0,
            forgetting_gap=(max(self.basis_probes) - self.basis_probes[-1])
            if self.basis_probes
            else 0.0,
            trace=self.trace,
            events=list(self.sched.events) if self.sched is not None else [],
        )

    # -- persistence ----------------------------------------------------------------

    def snapshot(self) -> dict:
        snap = {
            "version": RUN_SNAPSHOT_VERSION,
            "strategy": self.cfg.strategy,
            "seed": self.seed,
            "global_step": self.global_step,
            "exhausted": self.exhausted,
            "learner": {"c_v": self.learner.c_v, "c_t": self.learner.c_t},
            "probes": list(self.probes),
            "basis_probes": list(self.basis_probes),
            "scheduler": self.sched.snapshot() if self.sched is not None else None,
            "rng_state": None if self.sched is not None else self.rng.bit_generator.state,
            "stage_idx": self.stage_idx,
            "stage_lcs": list(self.stage_lcs) if self.stage_lcs is not None else None,
        }
        return snap

    @classmethod
    def restore(cls, cfg: ExperimentConfig, grid, samples, snap: dict) -> "ExperimentRun":
        if snap.get("version") != RUN_SNAPSHOT_VERSION:
            raise ConfigInvalid(f"unsupported run snapshot version {snap.get('version')}")
        if snap.get("strategy") != cfg.strategy:
            raise ConfigInvalid(
                f"snapshot is for strategy {snap.get('strategy')!r}, config says {cfg.strategy!r}"
            )
        run = cls(cfg, grid, samples, seed=int(snap["seed"]))
        run.global_step = int(snap["global_step"])
        run.exhausted = bool(snap["exhausted"])
        run.learner.c_v = float(snap["learner"]["c_v"])
        run.learner.c_t = float(snap["learner"]["c_t"])
        run.probes = list(snap["probes"])
        run.basis_probes = list(snap["basis_probes"])
        if run.sched is not None:
            run.sched = WavefrontScheduler.restore(grid, snap["scheduler"])
            run.rng = run.sched.rng
        else:
            run.rng.bit_generator.state = snap["rng_state"]
        run.stage_idx = int(snap["stage_idx"])
        if snap["stage_lcs"] is not None:
            run.stage_lcs = [float(x) for x in snap["stage_lcs"]]
        return run


def run_experiment(cfg: ExperimentConfig, grid, samples, reward_override=None) -> list[RunMetrics]:
    """Execute cfg.steps iterations for every seed; report sorted by seed."""
    cfg.validate()
    results = []
    for seed in cfg.seeds:
        run = ExperimentRun(cfg, grid, samples, seed=int(seed))
        run.run(cfg.steps, reward_override=reward_override)
        results.append(run.metrics())
    return sorted(results, key=lambda m: m.seed)


# --- scripted forgetting protocol ------------------------------------------------


def forgetting_experiment(
    grid,
    samples,
    seed: int,
    replay: str = "structured",
    scheduler_cfg: SchedulerConfig | None = None,
    learner_params: LearnerParams | None = None,
    phase_b_steps: int = 300,
    max_phase_a_steps: int = 400,
) -> dict:
    """Two-phase probe of skill retention.

    Phase A climbs the visual column (i, 0) up to the perceptual basis
    bucket, gated by the usual competence EMA. Phase B then trains only the
    reasoning column (0, j); without replay the perceptual skill decays
    every step. ``replay`` chooses what a revisit batch targets: the basis
    buckets with scheduler-style alternation, a uniformly random mastered
    bucket, or nothing.
    """
    if replay not in REVISIT_MODES:
        raise ConfigInvalid(f"replay must be one of {REVISIT_MODES}, got {replay!r}")
    scfg = scheduler_cfg or SchedulerConfig()
    lp = learner_params or LearnerParams()
    corpus = CorpusView(grid, samples)
    rng = np.random.Generator(np.random.PCG64(seed))
    learner = SyntheticLearner.from_params(lp)
    k = grid.k
    bases = ((k - 1, 0), (0, k - 1))

    def batch(bucket):
        ids = grid.bucket(*bucket)
        n = min(scfg.batch_size, len(ids))
        if len(ids) < scfg.batch_size:
            idx = rng.integers(0, len(ids), size=n)
        else:
            idx = rng.choice(len(ids), size=n, replace=False)
        return BatchPlan(bucket, [ids[int(i)] for i in idx], False)

    mastered: list = []
    cv_track = []
    for i in range(k):
        bucket = (i, 0)
        lcs = 0.0
        for _ in range(max_phase_a_steps):
            rewards = train_step(learner, batch(bucket), corpus, rng)
            cv_track.append(learner.c_v)
            lcs = scfg.gamma * lcs + (1.0 - scfg.gamma) * float(rewards.mean())
            if lcs > scfg.threshold:
                break
        mastered.append(bucket)

    peak_after_a = learner.c_v
    cursor = 0
    j = 1
    lcs = 0.0
    for _ in range(phase_b_steps):
        do_replay = replay != "none" and rng.random() < scfg.revisit_prob
        if replay == "structured":
            eligible = [b for b in bases if b in mastered and grid.bucket(*b)]
        else:
            eligible = [b for b in mastered if grid.bucket(*b)]
        if do_replay and eligible:
            if replay == "structured":
                target = bases[cursor] if bases[cursor] in eligible else eligible[0]
                cursor = 1 - cursor
            else:
                target = eligible[int(rng.integers(len(eligible)))]
            train_step(learner, batch(target), corpus, rng)
        else:
            bucket = (0, min(j, k - 1))
            rewards = train_step(learner, batch(bucket), corpus, rng)
            lcs = scfg.gamma * lcs + (1.0 - scfg.gamma) * float(rewards.mean())
            if lcs > scfg.threshold and j < k - 1:
                if bucket not in mastered:
                    mastered.append(bucket)
                j += 1
                lcs = 0.0
        cv_track.append(learner.c_v)

    return {
        "seed": seed,
        "replay": replay,
        "peak_cv": max(cv_track) if cv_track else learner.c_v,
        "cv_after_phase_a": peak_after_a,
        "final_cv": learner.c_v,
        "cv_track": cv_track,
    }


# --- analysis --------------------------------------------------------------------


def correlate(scores, outcomes, bins: int = 20) -> list[tuple[float, float, int]]:
    """Equal-population (quantile) binning of scores vs mean outcome.

    Returns (bin_center, mean_accuracy, n) per bin, ordered by score. The
    bin center is the mean score inside the bin.
    """
    if bins < 2:
        raise ConfigInvalid(f"bins must be >= 2, got {bins}")
    scores = list(scores)
    score_map = dict(scores)
    if len(score_map) != len(scores):
        raise IdMismatch("duplicate ids in scores")
    outcome_map = dict(outcomes)
    if set(score_map) != set(outcome_map):
        missing = set(score_map) ^ set(outcome_map)
        raise IdMismatch(f"score/outcome id sets differ on {sorted(missing)[:5]}")
    if bins > len(score_map):
        raise ConfigInvalid(f"cannot form {bins} bins from {len(score_map)} samples")

    ordered = sorted(score_map.items(), key=lambda kv: (kv[1], kv[0]))
    values = np.array([v for _, v in ordered])
    accs = np.array([float(outcome_map[sid]) for sid, _ in ordered])
    rows = []
    for chunk in np.array_split(np.arange(len(ordered)), bins):
        rows.append((float(values[chunk].mean()), float(accs[chunk].mean()), int(chunk.size)))
    return rows


def sweep_k(cfg: ExperimentConfig, k_values, per_cell: int = 6, corpus_seed: int = 0,
            corpus_scores=None) -> list[dict]:
    """Re-run the configured experiment at each grid size.

    ``corpus_scores`` may carry (visual_scores, text_scores) to re-bin a
    real corpus; otherwise a balanced synthetic corpus is generated per K.
    Every row reports the per-seed medians plus the count of gating
    violations found by the trace checker.
    """
    ks = [int(k) for k in k_values]
    if len(set(ks)) != len(ks):
        raise ConfigInvalid(f"duplicate K values in {ks}")
    if any(k < 2 for k in ks):
        raise ConfigInvalid(f"K values must be >= 2, got {ks}")

    rows = []
    for k in ks:
        if corpus_scores is not None:
            visual_scores, text_scores = corpus_scores
            grid, samples = build_grid(visual_scores, text_scores, k=k, seed=corpus_seed)
        else:
            grid, samples = make_synthetic_grid(k, per_cell=per_cell, seed=corpus_seed)
        cfg_k = replace(cfg, k=k)
        metrics = run_experiment(cfg_k, grid, samples)
        violations = sum(
            len(
                verify_trace(
                    m.events,
                    k,
                    cfg.scheduler.threshold,
                    expansion=cfg.scheduler.expansion,
                    retire_on_expand=cfg.scheduler.retire_on_expand,
                )
            )
            for m in metrics
        )
        finished = [m.steps_to_threshold for m in metrics if m.steps_to_threshold is not None]
        rows.append(
            {
                "k": k,
                "seeds": len(metrics),
                "median_steps_to_threshold": float(np.median(finished)) if finished else None,
                "mean_final_reward": float(np.mean([m.final_mean_reward for m in metrics])),
                "violations": violations,
            }
        )
    return rows


def make_synthetic_grid(k: int, per_cell: int = 6, seed: int = 0):
    """Balanced synthetic corpus: exactly per_cell samples in every bucket.

    Raw scores are engineered so rank normalization lands each sample in its
    target cell; the two visual proxies share a ranking so the fused
    coordinate stays exact for any alpha.
    """
    n = k * k * per_cell
    rng = np.random.Generator(np.random.PCG64(seed))
    cells = [(i, j) for i in range(k) for j in range(k) for _ in range(per_cell)]
    order = rng.permutation(n)
    cells = [cells[i] for i in order]
    ids = [f"s{i:05d}" for i in range(n)]

    raw_v = np.empty(n)
    for pos, t in enumerate(sorted(range(n), key=lambda t: (cells[t][0], t))):
        raw_v[t] = float(pos + 1)
    raw_t = np.empty(n)
    for pos, t in enumerate(sorted(range(n), key=lambda t: (cells[t][1], t))):
        raw_t[t] = float(pos + 1)

    visual_scores = [(ids[t], raw_v[t], raw_v[t]) for t in range(n)]
    text_scores = [(ids[t], raw_t[t]) for t in range(n)]
    return build_grid(visual_scores, text_scores, k=k, alpha=0.5, seed=seed)


# --- config (de)serialization -----------------------------------------------------


def config_to_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["seeds"] = list(cfg.seeds)
    return d


def config_from_dict(d: dict) -> ExperimentConfig:
    d = dict(d)
    sched = d.pop("scheduler", {})
    learner = d.pop("learner", {})
    if isinstance(learner.get("c_init"), list):
        learner["c_init"] = tuple(learner["c_init"])
    known = {f.name for f in ExperimentConfig.__dataclass_fields__.values()}
    unknown = set(d) - known
    if unknown:
        raise ConfigInvalid(f"unknown experiment config keys {sorted(unknown)}")
    cfg = ExperimentConfig(
        scheduler=SchedulerConfig(**sched),
        learner=LearnerParams(**learner),
        **{key: value for key, value in d.items() if key != "seeds"},
        seeds=tuple(d.get("seeds", (0,))),
    )
    cfg.validate()
    return cfg
