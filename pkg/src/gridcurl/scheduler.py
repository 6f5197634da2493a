"""Competence-gated diagonal wavefront over the curriculum grid.

The scheduler owns a set of active buckets (the wavefront), a per-bucket
local competence score (EMA of batch rewards), and a mastered set. Training
starts in bucket (0,0); when a bucket's competence exceeds the gate
threshold it retires to the mastered set and its harder neighbors join the
wavefront. A configurable fraction of batches revisits the two basis
buckets (high-visual/low-text and low-visual/high-text) to keep mastered
skills exercised; revisits never target any other bucket.

The scheduler is a single-writer state machine. Every decision it makes is
appended to ``events`` so a trace checker can replay and audit a whole run.
"""

from dataclasses import dataclass, asdict

import numpy as np

from .errors import (
    ConfigInvalid,
    CorruptSnapshot,
    EmptyStartBucket,
    Exhausted,
    InactiveBucket,
)

SNAPSHOT_VERSION = 1

EXPANSION_MODES = ("manhattan", "manhattan_plus_diagonal")


@dataclass(frozen=True)
class SchedulerConfig:
    gamma: float = 0.9
    threshold: float = 0.5
    revisit_prob: float = 0.1
    batch_size: int = 16
    seed: int = 0
    expansion: str = "manhattan"
    # Retired buckets stay reachable only through revisiting; flip this to
    # keep gated buckets in the wavefront for ablations.
    retire_on_expand: bool = True

    def validate(self) -> None:
        if not 0.0 < self.gamma < 1.0:
            raise ConfigInvalid(f"gamma must be in (0,1), got {self.gamma}")
        if not 0.0 <= self.revisit_prob < 1.0:
            raise ConfigInvalid(f"revisit_prob must be in [0,1), got {self.revisit_prob}")
        if self.batch_size < 1:
            raise ConfigInvalid(f"batch_size must be >= 1, got {self.batch_size}")
        if self.expansion not in EXPANSION_MODES:
            raise ConfigInvalid(f"expansion must be one of {EXPANSION_MODES}")


@dataclass
class BatchPlan:
    bucket: tuple[int, int]
    sample_ids: list[str]
    is_revisit: bool


class WavefrontScheduler:
    """State machine producing BatchPlans and consuming batch rewards."""

    def __init__(self, grid, cfg: SchedulerConfig, _restoring: bool = False):
        cfg.validate()
        self.grid = grid
        self.cfg = cfg
        self.k = grid.k
        self.lcs = np.zeros((self.k, self.k))
        self.active: set = set()
        self.mastered: set = set()
        self.step = 0
        self.events: list[dict] = []
        self._revisit_cursor = 0
        self._rng = np.random.Generator(np.random.PCG64(cfg.seed))
        if _restoring:
            return
        if grid.size() == 0 or not grid.bucket(0, 0):
            raise EmptyStartBucket("bucket (0,0) holds no samples; lower K or merge buckets")
        self.active.add((0, 0))
        self._emit("expand", (0, 0), source=None, lcs=None)

    @property
    def rng(self) -> np.random.Generator:
        """The scheduler's stream; harness code may share it for batch draws."""
        return self._rng

    # -- basis buckets targeted by revisiting --------------------------------

    @property
    def perceptual_basis(self) -> tuple[int, int]:
        return (self.k - 1, 0)

    @property
    def reasoning_basis(self) -> tuple[int, int]:
        return (0, self.k - 1)

    # -- core transitions ------------------------------------------------------

    def update_lcs(self, bucket: tuple[int, int], mean_reward: float) -> None:
        """EMA update for one bucket: lcs <- gamma*lcs + (1-gamma)*reward."""
        bucket = tuple(bucket)
        if bucket not in self.active and bucket not in self.mastered:
            raise InactiveBucket(bucket)
        g = self.cfg.gamma
        self.lcs[bucket] = g * self.lcs[bucket] + (1.0 - g) * mean_reward

    def maybe_expand(self) -> None:
        """Retire every active bucket whose competence strictly exceeds the
        threshold and activate its in-range harder neighbors.

        Evaluated against the entry snapshot of the wavefront: buckets
        activated by this call are not re-examined within it. Neighbors whose
        grid cell is empty are auto-mastered and routed through, so the
        wavefront is not blocked by sparse regions.
        """
        triggers = [
            b
            for b in sorted(self.active)
            if b not in self.mastered and self.lcs[b] > self.cfg.threshold
        ]
        for bucket in triggers:
            trigger_lcs = float(self.lcs[bucket])
            self.mastered.add(bucket)
            if self.cfg.retire_on_expand:
                self.active.discard(bucket)
            self._emit("master", bucket, lcs=trigger_lcs, reason="gate")
            queue = [(n, bucket, trigger_lcs) for n in self._neighbors(bucket)]
            while queue:
                neighbor, source, source_lcs = queue.pop(0)
                if neighbor in self.active or neighbor in self.mastered:
                    continue
                if self.grid.bucket(*neighbor):
                    self.active.add(neighbor)
                    self._emit("expand", neighbor, source=source, lcs=source_lcs)
                else:
                    self.mastered.add(neighbor)
                    self._emit("master", neighbor, lcs=None, reason="empty", source=source)
                    queue.extend((n, neighbor, None) for n in self._neighbors(neighbor))

    def next_batch(self) -> BatchPlan:
        """Pick the next bucket and sample ids from it.

        With probability ``revisit_prob`` (and whenever the wavefront is
        empty), the plan targets a mastered basis bucket, alternating
        perceptual-first; otherwise a uniformly random active bucket.
        """
        self.step += 1
        eligible = []
        for basis in (self.perceptual_basis, self.reasoning_basis):
            if basis in self.mastered and self.grid.bucket(*basis) and basis not in eligible:
                eligible.append(basis)

        if eligible and self.cfg.revisit_prob > 0.0:
            forced = not self.active
            if forced or self._rng.random() < self.cfg.revisit_prob:
                return self._revisit_plan(eligible)

        if not self.active:
            raise Exhausted("all buckets mastered and no revisit target available")
        choices = sorted(self.active)
        bucket = choices[int(self._rng.integers(len(choices)))]
        plan = BatchPlan(bucket=bucket, sample_ids=self._draw_ids(bucket), is_revisit=False)
        self._emit("batch", bucket)
        return plan

    def _revisit_plan(self, eligible) -> BatchPlan:
        bases = (self.perceptual_basis, self.reasoning_basis)
        preferred = bases[self._revisit_cursor]
        bucket = preferred if preferred in eligible else eligible[0]
        self._revisit_cursor = 1 - self._revisit_cursor
        plan = BatchPlan(bucket=bucket, sample_ids=self._draw_ids(bucket), is_revisit=True)
        self._emit("revisit", bucket)
        return plan

    def _draw_ids(self, bucket) -> list[str]:
        ids = self.grid.bucket(*bucket)
        n = min(self.cfg.batch_size, len(ids))
        if len(ids) < self.cfg.batch_size:
            idx = self._rng.integers(0, len(ids), size=n)
        else:
            idx = self._rng.choice(len(ids), size=n, replace=False)
        return [ids[int(i)] for i in idx]

    def _neighbors(self, bucket):
        i, j = bucket
        steps = [(1, 0), (0, 1)]
        if self.cfg.expansion == "manhattan_plus_diagonal":
            steps.append((1, 1))
        out = []
        for di, dj in steps:
            ni, nj = i + di, j + dj
            if ni < self.k and nj < self.k:
                out.append((ni, nj))
        return out

    def _emit(self, event: str, bucket, **extra) -> None:
        record = {"step": self.step, "event": event, "bucket": list(bucket)}
        for key, value in extra.items():
            record[key] = list(value) if isinstance(value, tuple) else value
        self.events.append(record)

    # -- persistence ---------------------------------------------------------------

    def snapshot(self) -> dict:
        """Complete, JSON-serializable state; restoring continues bitwise."""
        return {
            "version": SNAPSHOT_VERSION,
            "k": self.k,
            "config": asdict(self.cfg),
            "step": self.step,
            "active": sorted(list(b) for b in self.active),
            "mastered": sorted(list(b) for b in self.mastered),
            "lcs": self.lcs.tolist(),
            "revisit_cursor": self._revisit_cursor,
            "rng_state": self._rng.bit_generator.state,
        }

    @classmethod
    def restore(cls, grid, snapshot: dict) -> "WavefrontScheduler":
        try:
            if snapshot["version"] != SNAPSHOT_VERSION:
                raise CorruptSnapshot(f"unsupported snapshot version {snapshot['version']}")
            cfg = SchedulerConfig(**snapshot["config"])
            sched = cls(grid, cfg, _restoring=True)
            if snapshot["k"] != grid.k:
                raise CorruptSnapshot(f"snapshot is for K={snapshot['k']}, grid has K={grid.k}")
            sched.step = int(snapshot["step"])
            sched.active = {tuple(b) for b in snapshot["active"]}
            sched.mastered = {tuple(b) for b in snapshot["mastered"]}
            sched.lcs = np.asarray(snapshot["lcs"], dtype=np.float64)
            if sched.lcs.shape != (grid.k, grid.k):
                raise CorruptSnapshot(f"lcs array has shape {sched.lcs.shape}")
            sched._revisit_cursor = int(snapshot["revisit_cursor"])
            sched._rng.bit_generator.state = snapshot["rng_state"]
        except CorruptSnapshot:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptSnapshot(f"snapshot is missing or corrupt: {exc}") from exc
        if not (sched.active or sched.mastered):
            raise CorruptSnapshot("snapshot has neither active nor mastered buckets")
        return sched


def verify_trace(events, k: int, threshold: float, expansion: str = "manhattan",
                 retire_on_expand: bool = True) -> list[str]:
    """Replay an event log and report every gating violation found.

    Checks: the run starts at (0,0); every expansion's source is an easier
    neighbor that either demonstrated competence above the threshold or was
    auto-mastered as empty; batches only touch active buckets and revisits
    only mastered basis buckets; active+mastered never shrinks.
    """
    violations = []
    active: set = set()
    mastered: set = set()
    empty_passed: set = set()
    bases = {(k - 1, 0), (0, k - 1)}
    deltas = {(1, 0), (0, 1)}
    if expansion == "manhattan_plus_diagonal":
        deltas.add((1, 1))
    seen_batch = False
    prev_covered = 0

    for idx, ev in enumerate(events):
        kind = ev["event"]
        bucket = tuple(ev["bucket"])
        where = f"event {idx} (step {ev.get('step')})"

        if kind == "expand":
            source = ev.get("source")
            if source is None:
                if bucket != (0, 0) or idx != 0:
                    violations.append(f"{where}: sourceless expand of {bucket}")
                active.add(bucket)
                continue
            source = tuple(source)
            if (bucket[0] - source[0], bucket[1] - source[1]) not in deltas:
                violations.append(f"{where}: {source} is not a predecessor of {bucket}")
            lcs = ev.get("lcs")
            if lcs is not None:
                if lcs <= threshold:
                    violations.append(f"{where}: expansion from {source} with lcs {lcs} <= {threshold}")
            elif source not in empty_passed:
                violations.append(f"{where}: expansion routed through non-empty {source}")
            if bucket in active or bucket in mastered:
                violations.append(f"{where}: re-activation of {bucket}")
            active.add(bucket)

        elif kind == "master":
            reason = ev.get("reason")
            if reason == "gate":
                if bucket not in active:
                    violations.append(f"{where}: mastering inactive bucket {bucket}")
                lcs = ev.get("lcs")
                if lcs is None or lcs <= threshold:
                    violations.append(f"{where}: mastered {bucket} with lcs {lcs} <= {threshold}")
                mastered.add(bucket)
                if retire_on_expand:
                    active.discard(bucket)
            elif reason == "empty":
                source = ev.get("source")
                source = tuple(source) if source is not None else None
                if source is None or (
                    source not in mastered and source not in empty_passed
                ):
                    violations.append(f"{where}: empty-mastered {bucket} from invalid source {source}")
                mastered.add(bucket)
                empty_passed.add(bucket)
            else:
                violations.append(f"{where}: unknown master reason {reason!r}")

        elif kind == "batch":
            if not seen_batch:
                seen_batch = True
                if bucket != (0, 0):
                    violations.append(f"{where}: first batch targets {bucket}, not (0, 0)")
            if bucket not in active:
                violations.append(f"{where}: batch from inactive bucket {bucket}")

        elif kind == "revisit":
            if not seen_batch:
                seen_batch = True
                if bucket != (0, 0):
                    violations.append(f"{where}: first batch targets {bucket}, not (0, 0)")
            if bucket not in bases:
                violations.append(f"{where}: revisit targets non-basis bucket {bucket}")
            if bucket not in mastered:
                violations.append(f"{where}: revisit targets unmastered bucket {bucket}")

        else:
            violations.append(f"{where}: unknown event kind {kind!r}")

        covered = len(active | mastered)
        if covered < prev_covered:
            violations.append(f"{where}: active+mastered shrank")
        prev_covered = covered

    return violations
