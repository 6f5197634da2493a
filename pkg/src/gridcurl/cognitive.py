"""Question-aware answer difficulty from language-model surprisal.

The score for a (question, answer) pair is the conditional negative
log-likelihood of the answer given the question minus the answer's
unconditional NLL. A positive score means the question did not help compress
the answer; a negative one means it made the answer more predictable. Only
the difference is consumed downstream, so any NLL provider works as long as
it is internally consistent.

Two providers ship here: a self-contained add-k smoothed n-gram model
trained on the corpus's own text (no downloads, fully deterministic), and a
file-backed provider for NLLs computed out-of-process by a real LM.
"""

import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .errors import EmptyTarget, MalformedRecord, ProviderMissingId
from .jsonl import read_jsonl

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")

_PAD = "<s>"


def tokenize(text: str) -> list[str]:
    """Lowercased word/punctuation tokens. Providers only need internal consistency."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class NllRequest:
    id: str
    question: str
    answer: str


@dataclass(frozen=True)
class NllPair:
    """Conditional and unconditional answer NLLs in the same (nat) unit."""

    id: str
    nll_conditional: float
    nll_unconditional: float


@dataclass
class NgramLm:
    """Add-k smoothed n-gram model over whitespace/punctuation tokens.

    The vocabulary is whatever training saw (plus anything injected through
    the ``vocab`` argument), so conditional distributions sum to exactly 1
    over it; a token outside the vocabulary is scored with the same count=0
    mass an unseen in-vocabulary token would get. ``k=0`` disables smoothing
    and is intended for constructing deterministic test models only.
    """

    order: int = 2
    k: float = 0.5
    vocab: set = field(default_factory=set)
    _counts: dict = field(default_factory=lambda: defaultdict(Counter))
    _totals: Counter = field(default_factory=Counter)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if self.k < 0:
            raise ValueError(f"smoothing k must be >= 0, got {self.k}")
        self.vocab = set(self.vocab)

    def fit(self, texts) -> "NgramLm":
        for text in texts:
            tokens = tokenize(text)
            self.vocab.update(tokens)
            padded = [_PAD] * (self.order - 1) + tokens
            for i in range(self.order - 1, len(padded)):
                context = tuple(padded[i - self.order + 1 : i])
                self._counts[context][padded[i]] += 1
                self._totals[context] += 1
        return self

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def _context_window(self, context_tokens) -> tuple:
        window = list(context_tokens)[-(self.order - 1) :] if self.order > 1 else []
        while len(window) < self.order - 1:
            window.insert(0, _PAD)
        return tuple(window)

    def prob(self, context_tokens, token: str) -> float:
        """Smoothed P(token | last order-1 context tokens)."""
        if not self.vocab:
            raise ValueError("model has an empty vocabulary")
        context = self._context_window(context_tokens)
        count = self._counts[context][token]
        total = self._totals[context]
        denom = total + self.k * self.vocab_size
        if denom == 0:
            # k=0 and unseen context: fall back to a uniform distribution
            return 1.0 / self.vocab_size
        return (count + self.k) / denom


def sequence_nll(lm: NgramLm, context: list[str], target: list[str]) -> float:
    """Total -ln P of ``target`` given ``context`` threaded through the model.

    Each target token is scored against the last order-1 tokens of
    context + previously-scored target tokens, so the value is additive over
    concatenated targets.
    """
    if not target:
        raise EmptyTarget("target token list is empty")
    running = list(context)
    nll = 0.0
    for token in target:
        nll += -math.log(lm.prob(running, token))
        running.append(token)
    return nll


def calibrated_surprisal(cond_nll: float, uncond_nll: float) -> float:
    """Conditional minus unconditional NLL; negative values are preserved."""
    return cond_nll - uncond_nll


class BuiltinNgramProvider:
    """NLL provider backed by an n-gram model trained on the corpus itself.

    Each sample contributes its concatenated question+answer text, so
    question-to-answer transitions are represented. Conditional scoring
    threads the question tokens in as context; unconditional scoring uses
    the answer alone.
    """

    def __init__(self, order: int = 2, k: float = 0.5):
        self.lm = NgramLm(order=order, k=k)
        self._fitted = False

    def fit(self, entries) -> "BuiltinNgramProvider":
        self.lm.fit(f"{e.question} {e.answer}" for e in entries)
        self._fitted = True
        return self

    def nll_pair(self, entry) -> NllPair:
        if not self._fitted:
            raise RuntimeError("provider must be fitted before scoring")
        answer_tokens = tokenize(entry.answer)
        if not answer_tokens:
            raise EmptyTarget(f"sample {entry.id!r} has an empty answer after tokenization")
        question_tokens = tokenize(entry.question)
        return NllPair(
            id=entry.id,
            nll_conditional=sequence_nll(self.lm, question_tokens, answer_tokens),
            nll_unconditional=sequence_nll(self.lm, [], answer_tokens),
        )


class FileNllProvider:
    """Reads precomputed {id, nll_conditional, nll_unconditional} records."""

    def __init__(self, path):
        self._pairs = {}
        for line_no, record in read_jsonl(path):
            for key in ("id", "nll_conditional", "nll_unconditional"):
                if key not in record:
                    raise MalformedRecord(line_no, f"missing key {key!r}")
            cond = record["nll_conditional"]
            uncond = record["nll_unconditional"]
            for name, value in (("nll_conditional", cond), ("nll_unconditional", uncond)):
                if not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
                    raise MalformedRecord(line_no, f"{name} must be finite and >= 0")
            self._pairs[record["id"]] = NllPair(
                id=record["id"], nll_conditional=float(cond), nll_unconditional=float(uncond)
            )

    def nll_pair(self, entry) -> NllPair:
        try:
            return self._pairs[entry.id]
        except KeyError:
            raise ProviderMissingId(entry.id) from None


def score_corpus(entries, provider) -> list[tuple[str, float]]:
    """One (id, surprisal) row per manifest entry, in manifest order."""
    rows = []
    for entry in entries:
        pair = provider.nll_pair(entry)
        rows.append((entry.id, calibrated_surprisal(pair.nll_conditional, pair.nll_unconditional)))
    return rows
