"""Stringent positional word-matching scorer and the five-metric report.

Target and predicted strings are tokenized and compared word-by-word at the
same position.  A matching pair counts as a true positive; a mismatching
pair counts as a false positive; a target word with no prediction at its
position is a false negative and a predicted word beyond the target is a
false positive.  A fully empty target/prediction pair contributes exactly
one true negative.  Words compare either exactly (after case-folding) or
fuzzily via normalized character edit distance at a configurable threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import GoldExample

EXACT = "exact"
FUZZY = "fuzzy"


class EvaluationError(ValueError):
    """Raised when predictions do not cover the gold corpus."""


@dataclass(frozen=True)
class EvalConfig:
    mode: str = EXACT
    fuzzy_threshold: float = 0.90
    strip_separators: bool = True

    def __post_init__(self) -> None:
        if self.mode not in (EXACT, FUZZY):
            raise ValueError(f"mode must be {EXACT!r} or {FUZZY!r}, got {self.mode!r}")
        if not 0.0 < self.fuzzy_threshold <= 1.0:
            raise ValueError(f"fuzzy_threshold must be in (0, 1], got {self.fuzzy_threshold}")


@dataclass(frozen=True)
class EvalReport:
    tp: int
    tn: int
    fp: int
    fn: int
    accuracy: float
    precision: float
    recall: float
    specificity: float
    f1: float

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "tn": self.tn,
            "fp": self.fp,
            "fn": self.fn,
            "accuracy": round(self.accuracy, 4),
            "precision": round(self.precision, 4),
            "recall": round(self.recall, 4),
            "specificity": round(self.specificity, 4),
            "f1": round(self.f1, 4),
        }


def edit_distance(a: str, b: str) -> int:
    """Unit-cost character-level Levenshtein distance (two-row iteration)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def word_match(a: str, b: str, cfg: EvalConfig) -> bool:
    """Whether two words count as the same under the configured mode.

    Exact mode compares case-folded, trimmed strings.  Fuzzy mode accepts the
    pair when ``1 - editdistance/max(len)`` meets the threshold (inclusive).
    Two empty strings always match.
    """
    a, b = a.strip().casefold(), b.strip().casefold()
    if not a and not b:
        return True
    if cfg.mode == EXACT:
        return a == b
    longest = max(len(a), len(b))
    similarity = 1.0 - edit_distance(a, b) / longest
    return similarity >= cfg.fuzzy_threshold


def _tokenize(s: str, cfg: EvalConfig) -> list[str]:
    if cfg.strip_separators:
        s = s.replace("|", " ").replace(",", " ")
    return s.split()


def score_example(target: str, predicted: str, cfg: EvalConfig) -> tuple[int, int, int, int]:
    """Positional (tp, tn, fp, fn) counts for one target/prediction pair."""
    target_words = _tokenize(target, cfg)
    predicted_words = _tokenize(predicted, cfg)
    if not target_words and not predicted_words:
        return (0, 1, 0, 0)
    tp = fp = fn = 0
    for i in range(max(len(target_words), len(predicted_words))):
        has_target = i < len(target_words)
        has_predicted = i < len(predicted_words)
        if has_target and has_predicted:
            if word_match(target_words[i], predicted_words[i], cfg):
                tp += 1
            else:
                fp += 1
        elif has_target:
            fn += 1
        else:
            fp += 1
    return (tp, 0, fp, fn)


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def aggregate(scores: list[tuple[int, int, int, int]]) -> EvalReport:
    """Sum per-example counters and derive the five metrics.

    Zero-denominator metrics come out as 0 so degenerate corpora still
    produce a stable report.
    """
    tp = sum(s[0] for s in scores)
    tn = sum(s[1] for s in scores)
    fp = sum(s[2] for s in scores)
    fn = sum(s[3] for s in scores)

    def ratio(num: int, den: int) -> float:
        return num / den if den else 0.0

    precision = ratio(tp, tp + fp)
    recall = ratio(tp, tp + fn)
    return EvalReport(
        tp=tp,
        tn=tn,
        fp=fp,
        fn=fn,
        accuracy=ratio(tp + tn, tp + tn + fp + fn),
        precision=precision,
        recall=recall,
        specificity=ratio(tn, tn + fp),
        f1=f1_score(precision, recall),
    )


def evaluate_corpus(
    gold: list[GoldExample], predictions: dict[str, str], cfg: EvalConfig
) -> EvalReport:
    """Score every gold example against its prediction and aggregate.

    Every gold id must have a prediction entry (an empty string is a valid
    prediction); missing ids raise :class:`EvaluationError` listing them all.
    """
    missing = [ex.id for ex in gold if ex.id not in predictions]
    if missing:
        raise EvaluationError(f"missing predictions for ids: {', '.join(missing)}")
    scores = [score_example(ex.target_text, predictions[ex.id], cfg) for ex in gold]
    return aggregate(scores)


def score_breakdown(
    gold: list[GoldExample], predictions: dict[str, str], cfg: EvalConfig
) -> list[dict]:
    """Per-example counter rows, for the optional breakdown file."""
    rows = []
    for ex in gold:
        tp, tn, fp, fn = score_example(ex.target_text, predictions[ex.id], cfg)
        rows.append({"id": ex.id, "tp": tp, "tn": tn, "fp": fp, "fn": fn})
    return rows
