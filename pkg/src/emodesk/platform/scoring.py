"""Chance-corrected recognition scoring for stimulus validation.

Raw recognition p = correct/n is rescaled so guessing at chance (1/k for k
answer choices) maps to 0 and perfect recognition to 100.  A stimulus is
eligible for the platform when its score exceeds 50.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

ELIGIBILITY_THRESHOLD = 50.0


class BadCounts(Exception):
    """Counts violate 0 <= correct <= n, n > 0, k >= 2."""


class BadRow(Exception):
    """A survey CSV row cannot be parsed or validated."""


def chance_corrected_score(correct: int, n: int, k: int) -> float:
    """Percentage score with chance-level guessing rescaled to zero."""
    if n <= 0 or correct < 0 or correct > n:
        raise BadCounts(f"bad counts correct={correct}, n={n}")
    if k < 2:
        raise BadCounts(f"need at least 2 answer choices, got k={k}")
    p = correct / n
    chance = 1.0 / k
    return max(0.0, (p - chance) / (1.0 - chance)) * 100.0


def is_eligible(score: float) -> bool:
    return score > ELIGIBILITY_THRESHOLD


@dataclass(frozen=True)
class StimulusScore:
    stimulus: str
    correct: int
    n: int
    k: int
    score: float
    eligible: bool


def validate_content(path: str | Path) -> list[StimulusScore]:
    """Score every row of a survey CSV with header stimulus,correct,n,k."""
    path = Path(path)
    out = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["stimulus", "correct", "n", "k"]:
            raise BadRow(f"{path}: expected header stimulus,correct,n,k")
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            try:
                stimulus = row[0]
                correct, n, k = (int(c) for c in row[1:4])
            except (ValueError, IndexError):
                raise BadRow(f"{path}:{lineno}: bad row {row!r}") from None
            try:
                score = chance_corrected_score(correct, n, k)
            except BadCounts as exc:
                raise BadRow(f"{path}:{lineno}: {exc}") from None
            out.append(
                StimulusScore(
                    stimulus=stimulus,
                    correct=correct,
                    n=n,
                    k=k,
                    score=score,
                    eligible=is_eligible(score),
                )
            )
    return out
