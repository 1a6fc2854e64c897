"""Word error rate: minimum-edit-distance alignment over normalized words.

WER = (substitutions + deletions + insertions) / reference words. Values
are fractions internally; multiply by 100 only at display time. WER may
exceed 1.0 when insertions dominate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptyReferenceError
from .normalize import tokens

# backtrace moves, in tie-break preference order
_SUB, _DEL, _INS, _HIT = 0, 1, 2, 3


@dataclass(frozen=True)
class WerBreakdown:
    substitutions: int
    deletions: int
    insertions: int
    reference_words: int

    @property
    def wer(self) -> float:
        if self.reference_words == 0:
            raise EmptyReferenceError("WER undefined for empty reference")
        return (
            self.substitutions + self.deletions + self.insertions
        ) / self.reference_words

    @property
    def edit_distance(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    def to_dict(self) -> dict:
        return {
            "wer": self.wer,
            "substitutions": self.substitutions,
            "deletions": self.deletions,
            "insertions": self.insertions,
            "reference_words": self.reference_words,
        }


def align_tokens(ref: Sequence[str], hyp: Sequence[str]) -> WerBreakdown:
    """Count substitutions/deletions/insertions of a minimum-cost alignment.

    Unit costs; ties during backtrace prefer substitution over deletion
    over insertion, so breakdowns are deterministic (totals are unaffected
    by the tie rule). Accepts empty sequences.
    """
    n, m = len(ref), len(hyp)
    # dist[i][j]: edit distance between ref[:i] and hyp[:j]
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    move = [[_HIT] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
        move[i][0] = _DEL
    for j in range(1, m + 1):
        dist[0][j] = j
        move[0][j] = _INS
    for i in range(1, n + 1):
        ri = ref[i - 1]
        row, prev = dist[i], dist[i - 1]
        mrow = move[i]
        for j in range(1, m + 1):
            if ri == hyp[j - 1]:
                row[j] = prev[j - 1]
                mrow[j] = _HIT
                continue
            sub = prev[j - 1] + 1
            dele = prev[j] + 1
            ins = row[j - 1] + 1
            best = min(sub, dele, ins)
            row[j] = best
            if sub == best:
                mrow[j] = _SUB
            elif dele == best:
                mrow[j] = _DEL
            else:
                mrow[j] = _INS
    subs = dels = inss = 0
    i, j = n, m
    while i > 0 or j > 0:
        mv = move[i][j]
        if mv == _HIT or mv == _SUB:
            subs += mv == _SUB
            i -= 1
            j -= 1
        elif mv == _DEL:
            dels += 1
            i -= 1
        else:
            inss += 1
            j -= 1
    return WerBreakdown(subs, dels, inss, n)


def word_error_rate(
    reference: str, hypothesis: str, profile: str = "basic"
) -> WerBreakdown:
    """WER between two raw strings, both normalized with ``profile``.

    Raises EmptyReferenceError when the reference normalizes to no words;
    a silent zero would corrupt threshold filtering.
    """
    ref = tokens(reference, profile)
    if not ref:
        raise EmptyReferenceError("reference normalizes to zero words")
    hyp = tokens(hypothesis, profile)
    return align_tokens(ref, hyp)


def corpus_wer(
    pairs: Iterable[tuple[str, str]], profile: str = "basic"
) -> WerBreakdown:
    """Pooled WER: sums S, D, I and reference words over all pairs before
    dividing. Not a mean of per-utterance WERs."""
    subs = dels = inss = nref = 0
    count = 0
    for idx, (reference, hypothesis) in enumerate(pairs):
        try:
            b = word_error_rate(reference, hypothesis, profile)
        except EmptyReferenceError:
            raise EmptyReferenceError(
                f"pair {idx}: reference normalizes to zero words"
            ) from None
        subs += b.substitutions
        dels += b.deletions
        inss += b.insertions
        nref += b.reference_words
        count += 1
    if count == 0 or nref == 0:
        raise EmptyReferenceError("no reference words in corpus")
    return WerBreakdown(subs, dels, inss, nref)
