"""Pluggable transcript language tagging.

The built-in detector is a stopword-and-character-profile classifier that
distinguishes English from everything else: it returns "en" when the text
is predominantly Latin script with a healthy ratio of English function
words, and "und" otherwise. It exists so the pipeline runs without a
third-party language-ID model; any callable ``text -> (tag, confidence)``
can replace it. Precomputed manifest tags always take precedence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .errors import CurationError
from .model import TranscriptDocument

UNDETERMINED = "und"

Detector = Callable[[str], tuple[str, float]]

# English function words; hits among these dominate any real English text.
_EN_STOPWORDS = frozenset(
    """
    a about after all also an and any are as at back be because been before
    but by can come could day did do down even first for from get give go
    good had has have he her him his how i if in into is it its just know
    like look make me most my new no not now of on one only or other our
    out over people said say see she so some take than that the their them
    then there these they things think this time to two up us use want was
    way we well were what when which who will with work would year you your
    """.split()
)

_MIN_STOPWORD_RATIO = 0.12
_MIN_LATIN_RATIO = 0.75


def english_or_unknown(text: str) -> tuple[str, float]:
    """Default detector: ("en", conf) or ("und", conf)."""
    letters = [c for c in text if c.isalpha()]
    if not letters:
        return UNDETERMINED, 0.0
    latin = sum(1 for c in letters if "a" <= c.lower() <= "z")
    latin_ratio = latin / len(letters)
    if latin_ratio < _MIN_LATIN_RATIO:
        return UNDETERMINED, round(1.0 - latin_ratio, 4)
    toks = [t.strip("'\"!?.,;:()[]").lower() for t in text.split()]
    toks = [t for t in toks if t]
    if not toks:
        return UNDETERMINED, 0.0
    hits = sum(1 for t in toks if t in _EN_STOPWORDS)
    ratio = hits / len(toks)
    if ratio >= _MIN_STOPWORD_RATIO:
        return "en", round(min(1.0, ratio / (2 * _MIN_STOPWORD_RATIO)), 4)
    return UNDETERMINED, round(1.0 - ratio, 4)


@dataclass(frozen=True)
class LanguageTag:
    tag: str
    confidence: float
    source: str  # "manifest" | "detector"

    @property
    def determined(self) -> bool:
        return self.tag != UNDETERMINED


def tag_text_language(
    doc: TranscriptDocument, detector: Optional[Detector] = None
) -> LanguageTag:
    """Top-1 language tag for a transcript.

    A manifest-supplied tag wins over any detector output. Raises on
    documents with no text at all.
    """
    if doc.text_lang is not None:
        return LanguageTag(doc.text_lang, 1.0, "manifest")
    text = doc.full_text()
    if not text.strip():
        raise CurationError("cannot tag language of empty transcript")
    tag, conf = (detector or english_or_unknown)(text)
    return LanguageTag(tag, conf, "detector")
