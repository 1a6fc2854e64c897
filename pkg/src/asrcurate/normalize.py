"""Text normalization applied before WER scoring and deduplication.

Two profiles:

* ``basic``      - lowercase, strip bracketed non-speech annotations,
                   remove punctuation except intra-word apostrophes and
                   hyphens, collapse whitespace.
* ``aggressive`` - basic plus a fixed contraction table, standalone "&"
                   spelled out as "and", and intra-word hyphens split
                   into spaces.

The aggressive profile approximates the Whisper English normalizer; it
does not replicate it. Both profiles are deterministic and idempotent,
and every report records the profile used.
"""

from __future__ import annotations

import re
import unicodedata

PROFILES = ("basic", "aggressive")

_BRACKETED = re.compile(r"\[[^\][]*\]|\([^)(]*\)")
_AMPERSAND = re.compile(r"(?<!\S)&(?!\S)")
_PUNCT = re.compile(r"[^\w\s'\-]|_")
# apostrophe/hyphen runs not flanked by word characters on both sides
_ORPHAN = re.compile(r"(?<!\w)['\-]+|['\-]+(?!\w)")
_INTRAWORD_HYPHEN = re.compile(r"(?<=\w)-(?=\w)")
_WS = re.compile(r"\s+")

# Common English contractions, matched against clean lowercase tokens.
CONTRACTIONS = {
    "ain't": "are not",
    "aren't": "are not",
    "can't": "cannot",
    "couldn't": "could not",
    "didn't": "did not",
    "doesn't": "does not",
    "don't": "do not",
    "hadn't": "had not",
    "hasn't": "has not",
    "haven't": "have not",
    "he'd": "he would",
    "he'll": "he will",
    "he's": "he is",
    "i'd": "i would",
    "i'll": "i will",
    "i'm": "i am",
    "i've": "i have",
    "isn't": "is not",
    "it'd": "it would",
    "it'll": "it will",
    "it's": "it is",
    "let's": "let us",
    "mightn't": "might not",
    "mustn't": "must not",
    "shan't": "shall not",
    "she'd": "she would",
    "she'll": "she will",
    "she's": "she is",
    "shouldn't": "should not",
    "that'll": "that will",
    "that's": "that is",
    "there'd": "there would",
    "there's": "there is",
    "they'd": "they would",
    "they'll": "they will",
    "they're": "they are",
    "they've": "they have",
    "wasn't": "was not",
    "we'd": "we would",
    "we'll": "we will",
    "we're": "we are",
    "we've": "we have",
    "weren't": "were not",
    "what'll": "what will",
    "what're": "what are",
    "what's": "what is",
    "what've": "what have",
    "when's": "when is",
    "where'd": "where did",
    "where's": "where is",
    "who'd": "who would",
    "who'll": "who will",
    "who're": "who are",
    "who's": "who is",
    "who've": "who have",
    "won't": "will not",
    "wouldn't": "would not",
    "you'd": "you would",
    "you'll": "you will",
    "you're": "you are",
    "you've": "you have",
}


def _check_profile(profile: str):
    if profile not in PROFILES:
        raise ValueError(f"unknown normalizer profile {profile!r}")


def normalize_text(raw: str, profile: str = "basic") -> str:
    """Normalize ``raw`` for word-level comparison. Idempotent."""
    _check_profile(profile)
    text = unicodedata.normalize("NFC", raw)
    text = text.replace("’", "'").replace("‘", "'")
    # re-normalize: lowercasing can denormalize a handful of codepoints
    text = unicodedata.normalize("NFC", text.lower())
    text = _BRACKETED.sub(" ", text)
    if profile == "aggressive":
        text = _AMPERSAND.sub("and", text)
    text = _PUNCT.sub(" ", text)
    text = _ORPHAN.sub(" ", text)
    if profile == "aggressive":
        text = _INTRAWORD_HYPHEN.sub(" ", text)
        text = " ".join(CONTRACTIONS.get(t, t) for t in text.split())
    return _WS.sub(" ", text).strip()


def tokens(raw: str, profile: str = "basic") -> list[str]:
    """Whitespace tokens of the normalized text."""
    norm = normalize_text(raw, profile)
    return norm.split() if norm else []
