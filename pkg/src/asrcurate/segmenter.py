"""Fixed-stride segmentation of documents into training windows.

Windows tile [0, audio_duration) at a fixed stride (30 s by default).
Each caption line lands in exactly the window containing its start time;
text is never split across windows, and end times clip to the window
edge, because splitting caption text mid-line would fabricate alignments
the data does not contain. Windows with no lines are dropped by default
(untranscribed audio leaves the pool) unless ``keep_empty`` asks for
no-speech windows. The final partial window keeps its true duration.
"""

from __future__ import annotations

import math
from typing import Iterable

from .errors import CurationError
from .model import AudioTextPair, Segment, TranscriptDocument, TranscriptLine

DEFAULT_WINDOW = 30.0


def segment_document(
    pair: AudioTextPair, window: float = DEFAULT_WINDOW, keep_empty: bool = False
) -> list[Segment]:
    """Cut the pair's manual transcript into windows. See module docs."""
    return segment_transcript(
        pair.manual, pair.audio_duration, window=window, keep_empty=keep_empty
    )


def segment_transcript(
    doc: TranscriptDocument,
    audio_duration: float,
    window: float = DEFAULT_WINDOW,
    keep_empty: bool = False,
) -> list[Segment]:
    if window <= 0:
        raise CurationError("window length must be positive")
    if audio_duration <= 0:
        raise CurationError(f"{doc.doc_id!r}: audio duration must be positive")
    num_windows = max(1, math.ceil(audio_duration / window))
    buckets: list[list[TranscriptLine]] = [[] for _ in range(num_windows)]
    for line in doc.lines:
        idx = int(line.start // window)
        # dirty data: a line starting at/after the audio end clamps into
        # the final window rather than inventing a window beyond the audio
        idx = min(idx, num_windows - 1)
        start = idx * window
        duration = _window_duration(idx, num_windows, window, audio_duration)
        rebased_start = min(max(line.start - start, 0.0), duration)
        rebased_end = min(max(line.end - start, rebased_start), duration)
        buckets[idx].append(TranscriptLine(rebased_start, rebased_end, line.text))
    segments = []
    for idx, lines in enumerate(buckets):
        if not lines and not keep_empty:
            continue
        segments.append(
            Segment(
                doc_id=doc.doc_id,
                window_index=idx,
                window_start=idx * window,
                window_duration=_window_duration(
                    idx, num_windows, window, audio_duration
                ),
                lines=tuple(lines),
            )
        )
    return segments


def _window_duration(
    idx: int, num_windows: int, window: float, audio_duration: float
) -> float:
    if idx < num_windows - 1:
        return window
    return audio_duration - idx * window


def segment_hours(segments: Iterable[Segment]) -> float:
    """Total window duration in hours."""
    return sum(s.window_duration for s in segments) / 3600.0


def pair_hours(pairs: Iterable[AudioTextPair]) -> float:
    return sum(p.audio_duration for p in pairs) / 3600.0
