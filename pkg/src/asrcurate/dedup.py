"""MinHash fuzzy deduplication and n-gram decontamination.

Deduplication: documents are tokenized with the basic normalizer,
shingled into distinct 5-token windows, and hashed by 112 pairwise-
independent multiply-add functions over a Mersenne prime. The 112 minima
are split into 14 bands of 8; any two documents sharing one band key are
linked, and connected components form duplicate clusters (targeting
roughly 75% Jaccard similarity). Band collisions are NOT re-verified by
default; pass ``verify_threshold`` to require an estimated-Jaccard check
before linking.

Decontamination: an index of 10-token n-gram digests is built from
evaluation references; any training document containing one of those
n-grams verbatim is flagged. Digest hits are confirmed by exact token
comparison, so a hash collision can never flag a clean document.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import ParamMismatchError, TooShortToShingleError
from .model import TranscriptDocument
from .normalize import tokens

# Mersenne prime; (a*x + b) % P stays within uint64 for a, b, x < 2^31.
_PRIME = np.uint64((1 << 31) - 1)


@dataclass(frozen=True)
class MinHashParams:
    shingle_size: int = 5
    num_hashes: int = 112
    num_bands: int = 14
    rows_per_band: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.num_bands * self.rows_per_band != self.num_hashes:
            raise ValueError(
                f"num_bands ({self.num_bands}) x rows_per_band "
                f"({self.rows_per_band}) must equal num_hashes ({self.num_hashes})"
            )
        if self.shingle_size < 1:
            raise ValueError("shingle_size must be >= 1")
        if not (0 <= self.seed < (1 << 63)):
            raise ValueError("seed must be a non-negative 63-bit integer")

    def to_dict(self) -> dict:
        return {
            "shingle_size": self.shingle_size,
            "num_hashes": self.num_hashes,
            "num_bands": self.num_bands,
            "rows_per_band": self.rows_per_band,
            "seed": self.seed,
        }

    @staticmethod
    def from_dict(d: dict) -> "MinHashParams":
        return MinHashParams(**d)


@dataclass(frozen=True)
class MinHashSignature:
    doc_id: str
    values: tuple[int, ...]
    band_keys: tuple[bytes, ...]
    params: MinHashParams


def _coefficients(params: MinHashParams) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(params.seed)
    p = int(_PRIME)
    a = rng.integers(1, p, size=params.num_hashes, dtype=np.uint64)
    b = rng.integers(0, p, size=params.num_hashes, dtype=np.uint64)
    return a, b


def shingle_set(doc: TranscriptDocument, shingle_size: int = 5) -> set[tuple[str, ...]]:
    """Distinct consecutive token windows of the normalized document text."""
    toks = tokens(doc.full_text(), "basic")
    return {
        tuple(toks[i : i + shingle_size])
        for i in range(len(toks) - shingle_size + 1)
    }


def _shingle_digests(shingles: Iterable[tuple[str, ...]]) -> np.ndarray:
    digests = [
        int.from_bytes(
            hashlib.blake2b(" ".join(s).encode("utf-8"), digest_size=8).digest(),
            "little",
        )
        % int(_PRIME)
        for s in shingles
    ]
    return np.asarray(sorted(digests), dtype=np.uint64)


def signature(doc: TranscriptDocument, params: MinHashParams) -> MinHashSignature:
    """MinHash signature over the document's shingle set.

    Deterministic given (document text, params, seed); independent of
    worker count or shingle iteration order.
    """
    shingles = shingle_set(doc, params.shingle_size)
    if not shingles:
        n = len(tokens(doc.full_text(), "basic"))
        raise TooShortToShingleError(
            f"{doc.doc_id!r}: {n} tokens is too short to shingle "
            f"(need >= {params.shingle_size})"
        )
    x = _shingle_digests(shingles)
    a, b = _coefficients(params)
    values = ((a[:, None] * x[None, :] + b[:, None]) % _PRIME).min(axis=1)
    return MinHashSignature(
        doc_id=doc.doc_id,
        values=tuple(int(v) for v in values),
        band_keys=band_keys(values, params),
        params=params,
    )


def band_keys(values: Sequence[int], params: MinHashParams) -> tuple[bytes, ...]:
    """Digest each contiguous group of rows_per_band values, salted with
    the band index so keys from different bands never collide."""
    keys = []
    r = params.rows_per_band
    for band in range(params.num_bands):
        chunk = values[band * r : (band + 1) * r]
        payload = struct.pack(f"<H{r}Q", band, *[int(v) for v in chunk])
        keys.append(hashlib.blake2b(payload, digest_size=16).digest())
    return tuple(keys)


def estimate_jaccard(a: MinHashSignature, b: MinHashSignature) -> float:
    """Fraction of agreeing signature positions; unbiased estimator of the
    Jaccard similarity of the two shingle sets."""
    if a.params != b.params:
        raise ParamMismatchError(
            "signatures built with different MinHash parameters"
        )
    matches = sum(1 for x, y in zip(a.values, b.values) if x == y)
    return matches / len(a.values)


class _UnionFind:
    def __init__(self):
        self.parent: dict[str, str] = {}

    def find(self, x: str) -> str:
        root = x
        while self.parent.setdefault(root, root) != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller id wins so components are order-independent
            lo, hi = (ra, rb) if ra < rb else (rb, ra)
            self.parent[hi] = lo


def find_duplicates(
    signatures: Iterable[MinHashSignature],
    verify_threshold: Optional[float] = None,
) -> list[list[str]]:
    """Duplicate clusters: connected components of band-key collisions.

    Returns sorted clusters of >= 2 doc_ids. With ``verify_threshold``,
    colliding pairs are linked only when their estimated Jaccard reaches
    the threshold (fewer false positives than the raw banding rule).
    """
    sigs = list(signatures)
    if not sigs:
        return []
    params = sigs[0].params
    by_id: dict[str, MinHashSignature] = {}
    for s in sigs:
        if s.params != params:
            raise ParamMismatchError("mixed MinHash parameters in one index")
        by_id[s.doc_id] = s
    buckets: dict[bytes, list[str]] = {}
    for s in sigs:
        for key in s.band_keys:
            buckets.setdefault(key, []).append(s.doc_id)
    uf = _UnionFind()
    for key in sorted(buckets):
        members = sorted(set(buckets[key]))
        if len(members) < 2:
            continue
        anchor = members[0]
        for other in members[1:]:
            if verify_threshold is not None:
                est = estimate_jaccard(by_id[anchor], by_id[other])
                if est < verify_threshold:
                    continue
            uf.union(anchor, other)
    clusters: dict[str, list[str]] = {}
    for doc_id in by_id:
        clusters.setdefault(uf.find(doc_id), []).append(doc_id)
    out = [sorted(members) for members in clusters.values() if len(members) > 1]
    return sorted(out)


def duplicates_to_remove(clusters: Iterable[Sequence[str]]) -> set[str]:
    """Everything but the lexicographically smallest id of each cluster."""
    doomed: set[str] = set()
    for cluster in clusters:
        doomed.update(sorted(cluster)[1:])
    return doomed


# --- binary signature table ---------------------------------------------------

_MAGIC_VERSION = 1
_HEADER = struct.Struct("<B4IqQ")  # version, 4 params, seed, row count
_DOC_DIGEST_SIZE = 16


def write_signatures(
    sigs: Sequence[MinHashSignature], path: Union[str, Path]
) -> None:
    """Fixed-width binary table: header {params, seed}, then one row of
    {doc_id digest, num_hashes x 64-bit values} per signature."""
    if not sigs:
        raise ValueError("nothing to write")
    params = sigs[0].params
    row = struct.Struct(f"<{params.num_hashes}Q")
    with Path(path).open("wb") as fh:
        fh.write(
            _HEADER.pack(
                _MAGIC_VERSION,
                params.shingle_size,
                params.num_hashes,
                params.num_bands,
                params.rows_per_band,
                params.seed,
                len(sigs),
            )
        )
        for s in sigs:
            if s.params != params:
                raise ParamMismatchError("mixed MinHash parameters in one table")
            fh.write(hashlib.blake2b(s.doc_id.encode(), digest_size=_DOC_DIGEST_SIZE).digest())
            fh.write(row.pack(*s.values))


def read_signatures(
    path: Union[str, Path],
) -> tuple[MinHashParams, list[tuple[bytes, tuple[int, ...]]]]:
    """Read back (params, [(doc_id_digest, values), ...])."""
    data = Path(path).read_bytes()
    version, shingle, hashes, bands, rows_per_band, seed, count = _HEADER.unpack_from(
        data, 0
    )
    if version != _MAGIC_VERSION:
        raise ValueError(f"unsupported signature table version {version}")
    params = MinHashParams(shingle, hashes, bands, rows_per_band, seed)
    row = struct.Struct(f"<{hashes}Q")
    offset = _HEADER.size
    out = []
    for _ in range(count):
        digest = data[offset : offset + _DOC_DIGEST_SIZE]
        offset += _DOC_DIGEST_SIZE
        values = row.unpack_from(data, offset)
        offset += row.size
        out.append((digest, values))
    return params, out


# --- n-gram decontamination ----------------------------------------------------

_NGRAM_DIGEST_SIZE = 16


@dataclass
class NgramIndex:
    """Digests of every n-token window of the evaluation references."""

    n: int
    profile: str = "basic"
    entries: dict = field(default_factory=dict)  # digest -> (tokens, set[source])
    skipped: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    def sources(self) -> set[str]:
        out: set[str] = set()
        for _, labels in self.entries.values():
            out.update(labels)
        return out


@dataclass(frozen=True)
class ContaminationVerdict:
    doc_id: str
    flagged: bool
    sources: tuple[str, ...] = ()
    first_offset: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "flagged": self.flagged,
            "sources": list(self.sources),
            "first_offset": self.first_offset,
        }


def _ngram_digest(window: Sequence[str]) -> bytes:
    return hashlib.blake2b(
        " ".join(window).encode("utf-8"), digest_size=_NGRAM_DIGEST_SIZE
    ).digest()


def build_ngram_index(
    references: Iterable[TranscriptDocument],
    n: int = 10,
    profile: str = "basic",
) -> NgramIndex:
    """Collect all n-grams of the references; documents shorter than n
    tokens contribute nothing and are tallied as skipped."""
    if n < 1:
        raise ValueError("n must be >= 1")
    index = NgramIndex(n=n, profile=profile)
    for doc in references:
        toks = tokens(doc.full_text(), profile)
        if len(toks) < n:
            index.skipped += 1
            continue
        label = doc.doc_id
        for i in range(len(toks) - n + 1):
            window = tuple(toks[i : i + n])
            digest = _ngram_digest(window)
            entry = index.entries.get(digest)
            if entry is None:
                index.entries[digest] = (window, {label})
            else:
                entry[1].add(label)
    return index


def decontaminate(doc: TranscriptDocument, index: NgramIndex) -> ContaminationVerdict:
    """Flag the document iff any consecutive n-token window appears in the
    index. Digest hits are confirmed by exact token comparison."""
    toks = tokens(doc.full_text(), index.profile)
    n = index.n
    sources: set[str] = set()
    first_offset: Optional[int] = None
    for i in range(len(toks) - n + 1):
        window = tuple(toks[i : i + n])
        entry = index.entries.get(_ngram_digest(window))
        if entry is None or entry[0] != window:
            continue
        if first_offset is None:
            first_offset = i
        sources.update(entry[1])
    return ContaminationVerdict(
        doc_id=doc.doc_id,
        flagged=first_offset is not None,
        sources=tuple(sorted(sources)),
        first_offset=first_offset,
    )
