"""Curation and evaluation toolkit for weakly-supervised ASR corpora."""

__version__ = "0.1.0"
