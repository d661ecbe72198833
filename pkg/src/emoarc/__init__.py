"""Lexicon-based emotion arcs for literary corpora."""

__version__ = "0.1.0"
