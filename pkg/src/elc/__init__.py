"""Exact engine for enriched positive logic over finite bases."""

__version__ = "0.1.0"
