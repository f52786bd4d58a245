"""Seifert form pairs, isometric triples and Steenbrink polarized mixed Hodge structures."""

__version__ = "0.1.0"
