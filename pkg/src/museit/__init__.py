"""Muse-it: retrieve, annotate, cluster, and export music-related Reddit discourse."""

__version__ = "0.1.0"
