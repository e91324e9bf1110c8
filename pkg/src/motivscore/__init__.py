"""Predicting student performance and learning strategy from motivation scores."""

__version__ = "0.1.0"
