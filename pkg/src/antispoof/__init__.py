"""Deepfake speech detection: acoustic features, boosted trees, RFE and evaluation."""

__version__ = "0.1.0"
