"""Deterministic simulator and analysis toolkit for selection-pressure
voting consensus with peer-prediction trustworthiness scoring."""

__version__ = "1.0.0"
