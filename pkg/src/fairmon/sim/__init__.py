"""Seedable trace simulators with ground truth."""

from . import attention, coin, lending
from .sampling import poisson

__all__ = ["attention", "coin", "lending", "poisson"]
