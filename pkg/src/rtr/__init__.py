"""Occurrence typing with refinement types and linear integer arithmetic."""

__version__ = "0.1.0"
