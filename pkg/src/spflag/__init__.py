"""Exact computations with symplectic flag symbols and graded prolongations."""
from __future__ import annotations

__version__ = "0.1.0"
