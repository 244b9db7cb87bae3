"""Exact construction and certification of radial Fourier eigenfunctions
with prescribed zeros, via q-series arithmetic on modular forms."""

from __future__ import annotations

from .qseries import (
    QSeries,
    TruncationTooSmall,
    ZeroLeadingCoefficient,
    rational,
    valuation,
)

__all__ = [
    "QSeries",
    "TruncationTooSmall",
    "ZeroLeadingCoefficient",
    "rational",
    "valuation",
]
