"""Exact and Rademacher-sum computation of McKay-Thompson series, the
moonshine tower, and Monster multiplicity distributions."""

__version__ = "0.1.0"
