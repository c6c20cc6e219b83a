"""Exact computation of twisted exponential sums of Witt vectors over finite
fields, their L-functions, and p-adic Newton and Hodge polygons."""

__version__ = "0.1.0"
