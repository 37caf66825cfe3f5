"""
Truncated Exponential Extrema - Core Package

Maximizers, certified bounds, series expansions and closed-form minima for
ratio families built from the truncated exponential series.
"""

__version__ = "1.0.0"
__author__ = "Truncated Exponential Extrema"
