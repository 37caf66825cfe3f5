"""
Test package for the truncated-exponential extrema toolkit.
"""
