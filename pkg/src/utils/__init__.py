"""
Utility package for liedim.
"""
