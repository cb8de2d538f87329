"""
Utility functions for SigShape.
Contains colored status output.
"""
