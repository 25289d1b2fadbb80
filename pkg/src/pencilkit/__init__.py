"""Exact reduction, defects and canonical forms of matrix pencils."""
