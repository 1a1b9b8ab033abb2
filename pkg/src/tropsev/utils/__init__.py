"""Utility functions for tropsev package."""

from .file_utils import get_output_filename, read_matrix_file

__all__ = ["get_output_filename", "read_matrix_file"]
