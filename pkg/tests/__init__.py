"""Test package for tropsev."""
