"""Test suite for pydaar."""
