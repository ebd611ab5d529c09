"""Packaged templates for prodnorm."""
