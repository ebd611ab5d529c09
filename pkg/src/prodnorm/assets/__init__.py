"""Packaged assets for prodnorm (e.g., sample YAML)."""
