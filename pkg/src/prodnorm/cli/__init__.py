"""Command-line interface for prodnorm."""
