"""Core package: exact arithmetic, intersection theory, stability and canonical forms."""
