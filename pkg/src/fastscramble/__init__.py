"""Stabilizer and statevector tools for shuffle-based scrambling circuits."""

__version__ = "0.1.0"
