"""Content-based file type detection from byte-frequency fileprints."""

__version__ = "0.1.0"
