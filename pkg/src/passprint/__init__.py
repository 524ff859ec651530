"""Random circuit generation, optimization passes and pass fingerprinting."""

__version__ = "0.1.0"
