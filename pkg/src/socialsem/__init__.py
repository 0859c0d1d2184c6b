"""Author profiling in eigen word spaces, nested CRF named-entity tagging and entity linking."""

__version__ = "0.1.0"
