"""fpdtrack - zero-shot refinement of point tracks by fine-grained point discrimination."""

__version__ = "0.1.0"
