"""stuq: uncertainty quantification for spatiotemporal forecasters."""

__version__ = "0.1.0"
