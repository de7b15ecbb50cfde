"""Prebunking target selection under competitive IC-N diffusion."""

__version__ = "0.1.0"
