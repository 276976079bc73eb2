"""Gaussian Mills-ratio bounds and checks of the Gaussian correlation inequality for layers."""

__version__ = "0.1.0"
