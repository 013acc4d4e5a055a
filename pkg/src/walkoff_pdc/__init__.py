"""Spatial two-photon amplitude of type-I PDC in one or two walk-off crystals."""

__version__ = "0.1.0"
