"""Geometric and mixed-state phases in neutron polarimetry, interferometry and CHSH tests."""

__version__ = "0.1.0"
