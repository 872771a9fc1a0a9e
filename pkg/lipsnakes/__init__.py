"""Outer Lipschitz geometry of surface germs on finite link models."""

__version__ = "0.1.0"
