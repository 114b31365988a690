"""Quasigroup stream ciphers, orthogonal-system block ciphers and attacks on them."""

__version__ = "0.1.0"
