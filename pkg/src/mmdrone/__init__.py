"""Simulator of uncompressed 4K video streaming from a drone over a 60 GHz link."""

__version__ = "0.1.0"
