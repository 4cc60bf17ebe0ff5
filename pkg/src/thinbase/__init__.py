"""Thin additive bases of finite order: constructions and exact verification."""

__version__ = "0.1.0"
