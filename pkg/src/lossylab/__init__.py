"""Exact-arithmetic laboratory for lossy reductions of finite promise problems."""

__version__ = "0.1.0"
