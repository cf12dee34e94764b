"""Exact-diagonalization toolkit for detecting the superradiant phase
transition in the Rabi and Dicke models via out-of-time-order correlators."""

from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
