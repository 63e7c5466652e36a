"""Quantum Fisher information for pure states under non-Hermitian evolution."""
__version__ = "0.1.0"
