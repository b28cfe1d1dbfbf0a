"""Möbius functions, class-poset Möbius functions and p-subgroup Euler
characteristics for the unitary groups PSU(3, 2^(2^n)), computed exactly."""

__version__ = "0.1.0"
