"""Sublevel-set growth of polynomial maps: exact exponents, a nondegeneracy check and desk-scale measurements."""
__version__ = "0.1.0"
