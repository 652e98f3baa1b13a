"""Sign-flip orbits on wiring diagrams of the longest permutation and on
upper triangular matrices over F_2."""

__version__ = "0.1.0"
