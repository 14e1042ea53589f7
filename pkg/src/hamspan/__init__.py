"""Hamilton cycles and the cycle space over GF(2)."""

__version__ = "0.1.0"
