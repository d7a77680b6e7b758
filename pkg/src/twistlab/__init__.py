"""twistlab: exact construction and certification of high-rank quadratic twist
families of elliptic curves over the rational function field Q(u)."""

__version__ = "0.1.0"
