"""Lower-bound ball-union construction: exact generation, claim checks and boundary counting."""

__version__ = "0.1.0"
