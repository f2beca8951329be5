"""Mean-value quadrature identities for harmonic, panharmonic and metaharmonic fields."""

__version__ = "0.1.0"

from .errors import MVQError  # noqa: E402,F401
