"""Cache-aided general linear function retrieval: schemes, oracles and load analysis."""

__version__ = "0.1.0"
