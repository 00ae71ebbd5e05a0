"""Roll-wave construction and spectral stability for inviscid Saint-Venant flow."""

__version__ = "0.1.0"
