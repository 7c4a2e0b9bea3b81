"""hyperbench: a verification workbench for hyperreflexivity constants."""

__version__ = "0.1.0"
