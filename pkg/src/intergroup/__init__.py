"""Agreement and disagreement between two groups of raters scoring the same subjects."""

__version__ = "0.1.0"
