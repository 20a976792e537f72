"""Pool-based active-learning simulation toolkit for morphological inflection."""

__version__ = "0.1.0"
