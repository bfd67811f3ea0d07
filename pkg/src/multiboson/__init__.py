"""Exact symbolic toolkit for multilocal free-field algebras and their correspondences."""

__version__ = "0.1.0"
