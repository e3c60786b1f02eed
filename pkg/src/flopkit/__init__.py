"""Exact computational algebra for flops: NCCRs, contraction algebras, spherical objects."""

__version__ = "0.1.0"
