"""Leavitt path algebras of finite no-exit graphs: normal forms, block
decomposition, and dimension theory for projections and finitely presented
modules."""

__version__ = "0.1.0"
