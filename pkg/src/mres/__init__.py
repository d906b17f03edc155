"""Matroid resonance, Orlik-Solomon algebras, multinets and holonomy invariants."""

__version__ = "0.1.0"
