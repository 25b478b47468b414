"""Timed Creol to timed automata translation and schedulability analysis."""

__version__ = "0.1.0"
