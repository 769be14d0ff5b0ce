"""Two-dimensional binary freezing cellular automata: simulation, classification and constructions."""

__version__ = "0.1.0"
