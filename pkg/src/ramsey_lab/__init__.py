"""Tools for asymmetric Ramsey properties of random graphs: densities, decompositions, search."""

__version__ = "0.1.0"
