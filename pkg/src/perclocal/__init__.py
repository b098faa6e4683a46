"""Empirical locality of critical bond percolation on finite graph sequences."""
from ._accel import backend
from .graph import Graph, RootedBall, ball, components, from_edge_list, read_edge_list, write_edge_list

__version__ = "0.1.0"

__all__ = ["Graph", "RootedBall", "backend", "ball", "components", "from_edge_list",
           "read_edge_list", "write_edge_list"]
