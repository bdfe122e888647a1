"""Minimum-width approximators: explicit constructions, error metrics and the planar lower-bound geometry."""
from .net import Activation, Layer, Network, compose, compose_all, evaluate, load, network, save

__version__ = "0.1.0"

__all__ = ["Activation", "Layer", "Network", "compose", "compose_all", "evaluate", "load", "network", "save"]
