"""Planar geometry behind the width-2 lower bound: propagation, parity and diagnostics."""
from .curve import P1, P2, Q, counterexample_curve, write_curve_csv
from .diagnostics import (DiagnosticReport, diagnose, load_corpus, local_search, random_corpus, random_width2_net,
                          run_corpus, summarize)
from .parity import OnBarrierError, parity, parity_fan
from .planar import Affine, Box, Polyline, Quadrant
from .propagate import Reformulation, find_box_stable_layer, propagate, reformulate
from .simplex import PreconditionError, SimplexBound, check_affine_on_S, simplex_bound

__all__ = [
    "P1", "P2", "Q", "counterexample_curve", "write_curve_csv",
    "DiagnosticReport", "diagnose", "load_corpus", "local_search", "random_corpus", "random_width2_net", "run_corpus",
    "summarize",
    "OnBarrierError", "parity", "parity_fan",
    "Affine", "Box", "Polyline", "Quadrant",
    "Reformulation", "find_box_stable_layer", "propagate", "reformulate",
    "PreconditionError", "SimplexBound", "check_affine_on_S", "simplex_bound",
]
