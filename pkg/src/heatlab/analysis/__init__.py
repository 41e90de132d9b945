"""Verification procedures built on top of the solver."""

from .decay import DecayCheck, decay_lattice, decay_sigma, radial_decay_check
from .levelgraph import (FormulaTerms, Inapplicable, LevelGraph, Theorem2Result, f_second_via_formula,
                         fd_derivatives, level_graph, run_theorem2)
from .monitors import MonitorReport, monitor_proposition
from .superlevel import SuperlevelSet, superlevel_membership
from .theorem1 import (ControlResult, Theorem1Result, Theorem1State, revalidate_witness,
                       run_theorem1, run_theorem1_control)
from .twopoint import LevelMismatch, TwoPointSearchResult, TwoPointSample, run_section4, two_point_H

__all__ = [
    "DecayCheck", "decay_lattice", "decay_sigma", "radial_decay_check",
    "FormulaTerms", "Inapplicable", "LevelGraph", "Theorem2Result", "f_second_via_formula",
    "fd_derivatives", "level_graph", "run_theorem2",
    "MonitorReport", "monitor_proposition",
    "SuperlevelSet", "superlevel_membership",
    "ControlResult", "Theorem1Result", "Theorem1State", "revalidate_witness", "run_theorem1",
    "run_theorem1_control",
    "LevelMismatch", "TwoPointSearchResult", "TwoPointSample", "run_section4", "two_point_H",
]
