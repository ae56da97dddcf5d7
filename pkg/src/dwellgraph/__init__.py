"""Dwell-time certificates for discrete-time switched linear systems whose
switchings are constrained by a digraph.

Typical use::

    from dwellgraph import analyze, catalog
    mats, graphs = catalog.get_example("example1")
    result = analyze(mats, graphs["G1"])
    result["winner"]["minimum"].tau_int
"""

from . import catalog
from .cycles import CycleCertificate, max_cycle_mean, max_cycle_ratio
from .dwell import (DwellReport, analyze, avg_dwell, bimodal_avg_dwell,
                    bimodal_min_dwell_corollary1, bimodal_min_dwell_corollary2,
                    bimodal_min_dwell_pnorm, equilibrate_condition, integer_dwell,
                    min_dwell_defective, min_dwell_nondefective)
from .errors import (ChainFailure, Defective, DimensionMismatch, DwellGraphError,
                     EpsilonSearchFailed, MixedFormsInvalid, NonPositiveLoss, NotSchurStable,
                     ParseError, SignalNotAdmissible, Singular, SpecError, TooLarge,
                     UnknownExample, ValidationError)
from .graph import Adjacency, SwitchingGraph, build_graph, fully_connected, ring
from .numerics import (ModalForm, choose_epsilon, condition_number, eigendecompose,
                       jordan_decompose, spectral_norm, spectral_radius)
from .simulation import (SwitchingSignal, empirical_decay, generate_signal, simulate,
                         validate_signal, verify_bound)
from .specfile import SystemSpec, parse_spec, render_spec

__version__ = "0.1.0"
