"""Equivariant index of vector fields on periodic covers.

Group arithmetic and word-metric balls (:mod:`.groups`), coinvariants of
bounded functions (:mod:`.coinvariants`), voltage-labelled cover complexes
(:mod:`.complexes`), combinatorial and analytic vector fields
(:mod:`.discrete`, :mod:`.analytic`), the bounded-form integral
(:mod:`.integral`) and a scenario runner (:mod:`.harness`).
"""

from .coinvariants import (
    CoinvariantClass,
    CoinvariantRep,
    class_equal,
    class_reduce,
    delta,
    folner_mean,
    ones,
    ponzi_flow_free_group,
    whyte_check,
    whyte_refute_ones,
)
from .complexes import (
    build_window,
    euler_char,
    facet_generators,
    library_complex,
    orientation_opposition_check,
    validate_base,
)
from .discrete import DiscreteField, acyclic_matching_check, critical_index_table
from .errors import ConfigError, InputError
from .groups import GroupSpec, ball, cyclic_z, free_abelian, free_group, surface_group
from .harness import Scenario, VerdictReport, run_scenario, verify_diffeo, verify_infinitude
from .tables import IndexTable

__version__ = "0.1.0"
