"""Finite models of coherent tree colorings and negative partition searches."""

from .arena import (
    Arena,
    ArityError,
    Node,
    child,
    grid_levels,
    ho_key,
    ho_sorted,
    is_strictly_below,
    node_meet_data,
    splice,
    tree_leq,
    x_member,
)
from .certs import Certificate, Clause
from .closure import (
    Family,
    FamilyCatalog,
    close,
    close_delta,
    closure_classes,
    is_closed,
)
from .coloring import (
    ColoringState,
    LimitStepTrace,
    Phi0Instance,
    build_to,
    c_good,
    coh_defect,
    color_of,
    extend_limit,
    extend_successor,
    hom_audit,
    hom_containment_audit,
    homogeneous_extract,
    init_coloring,
    phi0_audit,
    q_compatible,
    structural_audit,
)
from .forcing import (
    Condition,
    FilterSim,
    FreeRequest,
    HitRequest,
    IncompatibleExtension,
    ProtectRequest,
    RestrictionKey,
    add_root,
    club_thin,
    extend_condition,
    extract_family,
    family_audit,
    hit_block,
    protect_closure,
    run_generic,
    succ_key,
)
from .ladder import InsufficientLevels, LadderResult, audit_ladder, build_ladder
from .ordinals import (
    ZERO,
    NotALimitError,
    Ordinal,
    fin,
    format_ordinal,
    omega,
    parse_ordinal,
)
from .pr1 import Branch, PairColoring, Pr1Instance, induce_pi, pi_audit, pr1_search
from .scenario import Scenario, ScenarioError, load_scenario, scenario_run
from .twothin import (
    TwoThinCatalog,
    TwoThinEntry,
    audit_two_thin,
    build_two_thin,
    entry_family,
    height_bijection,
    project_family,
)

__version__ = "0.1.0"
