"""Fair allocation of indivisible goods under matroid constraints."""

from .algorithms import (
    ALGORITHMS,
    Solution,
    Trace,
    back_and_forth_crr,
    capped_round_robin,
    choose_algorithm,
    crr,
    cut_and_choose_two_agents,
    dispatch,
    iterated_priority_matching,
    iterated_swaps,
    per_category_crr,
    per_category_rr,
    rr_squared,
    solve,
)
from .errors import (
    CapabilityError,
    FairAllocError,
    InputError,
    InvariantViolation,
    NoFeasiblePartitionError,
    NotBaseOrderableError,
)
from .fairness import (
    envy_graph,
    fairness_report,
    feasible_value,
    is_ef1,
    is_efx,
    is_fef1,
    is_pareto_efficient,
    is_weak_fef1,
    nash_welfare,
    positive_feasible_envy,
)
from .matroid import (
    FreeExtension,
    GraphicMatroid,
    LaminarMatroid,
    PartitionMatroid,
    TransversalMatroid,
    UniformMatroid,
    free_extend,
    is_base_orderable,
)
from .model import Allocation, Instance, check_feasible
from .optimize import max_weight_swm, priority_matching

__version__ = "0.1.0"
