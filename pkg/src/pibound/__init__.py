"""Greedy Policy Iteration workbench with exact arithmetic."""

from .analysis import (
    AnnotatedSequence,
    TheoremViolation,
    Violation,
    ViolationReport,
    check_acyclicity,
    check_non_inclusion,
    check_non_inclusion_k2,
    count_repeated_state_sets,
    find_neighbor_chain,
    tensor_rank_check,
    verify_trace_properties,
)
from .bounds import BoundBreakdown, hoeffding_tail, improved_bound, mansour_singh_bound, validate_trace_bounds
from .formats import FormatError, load_trace, parse_mdp, serialize_mdp
from .iteration import PiTrace, greedy_step, run_policy_iteration
from .mdp import (
    BudgetExceeded,
    Comparison,
    DominationGraph,
    ImprovementSet,
    Mdp,
    MdpError,
    ValueVector,
    brute_force_optimal,
    compare,
    domination_dag,
    evaluate_all,
    evaluate_policy,
    improvement_set_fast,
    improvement_set_oracle,
    switch,
)
from .order_regular import SearchResult, check_order_regular, conjecture_check, fibonacci, search_max_rows
from .pseudo import (
    PseudoPiSequence,
    build_supersequence,
    canonical_improvement_set,
    closed_form_length,
    greedy_subsequence,
    verify_pseudo,
)
from .random_mdp import generate_random_mdp

__version__ = "0.1.0"
