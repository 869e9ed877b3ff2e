"""Verification lab for online matching on the line.

Servers sit on the real line, requests arrive one by one and must be matched
immediately and irrevocably; the adversary constructions here drive every
distance-sensitive local algorithm to a logarithmic competitive ratio, and the
analysis module checks the underlying closed forms exactly.
"""

from .core import (
    ContractViolationError,
    Instance,
    LocalInterval,
    MatchState,
    Rational,
    Side,
    extract_local_interval,
    format_rational,
    matching_cost,
    mirror_interval,
    parse_rational,
    surrounding_free_servers,
    translate_interval,
)
from .offline import OptResult, optimal_balanced, optimal_bruteforce, optimal_cost, optimal_dp
from .algorithms import (
    BiasedChoice,
    BiasParams,
    ChoiceAlgorithm,
    ConstantChoice,
    GreedyChoice,
    HarmonicChoice,
    RunTrace,
    TNetCostAlgorithm,
    WfaAlgorithm,
    biased_family_choice,
    greedy_choice,
    harmonic_p_left,
    probe_locality,
    probe_symmetry,
    run_online,
    wfa_serve,
)
from .adversary import (
    AdversaryTree,
    GapLedger,
    UnboundedWitness,
    build_adaptive,
    build_randomized,
    build_symmetric,
    find_flip_gap,
    mirror_tree,
)
from .analysis import (
    BoundReport,
    FreeServerDistribution,
    check_doubling_condition,
    check_symmetric_distribution,
    fast_growth_upper_bound,
    geometric_index_mean,
    harmonic_free_server_distribution,
    monte_carlo_ratio,
    online_cost_alt_form,
    online_cost_formula,
    opt_cost_formula,
    prefix_mass_ratio,
    ratio_bound_deterministic,
    ratio_bound_randomized,
    symmetric_ratio,
    symmetric_ratio_quoted_bound,
    weighted_index_mean,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
