"""Risk-averse scalarization of multiobjective stochastic problems.

Per criterion, outcomes are averaged over the worst scenarios (beta-average);
the criterion averages are then combined by an importance-weighted ordered
average of the worst criteria (r-OWA).  The package evaluates that function
``h``, minimizes it over explicit alternative lists and over 0/1 knapsacks,
and exports the knapsack model as a MILP.
"""
from .core import (
    CriteriaSet,
    HEvaluation,
    OwaWeights,
    RiskParams,
    ScenarioSet,
    beta_average,
    dominates,
    evaluate_h,
    owa_weights,
    r_owa,
    r_owa_polytope_oracle,
    r_owa_weights,
)
from .enumeration import (
    AlternativeSet,
    RankedResult,
    SweepGrid,
    normalize,
    second_phase,
    solve_enumeration,
    sweep,
)
from .export import LinearRow, LpModel, build_lp_model, continuous_optimum, parse_lp_text, write_lp_text
from .knapsack import (
    DeltaReport,
    ExperimentConfig,
    KnapsackInstance,
    KnapsackSolution,
    compute_deltas,
    exhaustive_oracle,
    generate_instance,
    naive_objective,
    msp_objective,
    objective_matrix,
    run_experiment,
    solve_msp,
    solve_naive,
)

__version__ = "0.1.0"
