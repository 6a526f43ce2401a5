"""Security-investment decisions under epidemic risk on random graphs.

Layers: breach-probability families (``breach_models``), single-agent
optimal investment and monotonicity checks (``investment``), mean-field
network breach probabilities (``epidemic``), fulfilled-expectations
equilibria and welfare (``equilibrium``), Monte-Carlo validation on random
graphs (``simulate``), and a CLI (``cli``) tying them together.
"""

__version__ = "0.1.0"

from .breach_models import (
    BreachModel,
    GordonLoeb,
    Portfolio,
    ProtectionItem,
    Rational,
    knapsack_exact,
    knapsack_relaxed,
    load_portfolio_csv,
)
from .investment import (
    AgentProblem,
    GridSpec,
    InvestmentSolution,
    check_monotone_investment,
    check_one_over_e,
    check_submodular_conditions,
    solve,
    solve_gl,
)
from .epidemic import (
    DegreeDistribution,
    Empirical,
    EpidemicModel,
    Fixed,
    FixedPointResult,
    Poisson,
    breach_probs,
    check_network_monotone,
    curve,
    fixed_point_y,
    g,
    h,
    psi,
)
from .equilibrium import (
    Equilibrium,
    EquilibriumReport,
    GameSpec,
    Homogeneous,
    PiecewiseLinearCDF,
    Power,
    TypeDistribution,
    Uniform01,
    WelfareReport,
    critical_mass,
    f_inv,
    find_equilibria,
    social_optimum,
    welfare,
    willingness,
)
from .simulate import (
    ConfigurationModel,
    ErdosRenyi,
    Graph,
    SimConfig,
    SimResult,
    generate_graph,
    percolate,
    run,
)
from .errors import (
    ConsistencyError,
    ConvergenceError,
    InputError,
    UnsupportedOperationError,
)
from .reports import MonotonicityReport, Violation
