"""Growth-cycle models and diagram-of-equations tooling.

Two halves that meet in the middle:

* ``models`` / ``dynamics`` — a small catalogue of employment/wage-share
  growth-cycle models (predator-prey, the classic share/employment cycle
  and its damped variant, a lagged three-dimensional extension, and a
  two-country trade coupling), integrated with a fixed-step RK4 core and
  classified by Lyapunov exponent and return-map evidence.

* ``poset_sheaf`` / ``equation_sheaf`` / ``sections`` — equation systems
  presented as diagrams over a poset of variables and equations, with
  global/local section checks, degree-of-freedom counting, and a chase
  that extends a partial assignment through the diagram.

``systems`` ties the two together by writing the model equations in
diagram form, and ``cli`` exposes everything as a command-line tool.
"""

from .poset_sheaf import (
    Poset, PosetError, Sheaf, SheafError, MissingRestrictionError,
    StalkSpace, finite_set, real_vector, real_interval, product_space,
    subset_space, up_set, check_commutativity, verify_section,
    poset_to_dot, sheaf_to_dot,
)
from .equation_sheaf import (
    Equation, EquationSystem, EquationSystemError, ExplicitnessError,
    build_poset, build_product_sheaf, build_solution_sheaf,
    build_explicit_solution_sheaf, assignment_from_values,
    dependency_graph, DependencyGraph, enumerate_sections,
)
from .models import (
    ParamError, DomainError, LVParams, GoodwinParams, VadaszParams,
    CountryParams, TradeParams, FixedPoint, ModelSpec,
    lotka_volterra, goodwin, modified_goodwin, vadasz, two_country,
    lv_rhs, goodwin_rhs, modified_goodwin_rhs, vadasz_rhs, two_country_rhs,
    lv_jacobian, goodwin_jacobian,
    linear_phillips, lv_first_integral, goodwin_first_integral,
    goodwin_period, goodwin_equilibrium, classify_fixed_point,
    jacobian_at, demand, short_run_price_equilibrium,
    price_excess_demand_rhs, price_adjustment_matrix,
    CLASSIFICATIONS, PRICE_MODES,
)
from .dynamics import (
    Trajectory, StepRejectionError, integrate, conservation_report,
    LyapunovResult, lyapunov_exponent, CycleResult, detect_limit_cycle,
    DynamicsVerdict, classify_dynamics,
)
from .systems import (
    goodwin_pointwise_system, two_country_pointwise_system,
    generic_pointwise_system, goodwin_trajectory_system,
    commutativity_demo, state_collapse_map, trade_clusters,
    TRADE_SUBSYSTEMS,
)
from .sections import (
    SubDiagram, degrees_of_freedom, Determination, Ambiguity,
    ExtensionResult, extend_local_section, section_report, result_to_dict,
)
from .modelfile import (ModelFileError, LoadedModel, load_model,
                        load_scenario, with_param)

__version__ = "0.1.0"

__all__ = [
    "Poset", "PosetError", "Sheaf", "SheafError", "MissingRestrictionError",
    "StalkSpace", "finite_set", "real_vector", "real_interval",
    "product_space", "subset_space", "up_set", "check_commutativity",
    "verify_section", "poset_to_dot", "sheaf_to_dot",
    "Equation", "EquationSystem", "EquationSystemError", "ExplicitnessError",
    "build_poset", "build_product_sheaf", "build_solution_sheaf",
    "build_explicit_solution_sheaf", "assignment_from_values",
    "dependency_graph", "DependencyGraph", "enumerate_sections",
    "ParamError", "DomainError", "LVParams", "GoodwinParams", "VadaszParams",
    "CountryParams", "TradeParams", "FixedPoint", "ModelSpec",
    "lotka_volterra", "goodwin", "modified_goodwin", "vadasz", "two_country",
    "lv_rhs", "goodwin_rhs", "modified_goodwin_rhs", "vadasz_rhs",
    "two_country_rhs", "lv_jacobian", "goodwin_jacobian",
    "linear_phillips", "lv_first_integral", "goodwin_first_integral",
    "goodwin_period", "goodwin_equilibrium", "classify_fixed_point",
    "jacobian_at", "demand", "short_run_price_equilibrium",
    "price_excess_demand_rhs", "price_adjustment_matrix",
    "CLASSIFICATIONS", "PRICE_MODES",
    "Trajectory", "StepRejectionError", "integrate", "conservation_report",
    "LyapunovResult", "lyapunov_exponent", "CycleResult",
    "detect_limit_cycle", "DynamicsVerdict", "classify_dynamics",
    "goodwin_pointwise_system", "two_country_pointwise_system",
    "generic_pointwise_system", "goodwin_trajectory_system",
    "commutativity_demo", "state_collapse_map", "trade_clusters",
    "TRADE_SUBSYSTEMS",
    "SubDiagram", "degrees_of_freedom", "Determination", "Ambiguity",
    "ExtensionResult", "extend_local_section", "section_report",
    "result_to_dict",
    "ModelFileError", "LoadedModel", "load_model", "load_scenario",
    "with_param",
    "__version__",
]
