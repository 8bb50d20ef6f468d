"""Multi-objective land-use allocation: model, engines, indicators, harness."""

from .engines import (
    ALGORITHMS,
    EngineConfig,
    Individual,
    RelaxationSchedule,
    RunRecord,
    apply_relaxation_phase,
    crowding_distance,
    fast_non_dominated_sort,
    initialize_population,
    run_cr_des,
    run_engine,
    run_msbx_mo,
    run_msbx_nsga2,
    run_soa,
)
from .instance_io import (
    GeneratorSpec,
    generate_synthetic,
    instance_from_dict,
    instance_to_json,
    load_instance,
    parse_instance,
    save_instance,
)
from .metrics import (
    FrontSet,
    NormalizationBounds,
    combine_fronts,
    gd,
    gd_plus,
    hypervolume_2d,
    igd,
    igd_plus,
    indicator_suite,
    normalize,
    pareto_filter,
)
from .model import (
    Allocation,
    ConstraintReport,
    LandUse,
    ObjectiveVector,
    Plot,
    ProblemInstance,
    check_constraints,
    evaluate_compatibility,
    evaluate_price,
    proportions,
)
from .operators import (
    EncodedPlot,
    OperatorConfig,
    decode_uses,
    encode_uses,
    polynomial_mutation,
    random_mutation,
    sbx_crossover,
    scaled_add,
    scaled_difference,
    tournament_select,
    uniform_crossover,
)
from .stats import (
    CldAssignment,
    PairwiseResult,
    SampleGroup,
    compact_letter_display,
    dunn_posthoc,
    kruskal_wallis,
)

__version__ = "0.1.0"
