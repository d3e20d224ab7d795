"""Random d-regular 0/1 matrices: sampling, shifted spectra, and the
combinatorial machinery behind smallest-singular-value lower bounds."""

from .core import (
    RegularMatrix,
    RegularityError,
    apply_adjoint_shifted,
    apply_shifted,
    enumerate_all,
    from_json,
    from_json_dict,
    from_row_supports,
    to_json,
)
from .sampler import (
    ChainState,
    apply_switch,
    default_burn_in,
    derive_seed,
    initial_matrix,
    sample,
    switch_step,
    uniformity_chi_square,
)
from .spectra import (
    SpectralReport,
    distance_to_span,
    is_singular_exact,
    numerically_singular,
    singular_extremes,
    smin_below_threshold_highprec,
    verify_distance_lower_bound,
)
from .taxonomy import (
    TaxonomyParams,
    ValueProfile,
    VectorClass,
    classify,
    classify_profile,
    compute_params,
    is_almost_constant,
    lower_bound_certificate,
    norm_bound_check,
    rearrange,
    separated_pairs,
)
from .graph_events import (
    EventReport,
    check_csj,
    check_omega1,
    check_omega_k_eps,
    eps1_of_delta,
    find_zero_minor,
    left_right_sets,
    neighborhood,
    row_overlap_bound,
)
from .anticoncentration import LOQuery, lo_ball_exact, lo_ball_mc, lo_bound_ratio
from .harness import ExperimentConfig, RunRecord, bound_table, run_campaign, singularity_rate

__version__ = "0.1.0"
