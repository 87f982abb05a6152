"""qhabiro: exact q-series algebra for inverted Habiro series of knots.

Truncated Laurent q-series arithmetic, balanced q-combinatorics, the
coefficient transforms between the two series expansions of a knot, the
Omega-ring product, residue families with classical-identity checks,
Dehn-surgery q-series invariants by three routes, Park polynomials, and
high-precision numerical asymptotics at roots of unity.
"""

from .series import (
    INF,
    DegreeBound,
    DegreeBoundError,
    DeltaAtLeast,
    ExactnessError,
    NotInvertibleError,
    PrecisionError,
    QAlgebraError,
    QSeries,
    RemainderError,
    exact_div,
    series_add,
    series_delta,
    series_invert_unit,
    series_mirror,
    series_mul,
    series_subst_qpow,
    series_sum_bounded,
)
from .qcomb import (
    DivergentPochhammerError,
    curly,
    curly_fact,
    curly_poch,
    jacobi_symbol,
    jacobi_theta_coeff,
    poch,
    qbinom,
    qfact,
    qint,
    qpoch,
    theta_trunc,
)
from .transform import (
    CoeffSeq,
    IntegralityError,
    LbcError,
    LbcReport,
    a_from_f,
    f_from_a,
    fk_degree_bound,
    fk_degree_check,
    lbc_check,
    lbc_margin,
    sigma_tilde_x_expansion,
)
from .omega import (
    OmegaElement,
    gamma,
    lbc_product_bound,
    omega_from_a,
    omega_mirror,
    omega_mul,
    omega_unit,
    sigma0_x_expansion,
    verify_sigma_product,
    x_expansion,
)
from .knots import (
    ClosedFormError,
    CompositeCycleError,
    ExponentIntegralityError,
    KnotError,
    KnotFileError,
    KnotSpec,
    UnknownKnotError,
    a_coeff,
    f_coeff,
    get_knot,
    knot_names,
    load_knots,
    mirror,
)
from .residues import (
    ResidueAtom,
    ResidueFamily,
    branch_coeffs_41,
    branch_residue_41,
    descendant,
    f_from_residues,
    residue_family,
    residue_series,
    residue_sigma,
    residue_theorem_check,
    residue_theorem_window,
    residues_from_f,
    sign_constancy,
    tail_check,
    trefoil_recurrence_check,
)
from .surgery import (
    ConvergenceError,
    FractionalExponentError,
    SurgeryParams,
    ZhatResult,
    laplace_monomial,
    park_poly_explicit,
    park_poly_residue,
    surgery_weight_poly,
    zhat,
    zhat_via_fk,
    zhat_via_ih,
    zhat_via_residues,
)
from .asympt import (
    PHI_F,
    PHI_J,
    QUOTIENT_TABLE_PREFIX,
    AsymptoticsError,
    GrowthResult,
    PerturbSeries,
    PeriodicityReport,
    emit_csv,
    eval_root_of_unity,
    extract_phi,
    f41_eval,
    f_poly_exact,
    growth_rate,
    is_palindromic,
    periodicity_check,
    phi_quotient_check,
    richardson,
    series_mul,
    series_sqrt_inv,
    vol_41,
)

__version__ = "1.0.0"
