"""Hermite-spectral tools for the 1D quintic and cubic resonant systems.

The package is organized around a single representation: complex Hermite
coefficients (:class:`~resonant1d.hermite.HermiteState`).  On top of that,

* :mod:`resonant1d.hermite`     basis, quadrature, transforms, observables
* :mod:`resonant1d.propagators` harmonic flow, Fourier map, Mehler oracle
* :mod:`resonant1d.multilinear` E_A functionals, T_6/T_4 flow operators
* :mod:`resonant1d.dynamics`    RK4 integration with invariant monitoring
* :mod:`resonant1d.experiments` reproducible experiment recipes
* :mod:`resonant1d.cli`         command-line front end
"""

from .hermite import (
    GridCoverageError,
    HermiteState,
    QuadratureError,
    SpectralGrid,
    analyze,
    basis_state,
    build_grid,
    compensated_gauss_hermite,
    gauss_hermite_rule,
    hermite_eval,
    hs_norm,
    inner,
    load_state,
    make_grid,
    mass,
    observables,
    observables_grid,
    project_function,
    save_state,
    synthesize,
)
from .propagators import (
    SingularTimeError,
    fourier_map,
    harmonic_flow,
    inverse_fourier_map,
    mehler_eval,
)
from .multilinear import (
    CUBIC_SHARP,
    CUBIC_T_BOUND,
    GAUSSIAN,
    Decomposition,
    Isometry,
    QUINTIC_SHARP,
    QUINTIC_T_BOUND,
    ResonantConfig,
    a_lambda,
    b_lambda,
    decompose_isometry,
    e4_eval,
    e6_eval,
    e_a_eval,
    functional_time_average,
    lambda_to_theta,
    resonant_apply,
    rotation_2d,
    rotation_about,
    stationary_eigenvalue,
    t_a_apply,
)
from .dynamics import (
    DivergenceError,
    Trajectory,
    approximation_experiment,
    full_profile_rhs,
    hamiltonian_value,
    integrate,
    resonant_rhs,
    rhs_full_profile,
    rhs_resonant,
)
from .experiments import (
    random_state,
    render_text,
    run_approx_study,
    run_operator_bound_check,
    run_sharp_constant_check,
    run_stationary_table,
    run_symmetry_suite,
)

__version__ = "0.1.0"
