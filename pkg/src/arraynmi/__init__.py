"""Normalized mean interference of massive-MIMO antenna topologies.

Closed-form and Monte Carlo NMI for five base-station array layouts (ULA,
HURA, VURA, UCirA, UCylA) under clustered ray-based channels, with MMSE
uplink SINR simulation and a CLI reproducing the standard sweep studies.
"""

from .angular import (
    AngularModel,
    MarginalDistribution,
    cf_marginal,
    composite_cf,
    measured_model,
    sample_composite_angles,
    sample_ray_angles,
    uniform_model,
)
from .bessel import BesselGrid, bessel_j
from .geometry import (
    ArrayConfig,
    SpaceConstraint,
    TopologyKind,
    antenna_positions,
    footprint_diameter,
    spacing_under_constraint,
    steering_matrix,
    steering_vector,
    two_ray_interference,
)
from .nmi import (
    DEFAULT_TRUNCATION,
    NmiValue,
    SeriesConvergenceError,
    SeriesParams,
    TruncationPolicy,
    axial_phase_kernel,
    nmi_closed_form,
    pair_series_params,
    planar_expectation,
    vertical_expectation,
)
from .simulate import (
    PathLossParams,
    RayChannel,
    SinrConfig,
    calibrate_rho,
    cluster_powers,
    drop_users,
    mean_mmse_sinr,
    mmse_sinr,
    nmi_monte_carlo,
    sample_channel,
)

__version__ = "0.1.0"

__all__ = [
    "AngularModel", "MarginalDistribution", "cf_marginal", "composite_cf",
    "measured_model", "uniform_model", "sample_composite_angles", "sample_ray_angles",
    "BesselGrid", "bessel_j",
    "ArrayConfig", "SpaceConstraint", "TopologyKind", "antenna_positions",
    "footprint_diameter", "spacing_under_constraint", "steering_matrix",
    "steering_vector", "two_ray_interference",
    "DEFAULT_TRUNCATION", "NmiValue", "SeriesConvergenceError", "SeriesParams",
    "TruncationPolicy", "axial_phase_kernel", "nmi_closed_form",
    "pair_series_params", "planar_expectation", "vertical_expectation",
    "PathLossParams", "RayChannel", "SinrConfig", "calibrate_rho",
    "cluster_powers", "drop_users", "mean_mmse_sinr", "mmse_sinr",
    "nmi_monte_carlo", "sample_channel",
    "__version__",
]
