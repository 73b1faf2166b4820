"""Near-field multi-user MIMO with dense dipole arrays."""

from ._core import (
    ConfigError,
    Error,
    InvariantViolation,
    NumericalError,
    __version__,
    assemble,
    build_channel,
    evaluate_metrics,
    linear_array,
    mf_dual,
    mf_loss_constrained,
    mf_radiated_constrained,
    mutual_impedance,
    planar_array,
    precoded_powers,
    run,
    self_impedance_real,
    sinr_per_user,
    sum_capacity,
    ue_line,
    wmmse,
)

__all__ = [
    "ConfigError",
    "Error",
    "InvariantViolation",
    "NumericalError",
    "__version__",
    "assemble",
    "build_channel",
    "evaluate_metrics",
    "linear_array",
    "mf_dual",
    "mf_loss_constrained",
    "mf_radiated_constrained",
    "mutual_impedance",
    "planar_array",
    "precoded_powers",
    "run",
    "self_impedance_real",
    "sinr_per_user",
    "sum_capacity",
    "ue_line",
    "wmmse",
]
