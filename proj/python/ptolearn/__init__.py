"""Rate experiments for end-to-end vs full-field operator learning, and Fourier Neural Mappings."""

import json

from ._core import (
    FnmModel,
    RateSpec,
    compare_exponents,
    e2e_posterior_mean,
    e2e_risk,
    ee_rate_general,
    ee_rate_optimal,
    effective_dimension,
    ff_rate_powerlaw,
    ff_rate_sobolev,
    ff_risk,
    fitted_qoi_decay,
    qoi_coefficients,
    regularized_inverse_residual,
    rho_ee,
    rho_ff,
    sample_inputs,
    series_oracle_powerlaw,
    spectrum,
    verify_lemmas,
)
from . import _core


def run_sweep(config):
    """Run an EE ("kind": "ee") or FF ("kind": "ff") sweep from a config dict; returns the summary dict."""
    return json.loads(_core._run_sweep(json.dumps(config)))


def run_comparison(config):
    """Paired EE/FF sweeps on the factorized truth; returns slopes, exponents and the crossing curve."""
    return json.loads(_core._run_comparison(json.dumps(config)))


def run_fnm_task(config):
    """Train FNM variants on the synthetic or identity task; returns median test errors per (variant, N)."""
    return json.loads(_core._run_fnm_task(json.dumps(config)))


def fnm_model(config, seed=0):
    """FnmModel from a config dict (variant, inputDim, outputDim, width, modes, depth, ...)."""
    return FnmModel(json.dumps(config), seed)


__all__ = [
    "FnmModel",
    "RateSpec",
    "compare_exponents",
    "e2e_posterior_mean",
    "e2e_risk",
    "ee_rate_general",
    "ee_rate_optimal",
    "effective_dimension",
    "ff_rate_powerlaw",
    "ff_rate_sobolev",
    "ff_risk",
    "fitted_qoi_decay",
    "fnm_model",
    "qoi_coefficients",
    "regularized_inverse_residual",
    "rho_ee",
    "rho_ff",
    "run_comparison",
    "run_fnm_task",
    "run_sweep",
    "sample_inputs",
    "series_oracle_powerlaw",
    "spectrum",
    "verify_lemmas",
]
