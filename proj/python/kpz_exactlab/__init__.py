"""Exact formulas and simulations for discrete-time TASEP, PNG and the Airy1 process."""

import json as _json

from ._core import (
    F,
    K_airy1,
    K_finite,
    K_flat,
    K_png_fixed_time,
    K_png_spacelike,
    KpzError,
    airy_ai,
    bessel_i,
    bessel_j,
    brute_force_law,
    joint_prob_airy1,
    joint_prob_growth,
    joint_prob_png,
    joint_prob_tasep,
    sample_png_heights,
    sample_tasep_points,
    scaling_coeffs,
    selftest,
)
from ._core import run_command as _run_command


def run(config: dict) -> dict:
    """Run a harness command described by a configuration dict (same keys as the CLI JSON file)."""
    return _run_command(_json.dumps(config))


__all__ = [
    "F",
    "K_airy1",
    "K_finite",
    "K_flat",
    "K_png_fixed_time",
    "K_png_spacelike",
    "KpzError",
    "airy_ai",
    "bessel_i",
    "bessel_j",
    "brute_force_law",
    "joint_prob_airy1",
    "joint_prob_growth",
    "joint_prob_png",
    "joint_prob_tasep",
    "run",
    "sample_png_heights",
    "sample_tasep_points",
    "scaling_coeffs",
    "selftest",
]
