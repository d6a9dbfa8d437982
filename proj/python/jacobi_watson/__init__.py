"""Jacobi expansions, Watson kernels and related harmonic analysis."""

import json

from ._core import (
    Error,
    KernelEval,
    abel_mean,
    cz_decompose,
    gauss_jacobi,
    jacobi_eval,
    jacobi_norm,
    kernel_mass,
    kernel_shift_violations,
    poisson_mass,
    run_cli,
    watson_kernel,
)

__all__ = [
    "Error",
    "KernelEval",
    "abel_mean",
    "cz_decompose",
    "gauss_jacobi",
    "jacobi_eval",
    "jacobi_norm",
    "kernel_mass",
    "kernel_shift_violations",
    "poisson_mass",
    "report",
    "run_cli",
    "watson_kernel",
]


def report(*args):
    """Run a CLI subcommand and return its parsed JSON report and exit code."""
    code, out, err = run_cli([str(a) for a in args])
    if code == 2:
        raise Error(err.strip() or "usage error")
    return json.loads(out), code
