"""Degree counting and torus solver for 2x2 singular Liouville systems."""

import json

from ._core import (
    LiouvilleError,
    NonConvergence,
    OnCriticalSet,
    classify,
    degree,
    intrinsic_rho,
    rank_class,
    series,
    solve,
    spectrum,
    symmetrize,
    torus_odd_degree,
    validate_hypothesis,
)
from ._core import run_command as _run_command

__all__ = [
    "LiouvilleError",
    "NonConvergence",
    "OnCriticalSet",
    "classify",
    "degree",
    "intrinsic_rho",
    "rank_class",
    "run",
    "series",
    "solve",
    "spectrum",
    "symmetrize",
    "torus_odd_degree",
    "validate_hypothesis",
]


def run(command, spec, format="json"):
    """Run a CLI command on a spec (dict or JSON text). Returns (exit_code, output)."""
    text = spec if isinstance(spec, str) else json.dumps(spec)
    code, out = _run_command(command, text, format)
    if format == "json":
        out = json.loads(out)
    return code, out
