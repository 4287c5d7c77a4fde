"""Casimir-Lifshitz pressure between lamellar gratings out of thermal equilibrium."""

import csv
import io

from ._core import (  # noqa: F401
    ConfigError,
    Error,
    UsageError,
    ValidationError,
    __version__,
    builtin_materials,
    echo_config,
    half_space_pressure,
    permittivity,
    permittivity_imag,
    run,
)


def run_table(command, config, workers=1):
    """Run a command and parse its CSV body into a list of dicts (header comments dropped)."""
    text = run(command, config, workers)
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO(body))]
