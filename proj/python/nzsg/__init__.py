"""Gradient dynamics on network zero-sum games.

Thin wrapper over the C++ core. JSON results are decoded into Python objects.
"""

import json as _json

from . import _core
from ._core import (  # noqa: F401
    ConfigError,
    Game,
    PreconditionError,
    SamplingBounds,
    SolverError,
    linear_game,
    lipschitz_game,
    quadratic_game,
    random_profile,
    run,
)

__version__ = _core.__version__


def game_from_spec(spec):
    """Build a game from a spec dict (or JSON string)."""
    return _core.game_from_spec(spec if isinstance(spec, str) else _json.dumps(spec))


def spectrum(game, eta):
    """Spectral report of the game Hessian at the equilibrium."""
    return _json.loads(_core.spectrum(game, eta))


def _decode(result):
    result = dict(result)
    result["summary"] = _json.loads(result.pop("summary_json"))
    return result


def run_experiment(config):
    """Run an experiment from a config dict (or JSON string)."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _decode(_core.run_experiment(text))


def validate(spec, seed=0):
    """Structural and modulus checks for a game spec dict (or JSON string)."""
    text = spec if isinstance(spec, str) else _json.dumps(spec)
    return _decode(_core.validate(text, seed))
