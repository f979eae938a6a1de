"""Python front end for the hypmac C++ core.

Every function takes a config as a dict (same schema as the CLI JSON files) and
returns a dict decoded from the core's JSON report.
"""

import json

from . import _core
from ._core import ConfigError, Error

__all__ = [
    "ConfigError",
    "Error",
    "compare",
    "constants",
    "layers",
    "normalize_config",
    "profile",
    "simulate",
    "sweep_asymptotics",
    "sweep_metastability",
    "sweep_tau",
]


def _call(fn, config, *args):
    return json.loads(fn(json.dumps(config), *args))


def normalize_config(config):
    return _call(_core.normalize_config, config)


def constants(config=None):
    return _call(_core.constants, config or {"model": "mac"})


def profile(config):
    return _call(_core.profile, config)


def simulate(config):
    return _call(_core.simulate, config)


def layers(config):
    return _call(_core.layers, config)


def compare(config):
    return _call(_core.compare, config)


def sweep_metastability(config, threads=1):
    return _call(_core.sweep_metastability, config, threads)


def sweep_asymptotics(config, threads=1):
    return _call(_core.sweep_asymptotics, config, threads)


def sweep_tau(config, threads=1):
    return _call(_core.sweep_tau, config, threads)
