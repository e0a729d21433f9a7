"""Online familywise error rate control.

Procedure configurations are plain dicts with the same keys as the JSON
config files, e.g. ``{"procedure": "addis-spending", "alpha": 0.2}``.
"""

import json

from . import _core
from ._core import (
    AuditFailure,
    Decision,
    Infeasible,
    MetricsReport,
    SimConfig,
    Stream,
    clustered_pi,
    gen_stream,
)

__all__ = [
    "AuditFailure",
    "Decision",
    "Infeasible",
    "MetricsReport",
    "Scheduler",
    "SimConfig",
    "Stream",
    "audit",
    "cli",
    "clustered_pi",
    "cstar",
    "estimate_metrics",
    "expected_discoveries",
    "gen_stream",
    "optimal_gamma",
    "optimal_q",
    "run",
    "validate",
]


def _text(config):
    if isinstance(config, str):
        return json.dumps({"procedure": config})
    return json.dumps(config)


class Scheduler:
    """Stateful procedure: call ``step(p)`` once per hypothesis, in order."""

    def __init__(self, config):
        self._impl = _core.Scheduler(_text(config))

    def step(self, p, lag=None):
        return self._impl.step(p, lag)

    def trace(self):
        return self._impl.trace()

    @property
    def steps(self):
        return self._impl.steps

    @property
    def config(self):
        return json.loads(self._impl.config_json)


def run(config, p_values, lags=None):
    return _core.run(_text(config), list(p_values), list(lags or []))


def validate(config):
    """Returns a list of findings; empty means the config is usable."""
    return _core.validate_config(_text(config))


def audit(trace, config):
    return _core.audit(list(trace), _text(config))


def estimate_metrics(configs, sim=None, **fields):
    if isinstance(configs, (str, dict)):
        configs = [configs]
    sim = sim or SimConfig()
    for key, value in fields.items():
        if not hasattr(sim, key):
            raise TypeError(f"unknown simulation field {key!r}")
        setattr(sim, key, value)
    return _core.estimate_metrics([_text(c) for c in configs], sim)


def cstar(pi_A, mu_A, mu_N):
    return _core.cstar(pi_A, mu_A, mu_N)


def optimal_q(N, mu_A, alpha=0.2):
    """Returns (q*, E_N[D] at q*) for a finite horizon N >= 2."""
    return _core.optimal_q(N, mu_A, alpha)


def expected_discoveries(N, pi_A, mu_A, alpha=0.2, series=None):
    """Returns (value, error bound) for Alpha-Spending."""
    series = series or {"kind": "q", "q": 2.0}
    return _core.expected_discoveries(N, alpha, json.dumps(series), pi_A, mu_A)


def optimal_gamma(pi, mu, alpha, horizon):
    """Returns (weights, eta)."""
    return _core.optimal_gamma(list(pi), list(mu), alpha, horizon)


def cli(*args):
    """Runs the command-line front end in-process; returns (exit code, stdout, stderr)."""
    return _core.cli([str(a) for a in args])
