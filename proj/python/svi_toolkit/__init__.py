"""Stability analysis of parametric set-valued inclusions."""

import json
import os

from ._svi import (
    InputError,
    InstanceError,
    __version__,
    cov,
    emit_csv,
    excess,
    fan_phi,
    input_hash,
    validate,
)
from . import _svi

__all__ = [
    "InputError",
    "InstanceError",
    "Report",
    "__version__",
    "cov",
    "emit_csv",
    "excess",
    "fan_phi",
    "input_hash",
    "load_spec",
    "run",
    "validate",
]


class Report(dict):
    """Parsed report; `text` keeps the exact serialized form."""

    def __init__(self, text, violated):
        super().__init__(json.loads(text))
        self.text = text
        self.violated = violated

    def result(self, analysis_id):
        for r in self["results"]:
            if r["id"] == analysis_id:
                return r["result"]
        raise KeyError(analysis_id)

    def csv(self, series):
        return emit_csv(self.text, series)


def _text(spec):
    if isinstance(spec, (dict, list)):
        return json.dumps(spec)
    return spec


def load_spec(path):
    with open(os.fspath(path), encoding="utf-8") as f:
        return f.read()


def run(spec, command="certify", only=(), jobs=1, timings=False, seed=None):
    """Run a spec (JSON text or a dict) and return the report."""
    text, violated = _svi.run_spec(_text(spec), command, list(only), jobs, timings, seed)
    return Report(text, violated)
