"""sEMG acquisition device validation toolkit."""

import json as _json

from . import _core
from ._core import (
    SCHEMA_VERSION,
    EmgValidError,
    __version__,
    bland_altman,
    decode_frame,
    encode_frame,
    mape,
    pearson,
    run_cli,
    window_features,
)

__all__ = [
    "SCHEMA_VERSION",
    "EmgValidError",
    "__version__",
    "analyze_stream",
    "assess_auxiliary",
    "assess_leakage",
    "assess_mech",
    "bland_altman",
    "compare",
    "decode_frame",
    "descriptive_stats",
    "emulate",
    "encode_frame",
    "mape",
    "pearson",
    "run_cli",
    "window_features",
]


def descriptive_stats(values, decimals=4):
    return _json.loads(_core.descriptive_stats(list(values), decimals))


def assess_leakage(rows, labels=None, worst_case=False, limit_ua=10.0, marginal_multiplier=2.0):
    return _json.loads(
        _core.assess_leakage([list(r) for r in rows], list(labels or []), worst_case, limit_ua, marginal_multiplier)
    )


def assess_auxiliary(values, limit_ua=100.0, marginal_multiplier=2.0):
    return _json.loads(_core.assess_auxiliary(list(values), limit_ua, marginal_multiplier))


def compare(prototype, prototype_rate, reference, reference_rate, window_ms=200.0, overlap=0.5):
    return _json.loads(
        _core.compare(list(prototype), prototype_rate, list(reference), reference_rate, window_ms, overlap)
    )


def analyze_stream(data, rate_hz=800.0, duration_s=0.0):
    return _json.loads(_core.analyze_stream(bytes(data), rate_hz, duration_s))


def emulate(frames, drop=0.0, corrupt=0.0, seed=1, start_seq=0, rate_hz=800.0):
    data, ledger = _core.emulate(frames, drop, corrupt, seed, start_seq, rate_hz)
    return data, _json.loads(ledger)


def assess_mech(force_n, displacement_mm, area_mm2, height_mm):
    return _json.loads(_core.assess_mech(list(force_n), list(displacement_mm), area_mm2, height_mm))
