"""Python access to the judgebench core: dataset generation, validation,
benchmark runs, reports and the agreement/pricing helpers."""

from __future__ import annotations

import json
import os
from decimal import Decimal
from typing import Optional, Sequence

from . import _core
from ._core import (
    ConfigError,
    DatasetInvalid,
    InsufficientData,
    JudgeBenchError,
    MalformedJson,
    SchemaViolation,
    UnknownModel,
    configure_logging,
)

__all__ = [
    "ConfigError",
    "DatasetInvalid",
    "InsufficientData",
    "JudgeBenchError",
    "MalformedJson",
    "SchemaViolation",
    "UnknownModel",
    "configure_logging",
    "generate",
    "validate",
    "judge_pair",
    "run",
    "report",
    "prf1",
    "krippendorff_alpha",
    "cost_of",
]


def _dump(obj: Optional[dict]) -> str:
    return "" if obj is None else json.dumps(obj)


def generate(out: os.PathLike | str, *, seed: Optional[int] = None, users: Optional[int] = None,
             config: Optional[dict] = None, travel: Optional[dict] = None, workers: int = 1) -> int:
    """Writes a dataset as JSONL and returns the number of pairs."""
    return _core.generate(os.fspath(out), seed, users, _dump(config), _dump(travel), workers)


def validate(dataset: os.PathLike | str, *, travel: Optional[dict] = None, workers: int = 1) -> dict:
    """Oracle check of every pair. The result has an "ok" flag."""
    return json.loads(_core.validate(os.fspath(dataset), _dump(travel), workers))


def judge_pair(pair: dict, *, travel: Optional[dict] = None) -> dict:
    return json.loads(_core.judge_pair(json.dumps(pair), _dump(travel)))


def run(config: dict) -> dict:
    """Runs (or resumes) a benchmark. Takes the same keys as the CLI config file;
    run_id is required here."""
    return json.loads(_core.run(json.dumps(config)))


def report(run_dir: os.PathLike | str) -> dict:
    return json.loads(_core.report(os.fspath(run_dir)))


def prf1(tp: int, fp: int, tn: int, fn: int) -> tuple[Optional[float], Optional[float], Optional[float]]:
    """Precision, recall, F1 with "incorrect" as the positive class. None when undefined."""
    return _core.prf1(tp, fp, tn, fn)


def krippendorff_alpha(matrix: Sequence[Sequence[Optional[int]]], metric: str = "nominal") -> Optional[float]:
    """matrix is units x raters, None for a missing annotation."""
    return _core.krippendorff_alpha([list(row) for row in matrix], metric)


def cost_of(model_id: str, input_tokens: int, output_tokens: int,
            rates: Optional[os.PathLike | str] = None) -> Decimal:
    return Decimal(_core.cost_of(model_id, input_tokens, output_tokens, os.fspath(rates) if rates else ""))


