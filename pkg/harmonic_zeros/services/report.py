"""
Run configuration and the report document every command writes.
"""
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Optional

from harmonic_zeros import SCHEMA_VERSION, TOOL_NAME, TOOL_VERSION, config
from harmonic_zeros.errors import ValidationError
from harmonic_zeros.output import OutputHelper
from harmonic_zeros.services.critical_curve import MIN_SAMPLES_PER_LOOP
from harmonic_zeros.services.harmonic import TrinomialParams

FORMATS = frozenset({"json", "csv", "svg"})


def parse_formats(value) -> FrozenSet[str]:
    """'json,csv' -> {'json', 'csv'}"""
    if isinstance(value, str):
        value = [part.strip() for part in value.split(",")]
    return frozenset(part.lower() for part in value if part)


@dataclass(frozen=True)
class RunConfig:
    n: int
    k: int
    a: float
    b: float
    grid_density: int = field(default_factory=lambda: config["grid_density"])
    samples_per_loop: int = field(default_factory=lambda: config["samples_per_loop"])
    residual_tol: Optional[float] = None
    epsilon: float = field(default_factory=lambda: config["epsilon"])
    output_dir: str = field(default_factory=lambda: config["output_dir"])
    formats: FrozenSet[str] = FORMATS

    def __post_init__(self):
        object.__setattr__(self, "formats", parse_formats(self.formats))

        errors = {}
        if self.grid_density < 1:
            errors["grid_density"] = "grid_density must be >= 1"
        if self.samples_per_loop < MIN_SAMPLES_PER_LOOP:
            errors["samples_per_loop"] = f"samples_per_loop must be >= {MIN_SAMPLES_PER_LOOP}"
        if self.residual_tol is not None and not (
            math.isfinite(self.residual_tol) and self.residual_tol > 0
        ):
            errors["residual_tol"] = "residual_tol must be a positive real"
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            errors["epsilon"] = "epsilon must be a positive real"
        if not self.output_dir:
            errors["output_dir"] = "output_dir is required"
        unknown = self.formats - FORMATS
        if unknown or not self.formats:
            errors["formats"] = f"formats must be a non-empty subset of {sorted(FORMATS)}"
        if errors:
            raise ValidationError("Invalid run configuration", errors)

        # n, k, a, b and a != b are checked here, before any computation
        TrinomialParams(self.n, self.k, self.a, self.b)

    @property
    def params(self) -> TrinomialParams:
        return TrinomialParams(self.n, self.k, self.a, self.b)

    def wants(self, fmt: str) -> bool:
        return fmt in self.formats

    def path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def to_dict(self):
        return {
            "n": self.n,
            "k": self.k,
            "a": float(self.a),
            "b": float(self.b),
            "grid_density": self.grid_density,
            "samples_per_loop": self.samples_per_loop,
            "residual_tol": self.residual_tol,
            "epsilon": self.epsilon,
            "formats": sorted(self.formats),
        }


@dataclass
class ReportDocument:
    """Everything one command computed, in the order it was computed

    Sections a command did not produce stay None and are written as null.
    """

    command: str
    params: TrinomialParams
    run_config: Optional[RunConfig] = None
    census: Any = None
    certificate: Any = None
    prediction: Any = None
    bounds: Any = None
    annuli_report: Any = None
    annuli_omitted: Optional[str] = None
    conjecture: Any = None
    closed_form: Any = None
    unit_disc: Any = None
    curve_summary: Optional[Dict[str, Any]] = None
    error: Optional[Dict[str, Any]] = None
    wall_time_ms: float = 0.0
    generated_at: str = field(default_factory=OutputHelper.format_datetime)

    @property
    def ok(self) -> bool:
        if self.error is not None:
            return False
        return self.census is None or self.census.certified

    @property
    def consistent(self) -> bool:
        """Summary totals agree with the census zero list"""
        if self.census is None:
            return True
        census = self.census
        regular = sum(1 for zero in census.zeros if not zero.singular)
        return census.total == regular == census.count_preserving + census.count_reversing

    def summary(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"ok": self.ok}
        if self.census is not None:
            out.update(
                total=self.census.total,
                count_preserving=self.census.count_preserving,
                count_reversing=self.census.count_reversing,
                sum_orders=self.census.sum_orders,
                certified=self.census.certified,
                consistent=self.consistent,
            )
        if self.certificate is not None:
            out["dominance"] = self.certificate.status.value
            out["implied_total"] = self.certificate.implied_total
        if self.prediction is not None:
            out["predicted_total"] = self.prediction.predicted_total
        if self.annuli_report is not None:
            out["annuli_ok"] = self.annuli_report.ok
        return out

    def to_dict(self) -> Dict[str, Any]:
        def section(value):
            return value.to_dict() if value is not None else None

        return {
            "schema": SCHEMA_VERSION,
            "tool": TOOL_NAME,
            "tool_version": TOOL_VERSION,
            "generated_at": self.generated_at,
            "wall_time_ms": self.wall_time_ms,
            "command": self.command,
            "params": self.params.to_dict(),
            "config": section(self.run_config),
            "summary": self.summary(),
            "census": section(self.census),
            "certificate": section(self.certificate),
            "prediction": section(self.prediction),
            "bounds": section(self.bounds),
            "annuli": section(self.annuli_report),
            "annuli_omitted": self.annuli_omitted,
            "conjecture": section(self.conjecture),
            "closed_form_dominance": section(self.closed_form),
            "unit_disc": section(self.unit_disc),
            "curve": self.curve_summary,
            "error": self.error,
        }


def sweep_document(n, k, epsilon, rows, stabilization, wall_time_ms):
    """Report for a parameter sweep; one entry per (a, b) cell"""
    return {
        "schema": SCHEMA_VERSION,
        "tool": TOOL_NAME,
        "tool_version": TOOL_VERSION,
        "generated_at": OutputHelper.format_datetime(),
        "wall_time_ms": wall_time_ms,
        "command": "sweep",
        "n": n,
        "k": k,
        "epsilon": epsilon,
        "cells": len(rows),
        "failed": sum(1 for row in rows if row.failed),
        "rows": [
            {
                "a": row.a,
                "b": row.b,
                "total": row.total,
                "predicted": row.predicted,
                "reversing": row.reversing,
                "dominance": row.dominance,
                "agreement": row.agreement,
                "certified": row.certified,
                "error": row.error,
            }
            for row in rows
        ],
        "stabilization": stabilization,
    }
