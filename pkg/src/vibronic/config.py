"""Run configuration with ``VIBRONIC_*`` environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from typing import Mapping, Optional

from .errors import ValidationError

ENV_PREFIX = "VIBRONIC_"


@dataclass(frozen=True)
class RunConfig:
    cutoff: int = 8
    epsilon: float = 1e-4
    bin_width: Optional[float] = None  # None: 10 for cm-1, 0.01 for dimensionless
    tolerance: float = 1e-9
    route_tolerance: float = 1e-6
    basis_budget: int = 2_000_000
    permanent_limit: int = 14
    working_pad: int = 16
    threads: Optional[int] = None  # None: all cores

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValidationError("cutoff must be positive")
        if not 0 < self.epsilon < 1:
            raise ValidationError("epsilon must lie in (0, 1)")
        if self.bin_width is not None and self.bin_width <= 0:
            raise ValidationError("bin_width must be positive")
        # zero tolerances are allowed so that verification failures can be provoked
        if self.tolerance < 0 or self.route_tolerance < 0:
            raise ValidationError("tolerances must be non-negative")
        if self.basis_budget < 1 or self.permanent_limit < 1 or self.working_pad < 0:
            raise ValidationError("basis_budget and permanent_limit must be positive, working_pad non-negative")
        if self.threads is not None and self.threads < 1:
            raise ValidationError("threads must be positive")

    @property
    def fock_kwargs(self) -> dict:
        return {"pad": self.working_pad, "basis_budget": self.basis_budget}

    def updated(self, **kwargs) -> "RunConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def _convert(name: str, raw: str):
    if name in ("cutoff", "basis_budget", "permanent_limit", "working_pad", "threads"):
        return int(raw)
    return float(raw)


def from_env(environ: Optional[Mapping[str, str]] = None, **overrides) -> RunConfig:
    """Defaults, then ``VIBRONIC_<FIELD>`` variables, then explicit ``overrides``."""
    environ = os.environ if environ is None else environ
    values = {}
    for f in fields(RunConfig):
        raw = environ.get(ENV_PREFIX + f.name.upper())
        if raw is not None and raw != "":
            try:
                values[f.name] = _convert(f.name, raw)
            except ValueError as exc:
                raise ValidationError(f"{ENV_PREFIX}{f.name.upper()}={raw!r}: {exc}") from None
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)
