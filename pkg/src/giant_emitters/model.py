"""Parameter types for an emitter coupled to a cavity-array waveguide.

All energies are measured in units of the hopping ``xi`` and times in
``1/xi``.  The emitter couples to one lattice site (``nc=1``) or to the two
sites ``+-d/2`` (``nc=2``); in the latter case each leg carries ``g0/nc``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any


class ValidationError(ValueError):
    """Raised when a parameter set violates a model invariant."""


@dataclass(frozen=True)
class ModelParams:
    xi: float = 1.0
    g0: float = 0.2
    delta: float = 0.0
    nc: int = 1
    d: int | None = None
    omega0: float = 0.0

    @property
    def leg_coupling(self) -> float:
        """Coupling carried by each emitter-cavity bond."""
        return self.g0 / self.nc

    @property
    def giant(self) -> bool:
        return self.nc == 2

    @property
    def coupling_sites(self) -> tuple[int, ...]:
        if self.nc == 1:
            return (0,)
        half = self.d // 2
        return (-half, half)

    def replace(self, **changes: Any) -> ModelParams:
        data = asdict(self)
        data.update(changes)
        return ModelParams(**data)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class SimulationGrid:
    t_max: float = 100.0
    n_t: int = 1001
    lattice_half_width: int = 400

    @property
    def times(self):
        import numpy as np

        return np.linspace(0.0, self.t_max, self.n_t)

    @property
    def dt(self) -> float:
        return self.t_max / (self.n_t - 1)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def validate(params: ModelParams) -> ModelParams:
    """Return ``params`` unchanged if every invariant holds.

    Raises
    ------
    ValidationError
        On non-positive ``xi``/``g0``, ``nc`` outside {1, 2}, or a missing,
        odd or too small separation ``d`` for a two-point emitter.
    """
    if not params.xi > 0:
        raise ValidationError(f"xi must be positive, got {params.xi}")
    if not params.g0 > 0:
        raise ValidationError(f"g0 must be positive, got {params.g0}")
    if params.nc not in (1, 2):
        raise ValidationError(f"nc must be 1 or 2, got {params.nc}")
    if params.nc == 2:
        d = params.d
        if d is None or int(d) != d:
            raise ValidationError("nc=2 requires an integer separation d")
        if d < 2 or d % 2:
            raise ValidationError(f"d must be even and >= 2, got {d}")
    elif params.d not in (None, 0):
        raise ValidationError("d is only meaningful for nc=2")
    return params


def validate_grid(grid: SimulationGrid, xi: float = 1.0) -> SimulationGrid:
    if grid.t_max < 0:
        raise ValidationError("t_max must be non-negative")
    if grid.n_t < 2:
        raise ValidationError("n_t must be larger than 1")
    if not grid.t_max * 2 * xi < grid.lattice_half_width:
        raise ValidationError(
            f"t_max={grid.t_max} lets the wavefront (speed 2xi) reach the "
            f"lattice edge at {grid.lattice_half_width} sites"
        )
    return grid


def params_from_dict(data: dict[str, Any]) -> ModelParams:
    known = {"xi", "g0", "delta", "nc", "d", "omega0"}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"unknown parameter keys: {sorted(unknown)}")
    kwargs = dict(data)
    if "nc" in kwargs:
        kwargs["nc"] = int(kwargs["nc"])
    if kwargs.get("d") is not None:
        if int(kwargs["d"]) != kwargs["d"]:
            raise ValidationError(f"d must be an integer, got {kwargs['d']}")
        kwargs["d"] = int(kwargs["d"])
    return validate(ModelParams(**kwargs))


def grid_from_dict(data: dict[str, Any], xi: float = 1.0) -> SimulationGrid:
    known = {"t_max", "n_t", "lattice_half_width"}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"unknown grid keys: {sorted(unknown)}")
    kwargs = dict(data)
    if "n_t" in kwargs:
        kwargs["n_t"] = int(kwargs["n_t"])
    if "lattice_half_width" in kwargs:
        kwargs["lattice_half_width"] = int(kwargs["lattice_half_width"])
    return validate_grid(SimulationGrid(**kwargs), xi)


OUTPUT_KINDS = frozenset({"trace", "field", "bound_states", "rates", "entropy", "circuit", "spectral"})


@dataclass
class Scenario:
    name: str
    params: ModelParams
    grid: SimulationGrid = field(default_factory=SimulationGrid)
    outputs: frozenset[str] = frozenset({"trace"})
    sweep: dict[str, list[float]] | None = None
    field_sites: int = 60
    oracle: bool = False
    circuit: dict[str, float] | None = None


def scenario_from_dict(data: dict[str, Any]) -> Scenario:
    params = params_from_dict(data.get("params", {}))
    grid = grid_from_dict(data.get("grid", {}), params.xi)
    outputs = frozenset(data.get("outputs", ["trace"]))
    bad = outputs - OUTPUT_KINDS
    if bad:
        raise ValidationError(f"unknown outputs: {sorted(bad)}")
    sweep = data.get("sweep")
    if sweep is not None:
        bad_keys = set(sweep) - {"delta", "g0"}
        if bad_keys:
            raise ValidationError(f"only delta and g0 sweeps are supported, got {sorted(bad_keys)}")
    return Scenario(
        name=str(data["name"]),
        params=params,
        grid=grid,
        outputs=outputs,
        sweep=sweep,
        field_sites=int(data.get("field_sites", 60)),
        oracle=bool(data.get("oracle", False)),
        circuit=data.get("circuit"),
    )


def load_config(path: str | Path) -> list[Scenario]:
    """Read a JSON run manifest into scenarios.

    The file holds either one scenario object or ``{"scenarios": [...]}``.
    Scenario names must be unique.
    """
    with open(path) as fh:
        data = json.load(fh)
    return scenarios_from_config(data)


def scenarios_from_config(data: dict[str, Any]) -> list[Scenario]:
    entries = data["scenarios"] if "scenarios" in data else [data]
    scenarios = [scenario_from_dict(entry) for entry in entries]
    names = [s.name for s in scenarios]
    if len(set(names)) != len(names):
        raise ValidationError(f"scenario names must be unique: {names}")
    return scenarios
