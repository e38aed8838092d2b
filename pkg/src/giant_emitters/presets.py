"""Named scenario sets that regenerate the data behind each published figure.

Each ``figN*`` preset maps to exactly one figure panel; ``table1`` checks the
device parameters.
"""

from __future__ import annotations

import math

C = math.cos
PI = math.pi

_DELTA_SWEEP = [round(-2.5 + 0.05 * i, 10) for i in range(101)]
_G0_SWEEP = [round(0.02 * i, 10) for i in range(1, 51)]


def _scenario(name, params, outputs, grid=None, **extra):
    entry = {"name": name, "params": params, "outputs": outputs}
    if grid is not None:
        entry["grid"] = grid
    entry.update(extra)
    return entry


PRESETS: dict[str, dict] = {
    "fig1b": {
        "description": "Spectral function of the single-point emitter across the band",
        "scenarios": [_scenario("small", {"g0": 0.2}, ["spectral"])],
    },
    "fig1c": {
        "description": "Bound-state energies versus coupling g0/xi",
        "scenarios": [_scenario("boc_vs_g0", {"delta": 0.0}, ["bound_states"], sweep={"g0": _G0_SWEEP})],
    },
    "fig2b": {
        "description": "|alpha(t)|^2 heatmap across the band, single-point emitter",
        "scenarios": [
            _scenario("detuning_sweep", {"g0": 0.2}, ["trace"], {"t_max": 100.0, "n_t": 501}, sweep={"delta": _DELTA_SWEEP})
        ],
    },
    "fig2c": {
        "description": "Representative decays at delta = 0, 3/2, 2 with lattice cross-check",
        "scenarios": [
            _scenario(f"delta_{tag}", {"delta": dv}, ["trace", "bound_states"], {"t_max": 100.0, "n_t": 1001}, oracle=True)
            for tag, dv in (("0", 0.0), ("1.5", 1.5), ("2", 2.0))
        ],
    },
    "fig3a": {
        "description": "Radiation field, propagating case delta = 3/2",
        "scenarios": [_scenario("field_delta_1.5", {"delta": 1.5}, ["trace", "field"], {"t_max": 100.0, "n_t": 401}, field_sites=200)],
    },
    "fig3b": {
        "description": "Radiation field, bound case delta = 2",
        "scenarios": [_scenario("field_delta_2", {"delta": 2.0}, ["trace", "field", "bound_states"], {"t_max": 100.0, "n_t": 401}, field_sites=200)],
    },
    "fig5a": {
        "description": "Giant-emitter integral kernel across the band",
        "scenarios": [_scenario(f"kernel_d{d}", {"nc": 2, "d": d, "delta": 0.0}, ["spectral"]) for d in (2, 12, 30)],
    },
    "fig5b": {
        "description": "Effective spectral function for several separations",
        "scenarios": [_scenario(f"jeff_d{d}", {"nc": 2, "d": d}, ["spectral"]) for d in (2, 4, 12, 30)],
    },
    "fig6a": {
        "description": "|alpha(t)|^2 heatmap across the band, giant emitter d=2",
        "scenarios": [
            _scenario("sweep_d2", {"nc": 2, "d": 2}, ["trace"], {"t_max": 100.0, "n_t": 501}, sweep={"delta": _DELTA_SWEEP})
        ],
    },
    "fig6b": {
        "description": "|alpha(t)|^2 heatmap across the band, giant emitter d=12",
        "scenarios": [
            _scenario("sweep_d12", {"nc": 2, "d": 12}, ["trace"], {"t_max": 100.0, "n_t": 501}, sweep={"delta": _DELTA_SWEEP})
        ],
    },
    "fig6c": {
        "description": "BIC traces for {delta=0, d=2} and {delta=2cos(5pi/12), d=12}",
        "scenarios": [
            _scenario("bic_d2", {"nc": 2, "d": 2, "delta": 0.0}, ["trace", "bound_states"], {"t_max": 100.0, "n_t": 1001}, oracle=True),
            _scenario("bic_d12", {"nc": 2, "d": 12, "delta": 2 * C(5 * PI / 12)}, ["trace", "bound_states"], {"t_max": 100.0, "n_t": 1001}, oracle=True),
        ],
    },
    "fig7a": {
        "description": "Field of the BIC, {delta=2cos(5pi/12), d=12}",
        "scenarios": [_scenario("bic_field_d12", {"nc": 2, "d": 12, "delta": 2 * C(5 * PI / 12)}, ["trace", "field", "bound_states"], {"t_max": 100.0, "n_t": 401})],
    },
    "fig7b": {
        "description": "Breathing field of the oscillating bound state, {delta=2cos(pi/12), d=12}",
        "scenarios": [
            _scenario(
                "oscillating_d12",
                {"nc": 2, "d": 12, "delta": 2 * C(PI / 12)},
                ["trace", "field", "bound_states", "rates", "entropy"],
                {"t_max": 100.0, "n_t": 401},
            )
        ],
    },
    "fig7c": {
        "description": "Quasi-oscillating field, {delta=2, d=30}",
        "scenarios": [_scenario("quasi_oscillating_d30", {"nc": 2, "d": 30, "delta": 2.0}, ["trace", "field", "bound_states"], {"t_max": 100.0, "n_t": 401})],
    },
    "table1": {
        "description": "Circuit realization of the reference device parameters",
        "scenarios": [
            _scenario("device", {}, ["circuit"], circuit={"omega0_hz": 5.71e9, "xi_hz": 249e6, "g0_hz": 49.8e6})
        ],
    },
}


def preset_config(name: str) -> dict:
    try:
        preset = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}") from None
    return {"scenarios": preset["scenarios"]}
