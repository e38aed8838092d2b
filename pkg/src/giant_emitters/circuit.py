"""Lumped-element circuit (LC-resonator chain plus transmon) to model parameters.

Inputs are SI: henry, farad and joule.  Frequencies come out as angular
frequencies in rad/s.  The chain's node capacitance is ``C_sigma = C0 + 2C``
(diagonal of the capacitance matrix); coupling a transmon through ``Cg``
renormalizes it to ``C_sigma' = C_sigma + Cg``, which then sets the cavity
frequency and hopping.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

from scipy.constants import hbar

from .model import ModelParams

REGIME_LIMIT = 0.1
TWO_PI = 2.0 * math.pi


class CircuitRegimeWarning(UserWarning):
    """Coupling capacitance too large for the first-order inverse-capacitance expansion."""


@dataclass(frozen=True)
class CircuitParams:
    l0: float
    c0: float
    c: float
    cg: float
    c_sigma_q: float
    ej: float
    ec: float

    def __post_init__(self):
        for name in ("l0", "c0", "c", "c_sigma_q", "ej", "ec"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.cg < 0:
            raise ValueError("cg must be non-negative")

    @property
    def c_sigma(self) -> float:
        return self.c0 + 2.0 * self.c

    @property
    def c_sigma_prime(self) -> float:
        return self.c_sigma + self.cg

    @property
    def regime_ratio(self) -> float:
        return self.c / self.c_sigma

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class EffectiveModel:
    """Effective tight-binding parameters in rad/s.

    ``delta`` is the qubit detuning from the cavity frequency, the quantity
    that enters the rotating-frame model; ``omega_q`` is the bare qubit
    frequency ``sqrt(8 E_C E_J)/hbar``.
    """

    omega0: float
    xi: float
    g0: float
    omega_q: float
    regime_ratio: float
    warnings: tuple[str, ...] = field(default=())

    @property
    def delta(self) -> float:
        return self.omega_q - self.omega0

    def in_hz(self) -> dict[str, float]:
        return {k: v / TWO_PI for k, v in (("omega0", self.omega0), ("xi", self.xi), ("g0", self.g0), ("omega_q", self.omega_q), ("delta", self.delta))}

    def normalized(self) -> dict[str, float]:
        """Everything in units of the hopping ``xi``."""
        return {"omega0": self.omega0 / self.xi, "g0": self.g0 / self.xi, "delta": self.delta / self.xi, "xi": 1.0}

    def to_model_params(self, nc: int = 1, d: int | None = None) -> ModelParams:
        n = self.normalized()
        return ModelParams(xi=1.0, g0=n["g0"], delta=n["delta"], nc=nc, d=d, omega0=n["omega0"])

    def to_dict(self) -> dict:
        out = {"si_rad_per_s": {"omega0": self.omega0, "xi": self.xi, "g0": self.g0, "omega_q": self.omega_q, "delta": self.delta}}
        out["hz"] = self.in_hz()
        out["model_units"] = self.normalized()
        out["regime_ratio"] = self.regime_ratio
        out["warnings"] = list(self.warnings)
        return out


def effective_model(cp: CircuitParams) -> EffectiveModel:
    """Cavity frequency, hopping, qubit coupling and qubit frequency of a circuit.

    A ``CircuitRegimeWarning`` is issued (and recorded on the result) when
    ``C / C_sigma >= 0.1``.
    """
    c_prime = cp.c_sigma_prime
    omega0 = 1.0 / math.sqrt(cp.l0 * c_prime)
    xi = omega0 * cp.c / (2.0 * c_prime)
    omega_q = math.sqrt(8.0 * cp.ec * cp.ej) / hbar
    g0 = 0.5 * cp.cg * math.sqrt(omega_q * omega0 / (cp.c_sigma_q * c_prime))
    notes = []
    if cp.regime_ratio >= REGIME_LIMIT:
        msg = f"C/C_sigma = {cp.regime_ratio:.3f} is outside the weak-coupling regime (< {REGIME_LIMIT})"
        warnings.warn(msg, CircuitRegimeWarning, stacklevel=2)
        notes.append(msg)
    return EffectiveModel(omega0, xi, g0, omega_q, cp.regime_ratio, tuple(notes))


def solve_circuit(
    omega0: float,
    xi: float,
    g0: float,
    omega_q: float | None = None,
    c_sigma_prime: float = 500e-15,
    c_sigma_q: float = 80e-15,
    ec: float = hbar * TWO_PI * 250e6,
) -> CircuitParams:
    """Circuit reproducing target ``omega0, xi, g0`` (rad/s).

    The free choices are the renormalized node capacitance, the transmon
    capacitance and charging energy, and the qubit frequency (default:
    resonant with the cavities).  Raises ``ValueError`` when the targets
    force a non-positive ``C0``.
    """
    if omega_q is None:
        omega_q = omega0
    c = 2.0 * xi * c_sigma_prime / omega0
    l0 = 1.0 / (omega0**2 * c_sigma_prime)
    cg = 2.0 * g0 * math.sqrt(c_sigma_q * c_sigma_prime / (omega_q * omega0))
    c0 = c_sigma_prime - cg - 2.0 * c
    if c0 <= 0:
        raise ValueError("targets are unreachable with this c_sigma_prime (C0 <= 0)")
    ej = (hbar * omega_q) ** 2 / (8.0 * ec)
    return CircuitParams(l0=l0, c0=c0, c=c, cg=cg, c_sigma_q=c_sigma_q, ej=ej, ec=ec)


TABLE_OMEGA0_HZ = 5.71e9
TABLE_XI_HZ = 249e6
TABLE_G0_HZ = 50e6


def table_check(rel_tol: float = 1e-3) -> dict:
    """Consistency of the reference device values and their circuit realization.

    Checks the ``g0 = xi/5`` arithmetic, its rounding to 50 MHz, the ratio
    ``omega0/xi`` and that inverse-solved circuits reproduce each target to
    ``rel_tol``.
    """
    checks = []

    def add(name, value, expected, tol):
        ok = abs(value - expected) <= tol
        checks.append({"name": name, "value": value, "expected": expected, "tolerance": tol, "pass": ok})

    g_fifth = TABLE_XI_HZ / 5.0
    add("xi/5 [MHz]", g_fifth / 1e6, 49.8, 1e-12)
    add("xi/5 rounded [MHz]", float(round(g_fifth / 1e6)), TABLE_G0_HZ / 1e6, 0.0)
    add("omega0/xi", TABLE_OMEGA0_HZ / TABLE_XI_HZ, 22.9, 0.05)
    for label, g_hz in (("g0=50MHz", TABLE_G0_HZ), ("g0=xi/5", g_fifth)):
        targets = (TABLE_OMEGA0_HZ, TABLE_XI_HZ, g_hz)
        cp = solve_circuit(*(TWO_PI * v for v in targets))
        eff = effective_model(cp).in_hz()
        for key, target in zip(("omega0", "xi", "g0"), targets):
            add(f"{label} {key} relative error", abs(eff[key] - target) / target, 0.0, rel_tol)
    return {"pass": all(c["pass"] for c in checks), "checks": checks}
