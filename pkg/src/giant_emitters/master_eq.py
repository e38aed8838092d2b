"""Reduced emitter dynamics built from the exact amplitude alpha(t).

For a single excitation the emitter state at time t follows from alpha
alone: ``rho_ee(t) = rho_ee(0)|alpha|^2`` and ``rho_eg(t) = rho_eg(0) alpha``.
The equivalent time-local master equation has a decay rate and a frequency
shift read off from ``alpha'/alpha``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_simpson

RATE_THRESHOLD = 1e-9


@dataclass(frozen=True)
class QubitDensityMatrix:
    rho_ee: float
    rho_eg: complex = 0.0j
    time: float = 0.0

    def __post_init__(self):
        if not -1e-12 <= self.rho_ee <= 1 + 1e-12:
            raise ValueError(f"rho_ee={self.rho_ee} outside [0, 1]")
        if abs(self.rho_eg) ** 2 > self.rho_ee * (1 - self.rho_ee) + 1e-10:
            raise ValueError("coherence violates positivity")

    @property
    def rho_gg(self) -> float:
        return 1.0 - self.rho_ee

    def matrix(self) -> np.ndarray:
        return np.array([[self.rho_ee, self.rho_eg], [np.conj(self.rho_eg), self.rho_gg]])

    def eigenvalues(self) -> tuple[float, float]:
        radius = math.hypot(self.rho_ee - 0.5, abs(self.rho_eg))
        return 0.5 - radius, 0.5 + radius

    @classmethod
    def excited(cls) -> QubitDensityMatrix:
        return cls(1.0, 0.0j)

    @classmethod
    def ground(cls) -> QubitDensityMatrix:
        return cls(0.0, 0.0j)

    @classmethod
    def plus(cls) -> QubitDensityMatrix:
        return cls(0.5, 0.5 + 0.0j)


@dataclass(frozen=True)
class RatePair:
    lamb_shift: float
    decay_rate: float
    time: float = 0.0

    @property
    def defined(self) -> bool:
        return math.isfinite(self.decay_rate) and math.isfinite(self.lamb_shift)


def density_matrix(trace, rho0: QubitDensityMatrix) -> list[QubitDensityMatrix]:
    """Emitter state along ``trace`` for an arbitrary initial qubit state."""
    alpha = np.asarray(trace.alpha)
    pop = np.clip(rho0.rho_ee * np.abs(alpha) ** 2, 0.0, 1.0)
    coh = rho0.rho_eg * alpha
    return [QubitDensityMatrix(float(p), complex(c), float(t)) for p, c, t in zip(pop, coh, trace.times)]


def _uniform_step(times: np.ndarray) -> float:
    if times.size < 5:
        raise ValueError("need at least 5 samples for the 4th-order stencil")
    dt = np.diff(times)
    if np.max(np.abs(dt - dt[0])) > 1e-9 * max(1.0, abs(dt[0])):
        raise ValueError("rates need a uniform time grid")
    return float(dt[0])


def derivative(f: np.ndarray, dt: float) -> np.ndarray:
    """Fourth-order finite differences: centred inside, one-sided at the ends."""
    f = np.asarray(f)
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * dt)
    out[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * dt)
    out[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * dt)
    out[-1] = -(-25 * f[-1] + 48 * f[-2] - 36 * f[-3] + 16 * f[-4] - 3 * f[-5]) / (12 * dt)
    out[-2] = -(-3 * f[-1] - 10 * f[-2] + 18 * f[-3] - 6 * f[-4] + f[-5]) / (12 * dt)
    return out


def rate_arrays(trace) -> tuple[np.ndarray, np.ndarray]:
    """``(lamb_shift, decay_rate)`` arrays; NaN where ``|alpha| < 1e-9``.

    ``decay_rate = -2 Re(alpha'/alpha)`` and ``lamb_shift = -2 Im(alpha'/alpha)``.
    """
    times = np.asarray(trace.times, dtype=float)
    alpha = np.asarray(trace.alpha, dtype=complex)
    dt = _uniform_step(times)
    ratio = np.full(alpha.shape, np.nan + 1j * np.nan)
    ok = np.abs(alpha) >= RATE_THRESHOLD
    ratio[ok] = derivative(alpha, dt)[ok] / alpha[ok]
    return -2.0 * ratio.imag, -2.0 * ratio.real


def rates(trace) -> list[RatePair]:
    shift, gamma = rate_arrays(trace)
    return [RatePair(float(s), float(g), float(t)) for s, g, t in zip(shift, gamma, trace.times)]


def entropy(rho: QubitDensityMatrix) -> float:
    """Von Neumann entropy in nats, with ``0 ln 0 = 0``."""
    total = 0.0
    for lam in rho.eigenvalues():
        if lam > 0:
            total -= lam * math.log(lam)
    return max(total, 0.0)


def entropy_series(states: list[QubitDensityMatrix]) -> np.ndarray:
    return np.array([entropy(r) for r in states])


def nonmarkovianity_witness(rate_seq: list[RatePair], tol: float = 1e-9) -> list[tuple[float, float]]:
    """Maximal time intervals on which the decay rate is below ``-tol``.

    ``tol`` keeps rounding noise around a vanishing rate (e.g. at t=0) from
    registering.  Undefined samples end an interval.
    """
    intervals = []
    start = end = None
    for r in rate_seq:
        if r.defined and r.decay_rate < -tol:
            if start is None:
                start = r.time
            end = r.time
        elif start is not None:
            intervals.append((start, end))
            start = None
    if start is not None:
        intervals.append((start, end))
    return intervals


def integrate_population(times, decay_rate, rho_ee0: float = 1.0) -> np.ndarray:
    """Solve ``d rho_ee/dt = -Gamma(t) rho_ee`` by quadrature of the exponent."""
    gamma = np.asarray(decay_rate, dtype=float)
    if np.any(~np.isfinite(gamma)):
        raise ValueError("decay rate undefined somewhere on the grid")
    exponent = cumulative_simpson(gamma, x=np.asarray(times, dtype=float), initial=0.0)
    return rho_ee0 * np.exp(-exponent)


def write_master_eq_csv(states, rate_seq, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "rho_ee", "re_rho_eg", "im_rho_eg", "lamb_shift", "decay_rate", "entropy"])
        for rho, r in zip(states, rate_seq):
            writer.writerow(
                [
                    f"{rho.time:.10g}",
                    f"{rho.rho_ee:.15e}",
                    f"{rho.rho_eg.real:.15e}",
                    f"{rho.rho_eg.imag:.15e}",
                    f"{r.lamb_shift:.15e}",
                    f"{r.decay_rate:.15e}",
                    f"{entropy(rho):.15e}",
                ]
            )
