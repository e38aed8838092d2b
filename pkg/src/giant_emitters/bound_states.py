"""Poles of the emitter resolvent: bound states outside (BOC) and inside (BIC) the band.

A BOC energy ``y`` solves ``y - delta + i G(-i y) = 0`` with ``|y| > 2 xi``
and carries the residue ``r = 1 / (1 + G'(-i y))``.  A BIC exists for the
two-point emitter when ``delta`` coincides with a zero ``omega_m`` of the
effective spectral density.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .model import ModelParams, validate
from .spectral import g_sheet

# |delta - omega_m| below this (in units of xi) switches the BIC pole on
BIC_MATCH_TOL = 1e-10


class BoundStateKind(str, enum.Enum):
    BOC_UPPER = "BOC_upper"
    BOC_LOWER = "BOC_lower"
    BIC = "BIC"


class RootFindingError(RuntimeError):
    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(f"{message} (bracket {bracket})")
        self.bracket = bracket


class WrongKindError(ValueError):
    pass


@dataclass(frozen=True)
class BoundState:
    energy: float
    residue: float
    kind: BoundStateKind
    kappa: float = 0.0
    phi: float = 0.0

    @property
    def is_boc(self) -> bool:
        return self.kind is not BoundStateKind.BIC


@dataclass(frozen=True)
class FieldProfile:
    sites: np.ndarray
    occupation: np.ndarray
    time_dependent: bool = False
    time: float | None = None


def pole_shift(y, params: ModelParams):
    """``i G(-i y)`` for real ``|y| > 2 xi``; real valued.

    Accepts complex ``y`` close to the real axis so that the derivative can
    be taken by complex step.
    """
    xi, g0 = params.xi, params.g0
    y = np.asarray(y)
    sgn = np.sign(np.real(y))
    root = np.sqrt(y * y - 4.0 * xi**2)
    if params.nc == 1:
        return -(g0**2) / (sgn * root)
    rho = (y - sgn * root) / (2.0 * xi)
    return -0.5 * g0**2 * (1.0 + rho**params.d) / (sgn * root)


def pole_residual(y: float, params: ModelParams) -> float:
    return float(y - params.delta + pole_shift(y, params))


def pole_shift_derivative(y: float, params: ModelParams) -> float:
    """``d/dy i G(-i y) = G'(s)|_{s=-iy}``.

    Analytic for the single-point emitter, complex step otherwise.
    """
    xi, g0 = params.xi, params.g0
    if params.nc == 1:
        return g0**2 / (y**2 * (1.0 - 4.0 * xi**2 / y**2) ** 1.5)
    h = 1e-30
    return float(np.imag(pole_shift(complex(y, h), params)) / h)


def _refine(y: float, params: ModelParams, lo: float, hi: float) -> float:
    # Newton polish, then keep the neighbouring float with the smallest residual
    for _ in range(4):
        step = pole_residual(y, params) / (1.0 + pole_shift_derivative(y, params))
        y_new = y - step
        if not lo < y_new < hi:
            break
        y = y_new
        if abs(step) < 1e-16 * abs(y):
            break
    candidates = [y, np.nextafter(y, -np.inf), np.nextafter(y, np.inf)]
    return float(min(candidates, key=lambda c: abs(pole_residual(c, params))))


def _boc_root(params: ModelParams, upper: bool) -> float:
    xi = params.xi
    span = 2.0 * xi + abs(params.delta) + params.g0**2 / xi
    edge = 2.0 * xi
    if upper:
        lo, hi = edge * (1.0 + 1e-15), edge + span
    else:
        lo, hi = -edge - span, -edge * (1.0 + 1e-15)
    f_lo, f_hi = pole_residual(lo, params), pole_residual(hi, params)
    if not (np.isfinite(f_lo) and np.isfinite(f_hi)) or f_lo * f_hi > 0:
        raise RootFindingError("pole equation does not change sign", (lo, hi))
    try:
        y = brentq(pole_residual, lo, hi, args=(params,), xtol=1e-15, rtol=1e-15, maxiter=500)
    except (RuntimeError, ValueError) as exc:
        raise RootFindingError(f"root finder failed: {exc}", (lo, hi)) from exc
    return _refine(y, params, lo, hi)


def find_boc_poles(params: ModelParams) -> list[BoundState]:
    """Both real poles outside the band, lower first."""
    validate(params)
    states = []
    for upper in (False, True):
        y = _boc_root(params, upper)
        r = 1.0 / (1.0 + pole_shift_derivative(y, params))
        kappa = math.acosh(abs(y) / (2.0 * params.xi))
        kind = BoundStateKind.BOC_UPPER if upper else BoundStateKind.BOC_LOWER
        states.append(BoundState(energy=y, residue=r, kind=kind, kappa=kappa))
    return states


def bic_frequencies(d: int, xi: float = 1.0) -> list[float]:
    """Zeros ``2 xi cos(pi (2m+1) / d)`` of the two-point spectral density, sorted."""
    if d < 2 or d % 2:
        raise ValueError(f"d must be even and >= 2, got {d}")
    # 2m+1 < d covers every distinct cosine in (0, pi)
    freqs = [
        0.0 if 2 * (2 * m + 1) == d else 2.0 * xi * math.cos(math.pi * (2 * m + 1) / d) for m in range(d // 2)
    ]
    return sorted(freqs)


def bic_phase(omega_m: float, xi: float = 1.0) -> float:
    return math.asin(omega_m / (2.0 * xi)) + math.pi / 2


def residue_bic_numeric(omega_m: float, d: int, g0: float, xi: float = 1.0, n_points: int = 64) -> float:
    """``1 / (1 + G'(s, d))`` at ``s = -i omega_m`` from a Cauchy-integral derivative.

    The derivative is taken on the analytic continuation of G from the right
    half plane, on a circle that stays clear of the branch points ``+-2i xi``
    and shrinks with ``d``.  The trapezoidal rule on the circle converges geometrically; the number of
    nodes is doubled from ``n_points`` until two estimates agree to 1e-14.
    """
    s0 = -1j * omega_m
    # |rho|^d grows off the real segment; a radius ~ 1/d keeps the samples O(1)
    radius = min(0.5 * (2.0 * xi - abs(omega_m)), 2.0 * xi / d)

    def estimate(n):
        theta = 2.0 * np.pi * np.arange(n) / n
        values = g_sheet(s0 + radius * np.exp(1j * theta), g0, xi, d=d, side=1)
        return np.mean(values * np.exp(-1j * theta)) / radius

    n = n_points
    prev = estimate(n)
    while n < 1 << 16:
        n *= 2
        cur = estimate(n)
        if abs(cur - prev) < 1e-14 * max(1.0, abs(cur)):
            break
        prev = cur
    return float(np.real(1.0 / (1.0 + cur)))


def residue_bic(omega_m: float, d: int, g0: float, xi: float = 1.0) -> float:
    """Residue of the BIC pole.

    Closed form ``1 / (1 + g0^2 [A(u, d) + B(u, d)])`` with
    ``u = 2 xi / omega_m`` and ``eta = sqrt(1 - u^2)`` (imaginary here, since
    ``|u| > 1`` for every in-band ``omega_m``).  ``omega_m = 0`` has no finite
    ``u`` and falls back to the numerical derivative.
    """
    if omega_m == 0.0:
        return residue_bic_numeric(omega_m, d, g0, xi)
    u = complex(2.0 * xi / omega_m)
    eta = np.sqrt(1.0 - u * u)
    lead = (1.0 - eta) ** d
    a_term = d * u ** (2 - d) * lead / (8.0 * eta**2)
    b_term = (1.0 + lead / u**d) * (u * u / (8.0 * eta)) * (1.0 + u * u / eta**2)
    # the closed form is in units xi = 1
    total = (g0 / xi) ** 2 * (a_term + b_term)
    return float(np.real(1.0 / (1.0 + total)))


def find_bic(params: ModelParams) -> BoundState | None:
    """BIC pole if ``delta`` matches a zero of the effective spectral density."""
    if params.nc != 2:
        return None
    for omega_m in bic_frequencies(params.d, params.xi):
        if abs(params.delta - omega_m) < BIC_MATCH_TOL * params.xi:
            r = residue_bic(omega_m, params.d, params.g0, params.xi)
            return BoundState(
                energy=omega_m,
                residue=r,
                kind=BoundStateKind.BIC,
                phi=bic_phase(omega_m, params.xi),
            )
    return None


def find_bound_states(params: ModelParams) -> list[BoundState]:
    """Every real pole of the resolvent: both BOCs, plus the BIC when present."""
    states = find_boc_poles(params)
    bic = find_bic(params)
    if bic is not None:
        states.append(bic)
    return states


def _window(n_max, sites):
    if sites is None:
        return np.arange(-n_max, n_max + 1)
    return np.asarray(sites, dtype=int)


def boc_field_profile(state: BoundState, params: ModelParams, sites=None, n_max: int = 60) -> FieldProfile:
    """Stationary photon occupation of a single-point emitter's BOC.

    ``g0^2 r^2 / (y^2 - 4 xi^2) exp(-2 kappa |n|)``.
    """
    if not state.is_boc:
        raise WrongKindError("boc_field_profile needs a BOC state")
    if params.nc != 1:
        raise ValueError("closed-form BOC profile is for the single-point emitter")
    n = _window(n_max, sites)
    y, r = state.energy, state.residue
    occ = params.g0**2 * r**2 / (y**2 - 4.0 * params.xi**2) * np.exp(-2.0 * state.kappa * np.abs(n))
    return FieldProfile(n, occ)


def bic_field_profile(state: BoundState, params: ModelParams, sites=None, n_max: int | None = None) -> FieldProfile:
    """Stationary photon occupation of the BIC, confined to ``|n| <= d/2``.

    ``g0^2 r^2 / (2 (4 xi^2 - w^2)) [1 + cos(phi (|n + d/2| - |n - d/2|))]``.
    """
    if state.kind is not BoundStateKind.BIC:
        raise WrongKindError("bic_field_profile needs a BIC state")
    if params.nc != 2:
        raise ValueError("BIC profiles exist only for the two-point emitter")
    half = params.d // 2
    n = _window(n_max if n_max is not None else half + 10, sites)
    w, r, xi = state.energy, state.residue, params.xi
    arg = state.phi * (np.abs(n + half) - np.abs(n - half))
    occ = params.g0**2 * r**2 / (2.0 * (4.0 * xi**2 - w**2)) * (1.0 + np.cos(arg))
    # the cosine is -1 up to rounding outside the emitter
    occ[np.abs(n) >= half] = 0.0
    return FieldProfile(n, occ)


def _check_same_params(boc: BoundState, bic: BoundState, params: ModelParams) -> None:
    if params.nc != 2:
        raise ValueError("superposition field needs the two-point emitter")
    if abs(bic.energy - params.delta) > BIC_MATCH_TOL * params.xi:
        raise ValueError("BIC energy does not match these parameters")
    resid = abs(pole_residual(boc.energy, params))
    if resid > 1e-8 * params.xi:
        raise ValueError(f"BOC energy is not a pole for these parameters (residual {resid:.2e})")


def superposition_field(
    boc: BoundState, bic: BoundState, t: float, params: ModelParams, sites=None, n_max: int | None = None
) -> FieldProfile:
    """Breathing photon occupation of a coherent BOC + BIC superposition.

    ``(g0^2/4) |r_+ e^{-i y t} Phi_+(n) / sqrt(y^2 - 4) + i r_m e^{-i w t} Phi(n) / sqrt(4 - w^2)|^2``
    with ``Phi_+(n) = sum_j e^{-kappa |n - x_j|}`` and
    ``Phi(n) = sum_j e^{i k_m |n - x_j|}``, ``k_m = arccos(w / 2 xi)``, the
    photon amplitudes of the two bound eigenvectors of the lattice.
    """
    if not boc.is_boc or bic.kind is not BoundStateKind.BIC:
        raise WrongKindError("need one BOC and one BIC state")
    _check_same_params(boc, bic, params)
    half = params.d // 2
    if n_max is None:
        n_max = half + int(min(10.0 / max(boc.kappa, 1e-12), 4000))
    n = _window(n_max, sites)
    xi = params.xi
    y, w = boc.energy, bic.energy
    sgn = math.copysign(1.0, y)
    dist = (np.abs(n - half), np.abs(n + half))
    z = sgn * math.exp(-boc.kappa)
    phi_boc = z ** dist[0] + z ** dist[1]
    k_m = math.acos(w / (2.0 * xi))
    phi_bic = np.exp(1j * k_m * dist[0]) + np.exp(1j * k_m * dist[1])
    amp = boc.residue * np.exp(-1j * y * t) * phi_boc / (sgn * math.sqrt(y * y - 4.0 * xi**2)) + 1j * bic.residue * np.exp(
        -1j * w * t
    ) * phi_bic / math.sqrt(4.0 * xi**2 - w * w)
    occ = 0.25 * params.g0**2 * np.abs(amp) ** 2
    return FieldProfile(n, occ, time_dependent=True, time=t)


def write_bound_states_csv(states: list[BoundState], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["kind", "energy", "residue", "kappa_or_phi"])
        for s in states:
            extra = s.kappa if s.is_boc else s.phi
            writer.writerow([s.kind.value, repr(float(s.energy)), repr(float(s.residue)), repr(float(extra))])
