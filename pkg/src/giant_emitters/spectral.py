"""Dispersion, spectral densities and the self-energy function G(s).

The Laplace-domain self-energy of the emitter is

    G(s) = (1/2pi) \\int dw J(w) / (s + i w),

analytic in the complex ``s`` plane except for the segment
``s = i y, |y| <= 2 xi`` where it jumps.  Closed forms are used for the
single-point emitter and for the two-point (giant) emitter.
"""

from __future__ import annotations

import numpy as np

# |1 - cos(kd)| below this is treated as the removable point of the array factor
_ARRAY_FACTOR_EPS = 1e-12


class OutOfBandError(ValueError):
    """Frequency outside the closed band [-2 xi, 2 xi]."""


class BranchCutError(ValueError):
    """Laplace variable sits on the branch cut of G(s)."""


def dispersion(k, xi: float = 1.0):
    """Cavity-array dispersion ``2 xi cos k`` (k is taken modulo 2 pi)."""
    k = np.mod(np.asarray(k, dtype=float) + np.pi, 2 * np.pi) - np.pi
    out = 2.0 * xi * np.cos(k)
    return out if out.ndim else float(out)


def invert_dispersion(omega, xi: float = 1.0):
    """Principal-branch momentum ``arccos(omega / 2 xi)`` in ``[0, pi]``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(np.abs(omega) > 2.0 * xi):
        raise OutOfBandError(f"|omega| must not exceed 2 xi={2 * xi}")
    out = np.arccos(omega / (2.0 * xi))
    return out if out.ndim else float(out)


def _check_open_band(omega, xi):
    omega = np.asarray(omega, dtype=float)
    if np.any(np.abs(omega) >= 2.0 * xi):
        raise OutOfBandError("spectral density is singular or undefined for |omega| >= 2 xi")
    return omega


def j_small(omega, g0: float, xi: float = 1.0):
    """Spectral density of a single-point emitter, ``2 g0^2 / sqrt(4 xi^2 - omega^2)``."""
    omega = _check_open_band(omega, xi)
    out = 2.0 * g0**2 / np.sqrt(4.0 * xi**2 - omega**2)
    return out if out.ndim else float(out)


def array_factor(omega, d: int, nc: int, xi: float = 1.0):
    """Interference factor of ``nc`` equally spaced coupling points.

    ``(1 - cos(k d nc)) / (nc^2 (1 - cos(k d)))`` with the removable points
    ``k d = 0 mod 2 pi`` replaced by their limit 1.
    """
    omega = _check_open_band(omega, xi)
    if nc < 1 or d < 0:
        raise ValueError("need nc >= 1 and d >= 0")
    k = np.arccos(omega / (2.0 * xi))
    # 1 - cos(x) = 2 sin^2(x/2) avoids cancellation near the zeros
    den = np.sin(0.5 * k * d) ** 2
    num = np.sin(0.5 * k * d * nc) ** 2
    safe = np.abs(den) >= _ARRAY_FACTOR_EPS
    out = np.ones_like(k)
    out[safe] = num[safe] / (nc**2 * den[safe])
    return out if out.ndim else float(out)


def j_eff(omega, d: int, g0: float, xi: float = 1.0):
    """Effective spectral density of the two-point emitter.

    ``g0^2 (1 + cos(k(omega) d)) / sqrt(4 xi^2 - omega^2)``, i.e. ``j_small``
    times ``array_factor(omega, d, 2)``.
    """
    omega = _check_open_band(omega, xi)
    k = np.arccos(omega / (2.0 * xi))
    # 1 + cos(x) = 2 cos^2(x/2) keeps the zeros exact
    out = 2.0 * g0**2 * np.cos(0.5 * k * d) ** 2 / np.sqrt(4.0 * xi**2 - omega**2)
    return out if out.ndim else float(out)


def _on_cut(s, xi):
    return (np.real(s) == 0.0) & (np.abs(np.imag(s)) <= 2.0 * xi)


def branch_root(s, xi: float = 1.0):
    """``s sqrt(1 + 4 xi^2 / s^2)`` on its principal branch.

    This equals ``sign(Re s) sqrt(s^2 + 4 xi^2)`` away from the imaginary
    axis, is analytic off the cut ``[-2i xi, 2i xi]`` and behaves like ``s``
    at infinity.
    """
    s = np.asarray(s, dtype=complex)
    return s * np.sqrt(1.0 + 4.0 * xi**2 / s**2)


def g_function(s, g0: float, xi: float = 1.0):
    """Self-energy ``G(s) = g0^2 / (s sqrt(1 + 4 xi^2/s^2))`` of a single-point emitter."""
    s = np.asarray(s, dtype=complex)
    if np.any(_on_cut(s, xi)):
        raise BranchCutError("s lies on the branch cut; use branch_limit")
    out = g0**2 / branch_root(s, xi)
    return out if out.ndim else complex(out)


def rho_factor(s, xi: float = 1.0):
    """Propagation factor ``i s/2xi - i sign(Re s) sqrt(1 + s^2/4xi^2)``, ``|rho| <= 1``."""
    s = np.asarray(s, dtype=complex)
    return 1j * (s - branch_root(s, xi)) / (2.0 * xi)


def g_function_giant(s, d: int, g0: float, xi: float = 1.0):
    """Self-energy of the two-point emitter with legs ``g0/2`` at ``+-d/2``.

    ``G(s, d) = (g0^2 / 2) (1 + rho(s)^d) / (s sqrt(1 + 4 xi^2 / s^2))``.
    ``d = 0`` reproduces :func:`g_function`.
    """
    s = np.asarray(s, dtype=complex)
    if np.any(_on_cut(s, xi)):
        raise BranchCutError("s lies on the branch cut; use branch_limit")
    root = branch_root(s, xi)
    rho = 1j * (s - root) / (2.0 * xi)
    out = 0.5 * g0**2 * (1.0 + rho**d) / root
    return out if out.ndim else complex(out)


def g_sheet(s, g0: float, xi: float = 1.0, d: int | None = None, side: int = 1):
    """Analytic continuation of G from the half plane ``sign(Re s) = side``.

    The continuation is analytic across the cut segment (it only branches
    at ``|Im s| >= 2 xi`` on the imaginary axis), so it can be
    differentiated at in-band points such as the BIC poles.
    """
    s = np.asarray(s, dtype=complex)
    root = side * np.sqrt(s**2 + 4.0 * xi**2)
    if d is None:
        out = g0**2 / root
    else:
        rho = 1j * (s - root) / (2.0 * xi)
        out = 0.5 * g0**2 * (1.0 + rho**d) / root
    return out if out.ndim else complex(out)


def branch_limit(y, side: int, g0: float, xi: float = 1.0, d: int | None = None, eps: float = 1e-9):
    """``lim_{eps -> 0} G(side*eps + i y)`` by Richardson extrapolation in ``eps``."""
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    y = np.asarray(y, dtype=float)

    def g(e):
        s = side * e + 1j * y
        if d is None:
            return g0**2 / branch_root(s, xi)
        return g_function_giant(s, d, g0, xi)

    out = 2.0 * g(0.5 * eps) - g(eps)
    return out if np.ndim(out) else complex(out)
