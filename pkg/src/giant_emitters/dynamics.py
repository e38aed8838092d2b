"""Exact emitter amplitude from the branch-cut integral plus the pole residues.

    alpha(t) = (4 g0^2 / pi xi^2) \\int_{-1}^{1} K(y) e^{2 i xi y t} dy + sum_j r_j e^{-i y_j t}

The scattering integral is evaluated with a fixed panel partition of
``[-1, 1]`` that adapts to the kernel only.  On every panel the kernel is
replaced by its Legendre interpolant, whose product with the oscillating
exponential is integrated exactly through spherical Bessel functions.  The
rule therefore stays accurate for arbitrarily long times at a cost that does
not grow with ``t``.
"""

from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import jv, spherical_jn

from .bound_states import BoundState, bic_frequencies, find_bound_states
from .model import ModelParams, SimulationGrid, validate

log = logging.getLogger(__name__)

_GL_ORDER = 20
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)
# a_j = (2j+1)/2 sum_i w_i P_j(x_i) f(x_i)
_PROJ = (
    (2 * np.arange(_GL_ORDER)[:, None] + 1)
    / 2.0
    * np.polynomial.legendre.legvander(_GL_X, _GL_ORDER - 1).T
    * _GL_W[None, :]
)
_MIN_PANEL = 1e-12
_DENOM_FLOOR = 1e-30


class KernelDomainError(ValueError):
    pass


class QuadratureError(RuntimeError):
    def __init__(self, message: str, worst_panel: tuple[float, float, float]):
        super().__init__(f"{message}; worst panel [{worst_panel[0]:.3e}, {worst_panel[1]:.3e}] est {worst_panel[2]:.2e}")
        self.worst_panel = worst_panel


@dataclass(frozen=True)
class KernelSpec:
    delta: float
    g0: float
    d: int | None = None
    giant: bool = False
    xi: float = 1.0

    def __post_init__(self):
        if self.giant and (self.d is None or self.d % 2 or self.d < 0):
            raise ValueError("a giant kernel needs an even separation d")

    @classmethod
    def from_params(cls, params: ModelParams) -> KernelSpec:
        validate(params)
        return cls(delta=params.delta, g0=params.g0, d=params.d, giant=params.giant, xi=params.xi)

    @property
    def prefactor(self) -> float:
        return 4.0 * self.g0**2 / (math.pi * self.xi**2)


def _check_domain(y):
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) >= 1.0):
        raise KernelDomainError("kernel argument must lie strictly inside (-1, 1)")
    return y


def _small_values(y, spec: KernelSpec):
    g = spec.g0 / spec.xi
    q = 2.0 * y + spec.delta / spec.xi
    w2 = (1.0 - y) * (1.0 + y)
    return np.sqrt(w2) / (4.0 * q * q * w2 + g**4)


def _giant_parts(y, spec: KernelSpec):
    g = spec.g0 / spec.xi
    q = 2.0 * y + spec.delta / spec.xi
    w = np.sqrt((1.0 - y) * (1.0 + y))
    half = 0.5 * np.arccos(-y) * spec.d
    c = 2.0 * np.cos(half) ** 2  # 1 + cos(k d)
    sigma = np.sin(2.0 * half)  # sin(k d)
    # 8 q^2 w^2 + F written as a sum of squares; vanishes only at a BIC
    den = 2.0 * ((2.0 * q * w - 0.5 * g * g * sigma) ** 2 + 0.25 * g**4 * c * c)
    return w * c, den


def _giant_values(y, spec: KernelSpec):
    num, den = _giant_parts(y, spec)
    small = den < _DENOM_FLOOR
    out = np.empty_like(num)
    out[~small] = num[~small] / den[~small]
    if np.any(small):
        # removable 0/0 at a BIC frequency: average of the two neighbours
        ys = np.asarray(y)[small]
        lo_n, lo_d = _giant_parts(ys - 1e-7, spec)
        hi_n, hi_d = _giant_parts(ys + 1e-7, spec)
        out[small] = 0.5 * (lo_n / lo_d + hi_n / hi_d)
    return out


def kernel_small(y_tilde, spec: KernelSpec):
    """``sqrt(1-y^2) / (4 (2y + delta/xi)^2 (1-y^2) + (g0/xi)^4)`` on ``(-1, 1)``."""
    if spec.giant:
        raise ValueError("spec describes a giant emitter")
    y = _check_domain(y_tilde)
    out = _small_values(y, spec)
    return out if np.ndim(out) else float(out)


def kernel_giant(y_tilde, spec: KernelSpec):
    """Kernel of the two-point emitter.

    ``sqrt(1-y^2) (1 + cos(k d)) / (8 (2y + delta/xi)^2 (1-y^2) + F(y, d))`` with
    ``F = (g0/xi)^4 (1 + cos(k d)) - 4 (g0/xi)^2 (2y + delta/xi) sqrt(1-y^2) sin(k d)``
    and ``k = arccos(-y)``.  The denominator is evaluated as an equivalent sum
    of squares, which is free of cancellation near the BIC frequencies.
    """
    if not spec.giant:
        raise ValueError("spec describes a single-point emitter")
    y = _check_domain(np.atleast_1d(y_tilde))
    out = _giant_values(y, spec)
    return out if np.ndim(y_tilde) else float(out[0])


def kernel_giant_literal(y_tilde, spec: KernelSpec):
    """Direct transcription of the giant kernel formula (for cross-checks)."""
    y = _check_domain(y_tilde)
    g = spec.g0 / spec.xi
    q = 2.0 * y + spec.delta / spec.xi
    w = np.sqrt(1.0 - y * y)
    k = np.arccos(-y)
    c = 1.0 + np.cos(k * spec.d)
    f = g**4 * c - 4.0 * g * g * q * w * np.sin(k * spec.d)
    with np.errstate(invalid="ignore", divide="ignore"):
        return w * c / (8.0 * q * q * (1.0 - y * y) + f)


def kernel_values(y, spec: KernelSpec):
    y = np.asarray(y, dtype=float)
    return _giant_values(y, spec) if spec.giant else _small_values(y, spec)


def _feature_points(spec: KernelSpec) -> list[float]:
    pts = [-1.0, 1.0]
    res = -spec.delta / (2.0 * spec.xi)
    if abs(res) < 1.0:
        pts.append(res)
    if spec.giant and spec.d:
        pts.extend(-w / (2.0 * spec.xi) for w in bic_frequencies(spec.d, spec.xi))
    pts.extend(np.linspace(-1.0, 1.0, 17)[1:-1])
    pts = np.unique(np.round(pts, 15))
    return [float(p) for p in pts]


@dataclass
class PanelRule:
    """Panel partition of [-1, 1] with per-panel Legendre coefficients of the kernel."""

    spec: KernelSpec
    edges: np.ndarray
    coeffs: np.ndarray = field(repr=False)
    error_estimate: float = 0.0

    @property
    def centers(self):
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def half_widths(self):
        return 0.5 * (self.edges[1:] - self.edges[:-1])

    @property
    def n_panels(self) -> int:
        return len(self.edges) - 1

    def integral(self, t, chunk: int = 256) -> np.ndarray:
        """``\\int_{-1}^{1} K(y) e^{2 i xi y t} dy`` for every entry of ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty(t.shape, dtype=complex)
        c, h = self.centers, self.half_widths
        phase_j = 2.0 * (1j ** np.arange(_GL_ORDER))
        weighted = self.coeffs * phase_j[None, :]
        for start in range(0, t.size, chunk):
            omega = 2.0 * self.spec.xi * t[start : start + chunk]
            arg = omega[:, None] * h[None, :]
            acc = np.zeros(arg.shape, dtype=complex)
            for j in range(_GL_ORDER):
                acc += weighted[None, :, j] * spherical_jn(j, arg)
            out[start : start + chunk] = (acc * (h * 1.0)[None, :] * np.exp(1j * omega[:, None] * c[None, :])).sum(
                axis=1
            )
        return out

    def refined(self) -> PanelRule:
        """Same rule with every panel bisected."""
        mids = self.centers
        edges = np.sort(np.concatenate([self.edges, mids]))
        return _rule_from_edges(self.spec, edges)

    def gauss_reference(self, t, nodes_per_unit: float = 3.0) -> np.ndarray:
        """Brute-force Gauss-Legendre evaluation, panels split to resolve the oscillation."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty(t.shape, dtype=complex)
        for i, ti in enumerate(t):
            omega = 2.0 * self.spec.xi * ti
            total = 0.0j
            for a, b in zip(self.edges[:-1], self.edges[1:]):
                m = max(1, int(math.ceil(omega * (b - a) / (2 * math.pi) * nodes_per_unit)))
                sub = np.linspace(a, b, m + 1)
                cc = 0.5 * (sub[1:] + sub[:-1])
                hh = 0.5 * (sub[1:] - sub[:-1])
                x = cc[:, None] + hh[:, None] * _GL_X[None, :]
                f = kernel_values(x, self.spec) * np.exp(1j * omega * x)
                total += np.sum(hh[:, None] * _GL_W[None, :] * f)
            out[i] = total
        return out


def _panel_coeffs(spec: KernelSpec, a, b):
    a = np.atleast_1d(a)
    b = np.atleast_1d(b)
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = c[:, None] + h[:, None] * _GL_X[None, :]
    f = kernel_values(x, spec)
    return f @ _PROJ.T


def _rule_from_edges(spec: KernelSpec, edges) -> PanelRule:
    edges = np.asarray(edges, dtype=float)
    coeffs = _panel_coeffs(spec, edges[:-1], edges[1:])
    h = 0.5 * np.diff(edges)
    err = float(np.sum(2.0 * h * (np.abs(coeffs[:, -1]) + np.abs(coeffs[:, -2]))))
    return PanelRule(spec=spec, edges=edges, coeffs=coeffs, error_estimate=err)


def build_panel_rule(spec: KernelSpec, abs_tol: float = 1e-11, max_panels: int = 20000) -> PanelRule:
    """Adaptive bisection until each panel's Legendre tail meets its share of ``abs_tol``.

    ``abs_tol`` bounds the error of the scattering part of ``alpha``; the
    bound holds uniformly in ``t`` because ``|\\int P_j e^{i w x}| <= 2``.
    """
    tol = abs_tol / spec.prefactor
    pending = list(zip(_feature_points(spec)[:-1], _feature_points(spec)[1:]))
    done: list[tuple[float, float]] = []
    worst = (0.0, 0.0, 0.0)
    while pending:
        a = np.array([p[0] for p in pending])
        b = np.array([p[1] for p in pending])
        coeffs = _panel_coeffs(spec, a, b)
        h = 0.5 * (b - a)
        est = 2.0 * h * (np.abs(coeffs[:, -1]) + np.abs(coeffs[:, -2]))
        # short panels get a fixed floor so the sqrt endpoints terminate
        ok = (est <= tol * np.maximum(h, 1e-4)) | (h < _MIN_PANEL)
        nxt = []
        for i in range(len(pending)):
            if ok[i]:
                if h[i] < _MIN_PANEL and est[i] > tol * 1e-4:
                    worst = max(worst, (a[i], b[i], est[i]), key=lambda w: w[2])
                done.append((a[i], b[i]))
            else:
                m = 0.5 * (a[i] + b[i])
                nxt.extend([(a[i], m), (m, b[i])])
        pending = nxt
        if len(done) + len(pending) > max_panels:
            raise QuadratureError("panel budget exhausted", (a[0], b[0], float(est.max())))
    if worst[2] > 0:
        warnings.warn(f"kernel unresolved at panel width {_MIN_PANEL}: {worst}", RuntimeWarning, stacklevel=2)
    done.sort()
    edges = np.array([p[0] for p in done] + [done[-1][1]])
    return _rule_from_edges(spec, edges)


@dataclass
class AmplitudeTrace:
    times: np.ndarray
    alpha: np.ndarray
    scattering_part: np.ndarray
    residue_part: np.ndarray
    bound_states: list[BoundState] = field(default_factory=list)

    @property
    def population(self) -> np.ndarray:
        return np.abs(self.alpha) ** 2

    def to_csv(self, path: str | Path) -> None:
        write_trace_csv(self, path)


def alpha_exact(
    spec: KernelSpec,
    grid: SimulationGrid | np.ndarray,
    bound: list[BoundState] | None = None,
    abs_tol: float = 1e-11,
    rule: PanelRule | None = None,
) -> AmplitudeTrace:
    """Emitter amplitude on a time grid: scattering integral plus residue terms.

    ``bound`` must hold every pole of the resolvent for these parameters
    (both BOCs, and the BIC only when ``delta`` sits on a BIC frequency).
    When omitted it is computed.
    """
    times = grid.times if isinstance(grid, SimulationGrid) else np.asarray(grid, dtype=float)
    if bound is None:
        params = ModelParams(
            xi=spec.xi, g0=spec.g0, delta=spec.delta, nc=2 if spec.giant else 1, d=spec.d if spec.giant else None
        )
        bound = find_bound_states(params)
    if rule is None:
        rule = build_panel_rule(spec, abs_tol)
    scattering = spec.prefactor * rule.integral(times)
    residue = np.zeros_like(scattering)
    for state in bound:
        residue += state.residue * np.exp(-1j * state.energy * times)
    alpha = scattering + residue
    return AmplitudeTrace(times, alpha, scattering, residue, list(bound))


def alpha_for(params: ModelParams, times, abs_tol: float = 1e-11) -> AmplitudeTrace:
    return alpha_exact(KernelSpec.from_params(params), np.asarray(times, dtype=float), abs_tol=abs_tol)


def _gregory_convolution(f: np.ndarray, g: np.ndarray, dt: float) -> np.ndarray:
    """``c_j ~ \\int_0^{t_j} g(tau) f(t_j - tau) dtau`` with 4th-order end corrections."""
    n = f.size
    raw = fftconvolve(g, f)[:n]
    out = np.empty(n, dtype=complex)
    corr = (-5.0 / 8.0, 1.0 / 6.0, -1.0 / 24.0)
    j = np.arange(n)
    out[:] = raw
    big = j >= 6
    for m, cm in enumerate(corr):
        jj = j[big]
        out[big] += cm * (g[m] * f[jj - m] + g[jj - m] * f[m])
    out *= dt
    # short intervals: Newton-Cotes on the few samples available
    for jj in range(min(6, n)):
        prod = g[: jj + 1] * f[jj::-1]
        if jj == 0:
            out[jj] = 0.0
        elif jj == 1:
            out[jj] = 0.5 * dt * (prod[0] + prod[1])
        elif jj == 2:
            out[jj] = dt / 3.0 * (prod[0] + 4 * prod[1] + prod[2])
        elif jj == 3:
            out[jj] = 3.0 * dt / 8.0 * (prod[0] + 3 * prod[1] + 3 * prod[2] + prod[3])
        elif jj == 4:
            out[jj] = 2.0 * dt / 45.0 * (7 * prod[0] + 32 * prod[1] + 12 * prod[2] + 32 * prod[3] + 7 * prod[4])
        else:
            simpson = dt / 3.0 * (prod[0] + 4 * prod[1] + prod[2])
            eighths = 3.0 * dt / 8.0 * (prod[2] + 3 * prod[3] + 3 * prod[4] + prod[5])
            out[jj] = simpson + eighths
    return out


def beta_field_small(n, trace: AmplitudeTrace, params: ModelParams) -> np.ndarray:
    """Photon amplitude ``beta_n(t)`` of a single-point emitter by Bessel convolution.

    ``beta_n(t) = -i g0 (-i)^{|n|} \\int_0^t alpha(t - tau) J_{|n|}(2 xi tau) dtau``
    in the frame rotating at the cavity frequency.  Returns an array of shape
    ``(len(n), len(times))`` (or ``(len(times),)`` for scalar ``n``).
    """
    if params.nc != 1:
        raise ValueError("the Bessel convolution applies to the single-point emitter")
    t = np.asarray(trace.times, dtype=float)
    steps = np.diff(t)
    if t.size < 2 or np.ptp(steps) > 1e-9 * max(1.0, abs(steps.mean())) or t[0] != 0.0:
        raise ValueError("beta_field_small needs a uniform grid starting at t=0")
    dt = float(steps.mean())
    sites = np.atleast_1d(np.asarray(n, dtype=int))
    out = np.empty((sites.size, t.size), dtype=complex)
    for i, site in enumerate(sites):
        order = abs(int(site))
        bessel = jv(order, 2.0 * params.xi * t)
        conv = _gregory_convolution(trace.alpha, bessel, dt)
        out[i] = -1j * params.g0 * (-1j) ** order * conv
    return out if np.ndim(n) else out[0]


@dataclass(frozen=True)
class TailFit:
    slope: float
    intercept: float
    residual_rms: float
    exponential_residual_rms: float
    n_samples: int

    @property
    def algebraic(self) -> bool:
        """True when a power law describes the data better than an exponential."""
        return self.residual_rms < self.exponential_residual_rms

    def __float__(self) -> float:
        return self.slope


def _envelope(values: np.ndarray, times: np.ndarray, n_bins: int = 40):
    # geometric bins; the mean power removes band-edge interference fringes
    edges = np.geomspace(times[0], times[-1], n_bins + 1)
    tc, vc = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (times >= lo) & (times < hi)
        if sel.sum() >= 2:
            tc.append(math.sqrt(lo * hi))
            vc.append(values[sel].mean())
    return np.array(tc), np.array(vc)


def tail_exponent(trace: AmplitudeTrace, window: tuple[float, float], smooth: bool = True) -> TailFit:
    """Log-log slope of ``|scattering_part|^2`` over ``window``.

    With ``smooth`` the power is first averaged over geometric time bins, so
    interference fringes between the two band edges do not bias the fit.
    """
    t = np.asarray(trace.times)
    sel = (t >= window[0]) & (t <= window[1])
    if sel.sum() < 10:
        raise ValueError(f"window {window} holds fewer than 10 samples")
    power = np.abs(np.asarray(trace.scattering_part)[sel]) ** 2
    ts = t[sel]
    if smooth:
        ts, power = _envelope(power, ts)
    if np.any(power <= 0):
        raise ValueError("scattering power vanishes inside the window")
    logp = np.log(power)
    lt = np.log(ts)
    coef, res, *_ = np.polyfit(lt, logp, 1, full=True)
    rms = float(np.sqrt(np.mean((np.polyval(coef, lt) - logp) ** 2)))
    ecoef = np.polyfit(ts, logp, 1)
    erms = float(np.sqrt(np.mean((np.polyval(ecoef, ts) - logp) ** 2)))
    return TailFit(float(coef[0]), float(coef[1]), rms, erms, int(ts.size))


def write_trace_csv(trace: AmplitudeTrace, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "re_alpha", "im_alpha", "abs2_alpha", "re_scat", "im_scat", "re_res", "im_res"])
        for row in zip(
            trace.times, trace.alpha, trace.population, trace.scattering_part, trace.residue_part
        ):
            t, a, p, s, r = row
            writer.writerow([f"{t:.10g}", f"{a.real:.15e}", f"{a.imag:.15e}", f"{p:.15e}", f"{s.real:.15e}", f"{s.imag:.15e}", f"{r.real:.15e}", f"{r.imag:.15e}"])


def read_trace_csv(path: str | Path) -> dict[str, np.ndarray]:
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {name: np.asarray(data[name]) for name in data.dtype.names}
