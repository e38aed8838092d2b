"""Brute-force single-excitation dynamics on a finite open chain.

Basis ordering: index 0 is the excited emitter, index ``1 + n + N`` is one
photon on site ``n`` for ``n = -N..N``.  Everything runs in the frame
rotating at the cavity frequency.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.special import jv

from .model import ModelParams, SimulationGrid, validate

log = logging.getLogger(__name__)

DEFAULT_HALF_WIDTH = 400
DENSE_LIMIT = 4000
DEFAULT_STEP = 0.005  # in units of 1/xi; 0.02 is the largest step accepted


class LatticeError(RuntimeError):
    pass


@dataclass
class LatticeState:
    emitter_amp: complex
    photon_amps: np.ndarray
    time: float = 0.0

    @property
    def norm(self) -> float:
        return float(abs(self.emitter_amp) ** 2 + np.sum(np.abs(self.photon_amps) ** 2))

    def vector(self) -> np.ndarray:
        return np.concatenate([[self.emitter_amp], self.photon_amps]).astype(complex)

    @classmethod
    def excited(cls, half_width: int) -> LatticeState:
        return cls(1.0 + 0.0j, np.zeros(2 * half_width + 1, dtype=complex), 0.0)


def build_hamiltonian(params: ModelParams, half_width: int = DEFAULT_HALF_WIDTH) -> sp.csr_matrix:
    """Real symmetric single-excitation Hamiltonian with open boundaries."""
    validate(params)
    needed = (params.d // 2 if params.giant else 0) + 10
    if half_width < needed:
        raise LatticeError(f"half_width={half_width} must be at least {needed}")
    n_sites = 2 * half_width + 1
    dim = n_sites + 1
    rows, cols, vals = [0], [0], [params.delta]
    bond = np.arange(1, n_sites)
    rows += list(bond)
    cols += list(bond + 1)
    vals += [params.xi] * (n_sites - 1)
    for site in params.coupling_sites:
        rows.append(0)
        cols.append(1 + site + half_width)
        vals.append(params.leg_coupling)
    upper = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim))
    diag = sp.diags(upper.diagonal())
    h = upper + upper.T - diag
    return h.tocsr()


def _spectral_bounds(params: ModelParams) -> tuple[float, float]:
    # Gershgorin discs
    edge = 2.0 * params.xi + params.leg_coupling
    emitter = abs(params.delta) + params.g0
    big = max(edge, emitter) * 1.01
    return -big, big


@dataclass
class LatticeTrajectory:
    times: np.ndarray
    alpha: np.ndarray
    photons: np.ndarray  # (n_t, n_sites) amplitudes
    half_width: int
    norm_drift: float
    energy_drift: float

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.half_width, self.half_width + 1)

    @property
    def population(self) -> np.ndarray:
        return np.abs(self.alpha) ** 2

    def __len__(self):
        return self.times.size

    def __getitem__(self, i) -> LatticeState:
        return LatticeState(complex(self.alpha[i]), self.photons[i], float(self.times[i]))

    def field(self, n_max: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Sites and ``|beta_n(t)|^2`` restricted to ``|n| <= n_max``."""
        n = self.sites
        sel = slice(None) if n_max is None else np.abs(n) <= n_max
        return n[sel], np.abs(self.photons[:, sel]) ** 2


def _rk4_run(h, psi, n_steps, dt):
    for _ in range(n_steps):
        k1 = -1j * (h @ psi)
        k2 = -1j * (h @ (psi + 0.5 * dt * k1))
        k3 = -1j * (h @ (psi + 0.5 * dt * k2))
        k4 = -1j * (h @ (psi + dt * k3))
        psi = psi + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return psi


def _chebyshev_run(h, psi, tau, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = half * tau
    n_terms = int(x + 12 * x ** (1 / 3) + 30)
    coef = jv(np.arange(n_terms), x)
    last = np.nonzero(np.abs(coef) > 1e-17)[0]
    n_terms = int(last[-1]) + 2 if last.size else 2

    def scaled(v):
        return (h @ v - mid * v) / half

    t_prev = psi
    t_cur = scaled(psi)
    out = coef[0] * t_prev + 2.0 * (-1j) * coef[1] * t_cur
    for k in range(2, n_terms):
        t_next = 2.0 * scaled(t_cur) - t_prev
        out = out + 2.0 * (-1j) ** k * coef[k] * t_next
        t_prev, t_cur = t_cur, t_next
    return np.exp(-1j * mid * tau) * out


def evolve(
    state0: LatticeState,
    grid: SimulationGrid,
    params: ModelParams,
    dt: float | None = None,
    method: str = "rk4",
    check_boundary: bool = True,
    keep_field: bool = True,
) -> LatticeTrajectory:
    """Integrate the Schroedinger equation and sample it on ``grid.times``.

    ``method="rk4"`` uses fixed-step classical Runge-Kutta with a step that
    divides the output spacing (default ``0.005/xi``, at most ``0.02/xi``).
    ``method="chebyshev"`` applies a Chebyshev expansion of the propagator
    between output times, exact to rounding, for long windows.
    """
    half_width = (state0.photon_amps.size - 1) // 2
    if half_width != grid.lattice_half_width:
        raise LatticeError("initial state does not match grid.lattice_half_width")
    if not abs(state0.norm - 1.0) < 1e-12:
        raise LatticeError(f"initial state is not normalized (norm {state0.norm})")
    h = build_hamiltonian(params, half_width)
    times = grid.times
    out_dt = grid.dt
    psi = state0.vector()
    n_sites = 2 * half_width + 1
    alpha = np.empty(times.size, dtype=complex)
    photons = np.empty((times.size, n_sites), dtype=complex) if keep_field else np.empty((0, n_sites))
    if method == "rk4":
        max_dt = DEFAULT_STEP / params.xi if dt is None else dt
        if max_dt > 0.02 / params.xi + 1e-15:
            raise LatticeError("RK4 step must not exceed 0.02/xi")
        sub = max(1, int(math.ceil(out_dt / max_dt - 1e-12)))
        step = out_dt / sub
    elif method == "chebyshev":
        lo, hi = _spectral_bounds(params)
    else:
        raise ValueError(f"unknown method {method!r}")
    e0 = float(np.real(np.vdot(psi, h @ psi)))
    norm_drift = 0.0
    energy_drift = 0.0
    edge_max = 0.0
    for i in range(times.size):
        if i > 0:
            if method == "rk4":
                psi = _rk4_run(h, psi, sub, step)
            else:
                psi = _chebyshev_run(h, psi, out_dt, lo, hi)
            if not np.all(np.isfinite(psi)):
                raise LatticeError(f"integration diverged at t={times[i]}")
        alpha[i] = psi[0]
        if keep_field:
            photons[i] = psi[1:]
        norm_drift = max(norm_drift, abs(np.vdot(psi, psi).real - 1.0))
        energy_drift = max(energy_drift, abs(np.real(np.vdot(psi, h @ psi)) - e0))
        edge_max = max(edge_max, abs(psi[1]) ** 2, abs(psi[-1]) ** 2)
    if check_boundary and edge_max >= 1e-10:
        raise LatticeError(f"wavefront reached the lattice edge (edge occupation {edge_max:.2e})")
    return LatticeTrajectory(times, alpha, photons, half_width, norm_drift, energy_drift)


def oracle_alpha(params: ModelParams, t_max: float, n_t: int, half_width: int = DEFAULT_HALF_WIDTH, **kw) -> LatticeTrajectory:
    """Convenience wrapper: emitter initially excited, field kept only on request."""
    grid = SimulationGrid(t_max=t_max, n_t=n_t, lattice_half_width=half_width)
    kw.setdefault("keep_field", False)
    return evolve(LatticeState.excited(half_width), grid, params, **kw)


@dataclass
class Eigenmode:
    energy: float
    vector: np.ndarray
    emitter_weight: float
    out_of_band: bool
    compact: bool

    @property
    def bound_candidate(self) -> bool:
        return self.out_of_band or self.compact


def eigenmodes(params: ModelParams, half_width: int = DEFAULT_HALF_WIDTH, compact_tol: float = 1e-8) -> list[Eigenmode]:
    """All eigenpairs of the finite chain, with bound-state candidates flagged.

    A mode is out of band when ``|E| > 2 xi`` and compact when its photon
    weight outside ``|n| <= d/2`` is below ``compact_tol`` while it still
    carries emitter weight.
    """
    h = build_hamiltonian(params, half_width)
    if h.shape[0] > DENSE_LIMIT:
        raise LatticeError(f"dense diagonalization limited to {DENSE_LIMIT} dimensions")
    energies, vectors = scipy.linalg.eigh(h.toarray())
    sites = np.arange(-half_width, half_width + 1)
    reach = params.d // 2 if params.giant else 0
    outside = np.abs(sites) > reach
    outside_rows = np.concatenate([[False], outside])
    # inside a degenerate cluster eigh returns an arbitrary basis; rotate it so
    # that compactly supported combinations (BICs) come out separately
    start = 0
    while start < energies.size:
        stop = start + 1
        while stop < energies.size and energies[stop] - energies[start] < 1e-9:
            stop += 1
        if stop - start > 1:
            block = vectors[:, start:stop]
            weight = block[outside_rows].T @ block[outside_rows]
            _, rot = np.linalg.eigh(weight)
            vectors[:, start:stop] = block @ rot
        start = stop
    modes = []
    for e, v in zip(energies, vectors.T):
        v = v if v[0] >= 0 else -v
        weight = float(v[0] ** 2)
        outer = float(np.sum(v[1:][outside] ** 2))
        modes.append(
            Eigenmode(
                energy=float(e),
                vector=v,
                emitter_weight=weight,
                out_of_band=abs(e) > 2.0 * params.xi,
                compact=outer < compact_tol and weight > compact_tol,
            )
        )
    return modes


def write_field_csv(times, sites, occupation, path: str | Path) -> None:
    """Long-format field movie: one row per (t, n)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "n", "occupation"])
        for ti, row in zip(times, occupation):
            for n, v in zip(sites, row):
                writer.writerow([f"{ti:.10g}", int(n), f"{v:.15e}"])


def write_field_binary(times, sites, occupation, path: str | Path) -> None:
    """Compact field movie: ``.npz`` with ``t`` (n_t,), ``n`` (n_sites,), ``occupation`` (n_t, n_sites)."""
    np.savez_compressed(
        path,
        t=np.asarray(times, dtype=np.float64),
        n=np.asarray(sites, dtype=np.int64),
        occupation=np.asarray(occupation, dtype=np.float64),
    )
