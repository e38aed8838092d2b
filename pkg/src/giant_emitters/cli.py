"""Command-line entry point: run scenarios, list presets, compare outputs.

Every command prints a JSON document on stdout.  Failures print a JSON error
object on stderr and exit nonzero (2 invalid input, 3 numerical failure,
4 lattice-oracle failure, 5 I/O).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .bound_states import RootFindingError, find_bound_states, write_bound_states_csv
from .circuit import TWO_PI, CircuitParams, effective_model, solve_circuit, table_check
from .dynamics import (
    KernelSpec,
    QuadratureError,
    alpha_exact,
    beta_field_small,
    kernel_values,
    write_trace_csv,
)
from .lattice import LatticeError, LatticeState, evolve, oracle_alpha, write_field_binary, write_field_csv
from .master_eq import QubitDensityMatrix, density_matrix, rates, write_master_eq_csv
from .model import ModelParams, Scenario, ValidationError, load_config, scenarios_from_config
from .presets import PRESETS, preset_config
from .spectral import array_factor, j_eff, j_small

log = logging.getLogger("giant_emitters")

WORKERS_ENV = "GIANT_EMITTERS_WORKERS"
DEFAULT_QUAD_TOL = 1e-11
DEFAULT_COMPARE_TOL = 1e-3


class CliError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _fmt(x: float) -> str:
    return f"{x:.15e}"


def _write_sweep_trace(scenario: Scenario, key: str, values, path: Path, abs_tol: float) -> None:
    times = scenario.grid.times
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([key, "t", "abs2_alpha"])
        for v in values:
            params = scenario.params.replace(**{key: float(v)})
            trace = alpha_exact(KernelSpec.from_params(params), times, abs_tol=abs_tol)
            for t, p in zip(times, trace.population):
                writer.writerow([f"{v:.10g}", f"{t:.10g}", _fmt(p)])


def _write_sweep_bound_states(scenario: Scenario, key: str, values, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([key, "kind", "energy", "residue", "kappa_or_phi"])
        for v in values:
            params = scenario.params.replace(**{key: float(v)})
            for s in find_bound_states(params):
                extra = s.kappa if s.is_boc else s.phi
                writer.writerow([f"{v:.10g}", s.kind.value, _fmt(s.energy), _fmt(s.residue), _fmt(extra)])


def _write_spectral(params: ModelParams, path: Path, n: int = 2001) -> None:
    y = np.linspace(-1.0, 1.0, n)[1:-1]
    omega = -2.0 * params.xi * y
    kernel = kernel_values(y, KernelSpec.from_params(params))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if params.giant:
            writer.writerow(["omega", "y_tilde", "j_eff", "array_factor", "kernel"])
            jv_ = j_eff(omega, params.d, params.g0, params.xi)
            af = array_factor(omega, params.d, 2, params.xi)
            for row in zip(omega, y, jv_, af, kernel):
                writer.writerow([_fmt(v) for v in row])
        else:
            writer.writerow(["omega", "y_tilde", "j", "kernel"])
            jv_ = j_small(omega, params.g0, params.xi)
            for row in zip(omega, y, jv_, kernel):
                writer.writerow([_fmt(v) for v in row])


def _field(scenario: Scenario, trace):
    """Sites and occupations within ``|n| <= field_sites``.

    The single-point emitter uses the Bessel convolution of the exact trace;
    the giant emitter uses the lattice integrator.
    """
    p = scenario.params
    n_max = min(scenario.field_sites, scenario.grid.lattice_half_width)
    sites = np.arange(-n_max, n_max + 1)
    if p.nc == 1:
        beta = beta_field_small(sites, trace, p)
        return sites, np.abs(beta.T) ** 2
    grid = scenario.grid
    traj = evolve(LatticeState.excited(grid.lattice_half_width), grid, p)
    return traj.field(n_max)


def _circuit_report(spec: dict) -> dict:
    element_keys = {"l0", "c0", "c", "cg", "c_sigma_q", "ej", "ec"}
    target_keys = {"omega0_hz", "xi_hz", "g0_hz"}
    if element_keys <= set(spec):
        cp = CircuitParams(**{k: float(spec[k]) for k in element_keys})
        return {"circuit": cp.to_dict(), "effective": effective_model(cp).to_dict()}
    if target_keys <= set(spec):
        optional = {}
        if "omega_q_hz" in spec:
            optional["omega_q"] = TWO_PI * float(spec["omega_q_hz"])
        for k in ("c_sigma_prime", "c_sigma_q", "ec"):
            if k in spec:
                optional[k] = float(spec[k])
        cp = solve_circuit(*(TWO_PI * float(spec[k]) for k in ("omega0_hz", "xi_hz", "g0_hz")), **optional)
        eff = effective_model(cp)
        hz = eff.in_hz()
        rel = {k: abs(hz[k] - float(spec[f"{k}_hz"])) / float(spec[f"{k}_hz"]) for k in ("omega0", "xi", "g0")}
        return {"circuit": cp.to_dict(), "effective": eff.to_dict(), "target_relative_error": rel}
    raise ValidationError(f"circuit block needs either {sorted(element_keys)} or {sorted(target_keys)}")


def _dump_json(obj, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_scenario(scenario: Scenario, out_dir: str | Path, abs_tol: float = DEFAULT_QUAD_TOL, compare_tol: float = DEFAULT_COMPARE_TOL) -> dict:
    """Compute and write every requested output of one scenario."""
    target = Path(out_dir) / scenario.name
    target.mkdir(parents=True, exist_ok=True)
    p = scenario.params
    outputs = scenario.outputs
    written = []
    status = {"oracle": None}
    sweep = scenario.sweep or {}
    sweep_key, sweep_values = next(iter(sweep.items())) if sweep else (None, None)

    if sweep_key is not None:
        if "trace" in outputs:
            _write_sweep_trace(scenario, sweep_key, sweep_values, target / "sweep_trace.csv", abs_tol)
            written.append("sweep_trace.csv")
        if "bound_states" in outputs:
            _write_sweep_bound_states(scenario, sweep_key, sweep_values, target / "sweep_bound_states.csv")
            written.append("sweep_bound_states.csv")
    needs_trace = bool(outputs & {"trace", "field", "rates", "entropy"}) and sweep_key is None
    trace = None
    if needs_trace:
        trace = alpha_exact(KernelSpec.from_params(p), scenario.grid, abs_tol=abs_tol)
        if "trace" in outputs:
            write_trace_csv(trace, target / "trace.csv")
            written.append("trace.csv")
    if "bound_states" in outputs and sweep_key is None:
        write_bound_states_csv(find_bound_states(p), target / "bound_states.csv")
        written.append("bound_states.csv")
    if "field" in outputs and trace is not None:
        sites, occ = _field(scenario, trace)
        write_field_csv(scenario.grid.times, sites, occ, target / "field.csv")
        write_field_binary(scenario.grid.times, sites, occ, target / "field.npz")
        written += ["field.csv", "field.npz"]
    if outputs & {"rates", "entropy"} and trace is not None:
        states = density_matrix(trace, QubitDensityMatrix.excited())
        write_master_eq_csv(states, rates(trace), target / "master_eq.csv")
        written.append("master_eq.csv")
    if "spectral" in outputs:
        _write_spectral(p, target / "spectral.csv")
        written.append("spectral.csv")
    if "circuit" in outputs:
        if not scenario.circuit:
            raise ValidationError(f"scenario {scenario.name!r} requests circuit output without a circuit block")
        _dump_json(_circuit_report(scenario.circuit), target / "circuit.json")
        written.append("circuit.json")
    if scenario.oracle and trace is not None:
        g = scenario.grid
        traj = oracle_alpha(p, g.t_max, g.n_t, g.lattice_half_width)
        with open(target / "oracle_trace.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "re_alpha", "im_alpha", "abs2_alpha"])
            for t, a in zip(traj.times, traj.alpha):
                writer.writerow([f"{t:.10g}", _fmt(a.real), _fmt(a.imag), _fmt(abs(a) ** 2)])
        written.append("oracle_trace.csv")
        report = compare_files(target / "trace.csv", target / "oracle_trace.csv", compare_tol)
        status["oracle"] = report
    return {
        "name": scenario.name,
        "params": p.to_dict(),
        "grid": scenario.grid.to_dict(),
        "outputs": sorted(outputs),
        "sweep": sweep or None,
        "tolerances": {"quadrature_abs": abs_tol, "oracle_abs2": compare_tol},
        "files": {f"{scenario.name}/{name}": _sha256(target / name) for name in sorted(written)},
        "oracle": status["oracle"],
    }


def _worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise CliError(f"{WORKERS_ENV} must be >= 1")
    return n


def run(scenarios: list[Scenario], out_dir: str | Path, abs_tol: float = DEFAULT_QUAD_TOL, compare_tol: float = DEFAULT_COMPARE_TOL) -> dict:
    """Run every scenario and write ``manifest.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    workers = _worker_count()
    if workers > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_scenario, s, out, abs_tol, compare_tol) for s in scenarios]
            entries = [f.result() for f in futures]
    else:
        entries = [run_scenario(s, out, abs_tol, compare_tol) for s in scenarios]
    manifest = {"tool": "giant-emitters", "version": __version__, "scenarios": entries}
    _dump_json(manifest, out / "manifest.json")
    failed = [e["name"] for e in entries if e["oracle"] is not None and not e["oracle"]["pass"]]
    if failed:
        raise CliError(f"oracle comparison failed for {failed}", code=4)
    return manifest


def _read_columns(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [list(map(float, r)) for r in reader if r]
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def compare_files(a: str | Path, b: str | Path, tolerance: float = DEFAULT_COMPARE_TOL) -> dict:
    """Column-wise deviations between two trace CSVs sharing a time grid.

    Passes when ``max |abs2_alpha_a - abs2_alpha_b| < tolerance`` (or, if
    that column is missing, every shared column stays below ``tolerance``).
    """
    pa, pb = Path(a), Path(b)
    if pa.is_dir():
        pa = pa / "trace.csv"
    if pb.is_dir():
        pb = pb / "trace.csv"
    da, db = _read_columns(pa), _read_columns(pb)
    if "t" not in da or "t" not in db:
        raise ValidationError("both files need a 't' column")
    if da["t"].shape != db["t"].shape or np.max(np.abs(da["t"] - db["t"]), initial=0.0) > 1e-9:
        raise ValidationError("time grids differ")
    shared = sorted((set(da) & set(db)) - {"t"})
    if not shared:
        raise ValidationError("no common data columns")
    quantities = {}
    for col in shared:
        dev = np.abs(da[col] - db[col])
        quantities[col] = {"max_abs": float(dev.max()), "mean_abs": float(dev.mean())}
    gate = ["abs2_alpha"] if "abs2_alpha" in quantities else shared
    ok = all(quantities[c]["max_abs"] < tolerance for c in gate)
    return {"a": str(pa), "b": str(pb), "tolerance": tolerance, "gated_on": gate, "quantities": quantities, "pass": bool(ok)}


def _load(args) -> list[Scenario]:
    if getattr(args, "preset", None):
        try:
            return scenarios_from_config(preset_config(args.preset))
        except KeyError as exc:
            raise CliError(str(exc.args[0])) from None
    if not args.config:
        raise CliError("give a config file or --preset")
    return load_config(args.config)


def _cmd_simulate(args) -> dict:
    scenarios = _load(args)
    abs_tol = args.tolerance if args.tolerance is not None else DEFAULT_QUAD_TOL
    return run(scenarios, args.out, abs_tol=abs_tol, compare_tol=args.oracle_tolerance)


def _cmd_bound_states(args) -> dict:
    report = []
    for s in _load(args):
        states = find_bound_states(s.params)
        report.append(
            {
                "name": s.name,
                "params": s.params.to_dict(),
                "bound_states": [
                    {"kind": b.kind.value, "energy": b.energy, "residue": b.residue, "kappa": b.kappa, "phi": b.phi} for b in states
                ],
            }
        )
    return {"scenarios": report}


def _cmd_circuit(args) -> dict:
    result = {}
    if args.config or args.preset:
        result["scenarios"] = [{"name": s.name, **_circuit_report(s.circuit)} for s in _load(args) if s.circuit]
        if not result["scenarios"]:
            raise ValidationError("no scenario carries a circuit block")
    if args.table_check or not result:
        result["table_check"] = table_check(args.tolerance if args.tolerance is not None else 1e-3)
    return result


def _cmd_compare(args) -> dict:
    tol = args.tolerance if args.tolerance is not None else DEFAULT_COMPARE_TOL
    report = compare_files(args.a, args.b, tol)
    if not report["pass"]:
        print(json.dumps(report, indent=2, sort_keys=True))
        raise CliError("deviation exceeds tolerance", code=1)
    return report


def _cmd_presets(args) -> dict:
    if args.show:
        try:
            return preset_config(args.show)
        except KeyError as exc:
            raise CliError(str(exc.args[0])) from None
    return {"presets": {name: p["description"] for name, p in sorted(PRESETS.items())}}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="giant-emitters", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run scenarios and write CSV outputs plus manifest.json")
    sim.add_argument("config", nargs="?")
    sim.add_argument("--preset")
    sim.add_argument("-o", "--out", default="out")
    sim.add_argument("--tolerance", type=float, help=f"absolute quadrature tolerance per time point (default {DEFAULT_QUAD_TOL})")
    sim.add_argument(
        "--oracle-tolerance", type=float, default=DEFAULT_COMPARE_TOL, help="max |alpha|^2 deviation accepted against the lattice oracle"
    )
    sim.set_defaults(func=_cmd_simulate)

    bs = sub.add_parser("bound-states", help="print bound-state energies and residues")
    bs.add_argument("config", nargs="?")
    bs.add_argument("--preset")
    bs.set_defaults(func=_cmd_bound_states)

    circ = sub.add_parser("circuit", help="map circuit elements to model parameters")
    circ.add_argument("config", nargs="?")
    circ.add_argument("--preset")
    circ.add_argument("--table-check", action="store_true", help="check the reference device values")
    circ.add_argument("--tolerance", type=float, help="relative tolerance of the table check (default 1e-3)")
    circ.set_defaults(func=_cmd_circuit)

    cmp_ = sub.add_parser("compare", help="compare two trace CSVs (or output directories)")
    cmp_.add_argument("a")
    cmp_.add_argument("b")
    cmp_.add_argument("--tolerance", type=float, help=f"max |alpha|^2 deviation (default {DEFAULT_COMPARE_TOL})")
    cmp_.set_defaults(func=_cmd_compare)

    pre = sub.add_parser("presets", help="list presets or print one as a config")
    pre.add_argument("--list", action="store_true", help="list preset names (default)")
    pre.add_argument("--show", metavar="NAME")
    pre.set_defaults(func=_cmd_presets)
    return parser


_ERROR_CODES = (
    (CliError, None),
    (ValidationError, 2),
    (LatticeError, 4),
    (QuadratureError, 3),
    (RootFindingError, 3),
    (OSError, 5),
    (ValueError, 2),
    (KeyError, 2),
)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        result = args.func(args)
    except Exception as exc:
        for kind, code in _ERROR_CODES:
            if isinstance(exc, kind):
                code = exc.code if isinstance(exc, CliError) else code
                payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
                print(json.dumps(payload, sort_keys=True), file=sys.stderr)
                return code
        raise
    print(json.dumps(result, indent=2, sort_keys=True, default=str))
    return 0
