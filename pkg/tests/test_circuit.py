import math
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from giant_emitters.circuit import (
    TWO_PI,
    CircuitParams,
    CircuitRegimeWarning,
    effective_model,
    solve_circuit,
    table_check,
)

BASE = dict(l0=1.5e-9, c0=400e-15, c=40e-15, cg=4e-15, c_sigma_q=80e-15, ej=1e-23, ec=1.6e-25)


def test_formulas():
    cp = CircuitParams(**BASE)
    eff = effective_model(cp)
    c_prime = 400e-15 + 80e-15 + 4e-15
    assert cp.c_sigma_prime == pytest.approx(c_prime)
    assert eff.omega0 == pytest.approx(1 / math.sqrt(1.5e-9 * c_prime))
    assert eff.xi == pytest.approx(eff.omega0 * 40e-15 / (2 * c_prime))
    assert eff.g0 == pytest.approx(0.5 * 4e-15 * math.sqrt(eff.omega_q * eff.omega0 / (80e-15 * c_prime)))
    assert eff.delta == pytest.approx(eff.omega_q - eff.omega0)


def test_decoupled_qubit():
    eff = effective_model(CircuitParams(**{**BASE, "cg": 0.0}))
    assert eff.g0 == 0.0
    # without Cg the renormalized capacitance is the bare node capacitance
    assert eff.omega0 == pytest.approx(1 / math.sqrt(1.5e-9 * 480e-15))


def test_weak_coupling_limit():
    # C << C0 leaves C_sigma ~ C0
    cp = CircuitParams(**{**BASE, "c": 1e-18, "cg": 0.0})
    assert cp.c_sigma == pytest.approx(cp.c0, rel=1e-5)


def test_inductance_scaling():
    a = effective_model(CircuitParams(**BASE))
    b = effective_model(CircuitParams(**{**BASE, "l0": 2 * BASE["l0"]}))
    assert b.omega0 == pytest.approx(a.omega0 / math.sqrt(2))
    assert b.xi == pytest.approx(a.xi / math.sqrt(2))


@given(st.floats(min_value=0.1, max_value=10.0))
def test_unit_rescaling(lam):
    # all capacitances times lam: omega0 and xi scale as lam^-1/2, ratios fixed
    scaled = {k: v * lam if k in ("c0", "c", "cg", "c_sigma_q") else v for k, v in BASE.items()}
    a = effective_model(CircuitParams(**BASE))
    b = effective_model(CircuitParams(**scaled))
    assert b.omega0 == pytest.approx(a.omega0 / math.sqrt(lam), rel=1e-12)
    assert b.xi / b.omega0 == pytest.approx(a.xi / a.omega0, rel=1e-12)
    assert b.g0 == pytest.approx(a.g0 * (a.omega0 / b.omega0) ** -0.5 / math.sqrt(1.0), rel=1e-12)


def test_regime_warning():
    with pytest.warns(CircuitRegimeWarning):
        eff = effective_model(CircuitParams(**{**BASE, "c": 200e-15}))
    assert eff.warnings


def test_invalid_circuit():
    with pytest.raises(ValueError):
        CircuitParams(**{**BASE, "l0": 0.0})
    with pytest.raises(ValueError):
        CircuitParams(**{**BASE, "cg": -1e-15})


circuits = st.builds(
    CircuitParams,
    l0=st.floats(min_value=0.5e-9, max_value=5e-9),
    c0=st.floats(min_value=200e-15, max_value=1000e-15),
    c=st.floats(min_value=5e-15, max_value=15e-15),
    cg=st.floats(min_value=0.5e-15, max_value=10e-15),
    c_sigma_q=st.floats(min_value=50e-15, max_value=150e-15),
    ej=st.floats(min_value=5e-24, max_value=5e-23),
    ec=st.floats(min_value=1e-25, max_value=3e-25),
)


@given(circuits)
def test_round_trip(cp):
    with warnings.catch_warnings():
        warnings.simplefilter("error", CircuitRegimeWarning)
        eff = effective_model(cp)
    back = solve_circuit(eff.omega0, eff.xi, eff.g0, omega_q=eff.omega_q, c_sigma_prime=cp.c_sigma_prime, c_sigma_q=cp.c_sigma_q, ec=cp.ec)
    for name in ("l0", "c0", "c", "cg", "c_sigma_q", "ej", "ec"):
        assert getattr(back, name) == pytest.approx(getattr(cp, name), rel=1e-6)


def test_unreachable_targets():
    with pytest.raises(ValueError):
        solve_circuit(TWO_PI * 5e9, TWO_PI * 3e9, TWO_PI * 50e6)


def test_model_units():
    cp = solve_circuit(TWO_PI * 5.71e9, TWO_PI * 249e6, TWO_PI * 49.8e6)
    p = effective_model(cp).to_model_params(nc=2, d=12)
    assert p.xi == 1.0
    assert p.g0 == pytest.approx(0.2)
    assert p.omega0 == pytest.approx(5.71e9 / 249e6)
    assert p.delta == pytest.approx(0.0, abs=1e-9)


def test_table_check_passes():
    report = table_check()
    assert report["pass"]
    names = {c["name"]: c for c in report["checks"]}
    assert names["xi/5 [MHz]"]["value"] == pytest.approx(49.8)
