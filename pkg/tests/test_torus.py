import math

import numpy as np
import pytest

from rarelab.errors import DomainError, FitQualityError, VacuumError
from rarelab.grids import TorusGrid
from rarelab.torus import (FlowState, Mode, PerturbationSpec, ViscousParams, acoustic_spec,
                           decay_rate, init_periodic, mixed_spec, read_snapshot, rhs, run_torus,
                           stable_dt, step_torus, totals, write_snapshot)
from rarelab.waves import PressureLaw

LAW = PressureLaw(1.4)
VISC = ViscousParams(0.1, 0.1)


def _spectral_d(f, axis, order=1):
    n = f.shape[axis]
    k = 2j * np.pi * np.fft.fftfreq(n, 1.0 / n)
    shape = [1] * f.ndim
    shape[axis] = n
    return np.real(np.fft.ifft(np.fft.fft(f, axis=axis) * (k ** order).reshape(shape), axis=axis))


def _exact_rhs(rho, mom, params, law):
    """Conservative CNS right-hand side with spectral derivatives (reference)."""
    d = rho.ndim
    u = mom / rho
    p = law.p(rho)
    drho = -sum(_spectral_d(mom[j], j) for j in range(d))
    div = sum(_spectral_d(u[j], j) for j in range(d))
    dmom = np.empty_like(mom)
    for i in range(d):
        acc = -_spectral_d(p, i) - sum(_spectral_d(mom[i] * u[j], j) for j in range(d))
        acc += params.mu * sum(_spectral_d(u[i], j, 2) for j in range(d))
        acc += (params.mu + params.lam) * _spectral_d(div, i)
        dmom[i] = acc
    return drho, dmom


def test_uniform_state_is_steady():
    g = TorusGrid(2, 16)
    s = FlowState(np.full(g.shape, 1.3), np.stack([np.full(g.shape, 0.4), np.full(g.shape, -0.2)]), 0.0)
    for _ in range(5):
        s = step_torus(s, VISC, LAW, 0.01)
    assert np.max(np.abs(s.rho - 1.3)) < 1e-14
    assert np.max(np.abs(s.mom[0] - 0.4)) < 1e-14


def test_spatial_operator_is_second_order():
    errs = []
    for n in (32, 64, 128):
        g = TorusGrid(2, n)
        x, y = g.mesh()
        rho = 1.0 + 0.2 * np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y)
        mom = np.stack([0.3 * np.cos(2 * np.pi * (x + y)), 0.1 * np.sin(4 * np.pi * y) + 0.2])
        dr, dm = rhs(rho, mom, g.spacing, VISC, LAW)
        er, em = _exact_rhs(rho, mom, VISC, LAW)
        errs.append(max(np.max(np.abs(dr - er)), np.max(np.abs(dm - em))))
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert all(abs(o - 2.0) <= 0.2 for o in orders), orders


def test_rk3_is_third_order_in_time():
    g = TorusGrid(1, 32)
    base = (1.0, 0.0)
    s0 = init_periodic(g, base, acoustic_spec(0.05, base, LAW))
    T = 0.02

    def run(m):
        s = s0
        for _ in range(m):
            s = step_torus(s, VISC, LAW, T / m)
        return s.rho

    a, b, c = run(40), run(80), run(160)
    order = math.log2(np.max(np.abs(a - b)) / np.max(np.abs(b - c)))
    assert abs(order - 3.0) < 0.3


def test_conservation_in_3d():
    g = TorusGrid(3, 16)
    s = init_periodic(g, (1.0, 0.5), mixed_spec(0.05))
    m0, p0 = totals(s, g)
    for _ in range(10):
        s = step_torus(s, VISC, LAW, stable_dt(s.rho, s.mom, g.spacing, VISC, LAW))
    m1, p1 = totals(s, g)
    assert abs(m1 - m0) <= 1e-12 * m0
    assert np.max(np.abs(p1 - p0)) <= 1e-12 * m0


def test_galilean_shift_keeps_decay():
    g = TorusGrid(1, 128)
    spec = PerturbationSpec(0.01, (Mode((1,), 1.0, (0.0,)),))
    rates = []
    for u1 in (0.0, 0.5):
        base = (1.0, u1)
        s = init_periodic(g, base, spec)
        s.mom[0] += u1 * (s.rho - 1.0)  # same velocity perturbation in the moving frame
        tr = run_torus(s, g, VISC, LAW, 1.0, base, 0.05)
        rates.append(tr.norms["L2"])
    assert np.max(np.abs(rates[1] / rates[0] - 1.0)) < 0.02


def test_degenerate_and_failed_fits():
    g = TorusGrid(1, 32)
    base = (1.0, 0.0)
    s = init_periodic(g, base, PerturbationSpec(0.0, ()))
    tr = run_torus(s, g, VISC, LAW, 0.2, base, 0.02)
    assert decay_rate(tr, "L2").status.startswith("degenerate")
    s = init_periodic(g, base, acoustic_spec(0.01, base, LAW, VISC, n=32))
    tr = run_torus(s, g, VISC, LAW, 0.2, base, 0.02, eps=0.01)
    tr.norms["L2"] = tr.norms["L2"][::-1].copy()
    with pytest.raises(FitQualityError):
        decay_rate(tr, "L2")


def test_vacuum_and_resolution_errors():
    g = TorusGrid(1, 16)
    with pytest.raises(DomainError):
        init_periodic(g, (1.0, 0.0), PerturbationSpec(2.0, (Mode((1,), 1.0),)))
    with pytest.raises(DomainError):
        PerturbationSpec(0.1, (Mode((0,), 1.0),))
    with pytest.raises(DomainError):
        PerturbationSpec(0.1, (Mode((5,), 1.0),)).fields(g)
    s = init_periodic(g, (1.0, 0.0), PerturbationSpec(0.5, (Mode((1,), 1.0),)))
    with pytest.raises(VacuumError):
        run_torus(s, g, VISC, LAW, 0.1, (1.0, 0.0), 0.05, positivity_floor=0.9)


def test_snapshot_roundtrip(tmp_path):
    g = TorusGrid(2, 16)
    s = init_periodic(g, (1.0, 0.2), PerturbationSpec(0.05, (Mode((1, 1), 1.0, (0.2, 0.3)),)))
    s.t = 0.375
    path = tmp_path / "snap.bin"
    write_snapshot(path, s)
    raw = path.read_bytes()
    assert len(raw) == 16 + 8 * 3 * 256
    back = read_snapshot(path)
    assert back.t == 0.375 and np.array_equal(back.rho, s.rho) and np.array_equal(back.mom, s.mom)
    path.write_bytes(raw[:-8])
    with pytest.raises(DomainError):
        read_snapshot(path)


def test_norm_csv_columns():
    g = TorusGrid(1, 16)
    base = (1.0, 0.0)
    tr = run_torus(init_periodic(g, base, acoustic_spec(0.01, base, LAW)), g, VISC, LAW, 0.1, base, 0.05)
    lines = tr.norms_csv().splitlines()
    assert lines[0] == "t,L2,W1inf,W3inf" and len(lines) == 4
