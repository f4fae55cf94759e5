"""Acceptance criteria 1-9, each at its stated tolerance and runtime limit."""
import math
import time

import numpy as np

from rarelab.ansatz import build_ansatz, error_series
from rarelab.config import RunConfig
from rarelab.fnorms import (GN_TUPLES, DecaySeries, band_limited_corpus, fit_rate,
                            gn_decompose, gn_inequality_check, lp_norm)
from rarelab.grids import StripGrid, TorusGrid
from rarelab.smooth import (SmoothWaveParams, delta_halving_ratio, euler_residuals, log_gradients,
                            support_window, wave_decay_report, weight_decay_report)
from rarelab.strip import (domain_doubling, init_strip, periodic_companions, psi0_closed_form,
                           residual_refinement, run_flagship, strip_spec)
from rarelab.torus import (NORMS, Mode, PerturbationSpec, ViscousParams, acoustic_spec,
                           decay_rate, init_periodic, run_torus)
from rarelab.waves import PressureLaw, centered_fan, complete_end_states, riemann_invariants

LAW = PressureLaw(1.4)
VISC = ViscousParams(0.1, 0.1)


def _summary(parts):
    return "; ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}" for k, v in parts.items())


def test_criterion_1_exact_wave_identities(criterion):
    t0 = time.perf_counter()
    fan_res = z_res = 0.0
    for rm, um, rp in ((1.0, 0.0, 3.0), (1.0, 0.0, 1.2), (0.5, -1.0, 4.0), (2.0, 0.7, 2.5)):
        st = complete_end_states(rm, um, rp, LAW)
        z_m = riemann_invariants(st.rho_minus, st.u1_minus, LAW)[1]
        z_res = max(z_res, abs(riemann_invariants(st.rho_plus, st.u1_plus, LAW)[1] - z_m))
        xi = np.linspace(st.lambda2_minus, st.lambda2_plus, 4001)[1:-1]
        fan = centered_fan(xi, 1.0, st)
        lam2 = fan.u1 + LAW.sound_speed(fan.rho)
        z2 = riemann_invariants(fan.rho, fan.u1, LAW)[1]
        fan_res = max(fan_res, float(np.max(np.abs(lam2 - xi))), float(np.max(np.abs(z2 - z_m))))
    dt = time.perf_counter() - t0
    ok = fan_res <= 1e-12 and z_res <= 1e-13 and dt < 1.0
    criterion(1, ok, _summary({"fan_residual": fan_res, "z2_drift": z_res, "runtime_s": dt}))
    assert ok


def test_criterion_2_smooth_wave_solves_euler(criterion):
    t0 = time.perf_counter()
    wave = SmoothWaveParams.from_densities(1.0, 3.0)
    res, mono = 0.0, math.inf
    for t in (0.0, 1.0, 10.0, 100.0):
        lo, hi = support_window(t, wave)
        x = np.linspace(lo, hi, 10_000)
        mass, mom = euler_residuals(x, t, wave)
        res = max(res, float(np.max(np.abs(mass))), float(np.max(np.abs(mom))))
        lr, lu = log_gradients(x, t, wave)
        mono = min(mono, float(np.min(lr)), float(np.min(lu)))
    dt = time.perf_counter() - t0
    # finite log-derivative everywhere <=> d1 rho, d1 u1 > 0 everywhere
    ok = res <= 1e-8 and mono > -math.inf and dt < 10.0
    criterion(2, ok, _summary({"euler_residual": res, "min_log_d1": mono, "runtime_s": dt}))
    assert ok


def test_criterion_3_gradient_decay_rates(criterion):
    t0 = time.perf_counter()
    wave = SmoothWaveParams.from_densities(1.0, 3.0)
    times = np.geomspace(10.0, 1000.0, 12)
    parts, ok = {}, True
    for p in (1.0, 2.0, math.inf):
        target = -1.0 + (0.0 if p == math.inf else 1.0 / p)
        beta = wave_decay_report(p, times, wave).fitted_param
        parts[f"L{p:g}"] = beta
        ok &= abs(beta - target) <= 0.05
    dt = time.perf_counter() - t0
    parts["runtime_s"] = dt
    ok &= dt < 30.0
    criterion(3, ok, _summary(parts))
    assert ok


def test_criterion_4_weight_functions(criterion):
    t0 = time.perf_counter()
    wave = SmoothWaveParams.from_densities(1.0, 3.0)
    times = np.geomspace(10.0, 1000.0, 12)
    growth = weight_decay_report(1.0, times, wave)["sigma_one_minus_sigma"].fitted_param
    small = SmoothWaveParams.from_densities(1.0, 1.2)
    ratio = delta_halving_ratio(np.concatenate([[0.0, 0.5, 1.0, 2.0, 5.0], times]), small)
    dt = time.perf_counter() - t0
    ok = abs(growth - 1.0) <= 0.1 and abs(ratio - 2.0) <= 0.2 * 2.0 and dt < 30.0
    criterion(4, ok, _summary({"growth": growth, "halving_ratio": ratio, "runtime_s": dt}))
    assert ok


def test_criterion_5_periodic_solution(criterion):
    t0 = time.perf_counter()
    grid, base = TorusGrid(1, 128), (1.0, 0.0)
    trajs = {}
    for eps in (0.01, 0.005):
        s = init_periodic(grid, base, acoustic_spec(eps, base, LAW, VISC, n=128))
        trajs[eps] = run_torus(s, grid, VISC, LAW, 1.5, base, 0.025, eps=eps)
    tr = trajs[0.01]
    dm, dp = tr.conservation_drift()
    parts = {"mass_drift": dm, "mom_drift": dp}
    ok = dm <= 1e-12 and dp <= 1e-12
    for norm in NORMS:
        r = decay_rate(tr, norm)
        dev = float(np.max(np.abs(tr.norms[norm] / (2.0 * trajs[0.005].norms[norm]) - 1.0)))
        parts[f"{norm}_alpha"], parts[f"{norm}_resid"], parts[f"{norm}_halving"] = r.alpha, r.residual, dev
        ok &= r.alpha > 0 and r.residual < 0.05 and dev <= 0.1
    dt = time.perf_counter() - t0
    parts["runtime_s"] = dt
    ok &= dt < 120.0
    criterion(5, ok, _summary(parts))
    assert ok


def test_criterion_6_error_terms(criterion):
    t0 = time.perf_counter()
    wave = SmoothWaveParams.from_densities(1.0, 3.0)
    spec = PerturbationSpec(0.05, (Mode((0, 1), 0.0, (1.0, 0.0)), Mode((0, 2), 0.0, (0.5, 0.0), 0.7)))
    times = np.linspace(0.5, 5.0, 19)
    S = error_series(wave, VISC, LAW, 2, 16, spec, times)
    parts = {"h0_identity": S.identity_h0, "h_identity": S.identity_h}
    ok = S.identity_h0 <= 1e-11
    for key in ("h0_W1_1.0", "h_shift_L_1.0"):
        f = fit_rate(DecaySeries(times, np.asarray(S.norms[key]), "exponential"), t_min=1.5)
        parts[f"{key}_slope"], parts[f"{key}_resid"] = -f.fitted_param, f.residual
        ok &= f.fitted_param > 0 and f.residual < 0.1
    zero = PerturbationSpec(0.0, ())
    vals = []
    for n in (16, 32, 64):
        E = error_series(wave, VISC, LAW, 1, n, zero, [1.0], remove_wave=False, half_length=20.0)
        vals.append((E.norms["h0_W1_1.0"][0], E.norms["h_shift_L_1.0"][0]))
    for i in (1, 2):
        for j, name in enumerate(("h0", "h_shift")):
            r = vals[i - 1][j] / vals[i][j]
            parts[f"eps0_{name}_ratio_{i}"] = r
            ok &= 3.0 <= r <= 5.0
    dt = time.perf_counter() - t0
    parts["runtime_s"] = dt
    ok &= dt < 180.0
    criterion(6, ok, _summary(parts))
    assert ok


def _psi0(strip, wave, eps):
    spec = strip_spec(eps, strip.d)
    s0 = init_strip(strip, wave, spec)
    _, m, p = periodic_companions(strip, wave, spec)
    A = build_ansatz(strip, wave, m, p, 0.0)
    return s0, A, s0.velocity() - A.u_tilde, psi0_closed_form(strip, wave, spec)


def test_criterion_7_initial_data_algebra(criterion):
    t0 = time.perf_counter()
    strip = StripGrid.covering(2, 16, 12.0)
    wave = SmoothWaveParams.from_densities(1.0, 1.2)  # delta = 0.2
    s0, A, psi, closed = _psi0(strip, wave, 0.05)
    phi0 = float(np.max(np.abs(s0.rho - A.rho_tilde)))
    closed_err = float(np.max(np.abs(psi - closed)))

    def norm(w, eps):
        return lp_norm(_psi0(strip, w, eps)[2], 2.0, strip, lead=1)

    eps_ratio = norm(wave, 0.05) / norm(wave, 0.025)
    delta_ratio = norm(wave, 0.05) / norm(wave.with_delta(0.1), 0.05)
    dt = time.perf_counter() - t0
    ok = (phi0 <= 1e-13 and closed_err <= 1e-12 and abs(eps_ratio - 2.0) <= 0.2
          and abs(delta_ratio - 2.0) <= 0.2 and dt < 10.0)
    criterion(7, ok, _summary({"phi0": phi0, "psi0_closed_form": closed_err,
                               "eps_halving": eps_ratio, "delta_halving": delta_ratio,
                               "runtime_s": dt}))
    assert ok


def test_criterion_8_flagship(criterion):
    t0 = time.perf_counter()
    cfg = RunConfig()
    res = run_flagship(cfg)
    ref = residual_refinement(cfg)
    r1 = ref[0][1].res1 / ref[1][1].res1
    r2 = ref[0][1].res2 / ref[1][1].res2
    ident = max(max(r.identity1, r.identity2) for _, r in ref)
    dd = domain_doubling(cfg)
    dt = time.perf_counter() - t0
    ok = (res.decreased and res.below_theta and res.sandwich_ok and 3.0 <= r1 <= 5.0
          and 3.0 <= r2 <= 5.0 and ident <= 1e-11 and max(dd.values()) < 0.01 and dt < 600.0)
    criterion(8, ok, _summary({"sup_t5": res.sup_transient, "sup_final": res.sup_final,
                               "theta": res.theta, "res1_ratio": r1, "res2_ratio": r2,
                               "identity": ident, "doubling": max(dd.values()), "runtime_s": dt}))
    assert ok


def test_criterion_9_gagliardo_nirenberg(criterion):
    t0 = time.perf_counter()
    grid = StripGrid.covering(3, 16, 8.0)
    corpus = band_limited_corpus(grid, 100, seed=0)
    parts, ok = {}, True
    for tup in GN_TUPLES:
        ratios = [gn_inequality_check(u, tup.j, tup.m, tup.p, tup.q, tup.r, grid)[0] for u in corpus]
        parts[f"{tup.name}_max"] = max(ratios)
        ok &= all(math.isfinite(r) for r in ratios) and max(ratios) <= 1.0
    w = grid.weights()
    rec = orth = 0.0
    for u in corpus:
        D = gn_decompose(u)
        rec = max(rec, float(np.max(np.abs(D.reconstruct() - u))))
        a, b, c = D.parts
        scale = float(np.sum(w * u * u))
        orth = max(orth, *(abs(float(np.sum(w * x * y))) / scale for x, y in ((a, b), (a, c), (b, c))))
    dt = time.perf_counter() - t0
    parts.update(reconstruction=rec, orthogonality=orth, runtime_s=dt)
    ok &= rec <= 1e-12 and orth <= 1e-12 and dt < 60.0
    criterion(9, ok, _summary(parts))
    assert ok
