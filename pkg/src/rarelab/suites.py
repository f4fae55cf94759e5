"""Verification batteries behind ``rarelab --suite``.

Each suite returns a list of Check rows; ``kind`` says how the expected
value was obtained: "identity" (two evaluations that must agree),
"oracle" (independent reference computation) or "rate" (fitted exponent
against a known law).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import RunConfig
from .errors import FitQualityError, RarelabError
from .fnorms import (GN_TUPLES, DecaySeries, band_limited_corpus, fit_rate, gn_decompose,
                     gn_inequality_check)
from .grids import StripGrid, TorusGrid
from .smooth import (delta_halving_ratio, euler_residuals, support_window,
                     log_gradients, wave_decay_report, weight_decay_report)
from .waves import PressureLaw, centered_fan, complete_end_states, riemann_invariants

SUITES = ("waves", "smooth-decay", "torus-decay", "ansatz-error", "gn", "stability")


@dataclass
class Check:
    name: str
    value: float
    tolerance: str
    passed: bool
    kind: str


@dataclass
class SuiteReport:
    suite: str
    checks: list
    config_echo: str
    version: str
    seed: int
    artifacts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _le(name, value, bound, kind="identity"):
    return Check(name, float(value), f"<= {bound!r}", bool(value <= bound), kind)


def _within(name, value, target, tol, kind="rate"):
    return Check(name, float(value), f"{target!r} +- {tol!r}", bool(abs(value - target) <= tol), kind)


def _between(name, value, lo, hi, kind="oracle"):
    return Check(name, float(value), f"[{lo!r}, {hi!r}]", bool(lo <= value <= hi), kind)


def _fit(name, series_fn, check_fn):
    """Run a fit; a FitQualityError becomes a failed check instead of a crash."""
    try:
        return check_fn(series_fn())
    except FitQualityError:
        return Check(name, float("nan"), "fit failed", False, "rate")


# -- waves ---------------------------------------------------------------------

def waves_checks(cfg: RunConfig, **_):
    law = PressureLaw(cfg.gamma)
    checks = []
    worst_fan = worst_z = 0.0
    for rm, rp, um in ((cfg.rho_minus, cfg.rho_plus_eff, cfg.u1_minus), (1.0, 1.2, 0.0),
                       (0.5, 4.0, -1.0), (2.0, 2.5, 0.7)):
        st = complete_end_states(rm, um, rp, law)
        z_m = riemann_invariants(st.rho_minus, st.u1_minus, law)[1]
        z_p = riemann_invariants(st.rho_plus, st.u1_plus, law)[1]
        worst_z = max(worst_z, abs(z_p - z_m))
        xi = np.linspace(st.lambda2_minus - 1.0, st.lambda2_plus + 1.0, 4001)
        fan = centered_fan(xi, 1.0, st)
        inside = (xi > st.lambda2_minus) & (xi < st.lambda2_plus)
        lam2 = fan.u1 + law.sound_speed(fan.rho)
        z2 = riemann_invariants(fan.rho, fan.u1, law)[1]
        res = np.concatenate([np.abs(lam2 - xi)[inside], np.abs(z2 - z_m)])
        worst_fan = max(worst_fan, float(np.max(res)))
    checks.append(_le("fan_back_substitution", worst_fan, 1e-12))
    checks.append(_le("z2_constancy", worst_z, 1e-13))
    return checks


# -- smooth wave -----------------------------------------------------------------

def smooth_checks(cfg: RunConfig, **_):
    wave = cfg.wave()
    checks = []
    worst = 0.0
    mono = math.inf
    for t in (0.0, 1.0, 10.0, 100.0):
        lo, hi = support_window(t, wave)
        x = np.linspace(lo, hi, 10_000)
        mass, mom = euler_residuals(x, t, wave)
        worst = max(worst, float(np.max(np.abs(mass))), float(np.max(np.abs(mom))))
        # log form: a finite log derivative is a strictly positive derivative
        lr, lu = log_gradients(x, t, wave)
        mono = min(mono, float(np.min(lr)), float(np.min(lu)))
    checks.append(_le("euler_residual", worst, 1e-8))
    checks.append(Check("min_log_d1_rho_u1", mono, "> -inf", bool(mono > -math.inf), "identity"))
    times = np.geomspace(10.0, 1000.0, 12)
    for p in (1.0, 2.0, math.inf):
        target = -1.0 + (0.0 if p == math.inf else 1.0 / p)
        name = f"grad_L{p:g}_exponent"
        checks.append(_fit(name, lambda: wave_decay_report(p, times, wave),
                           lambda s, n=name, tg=target: _within(n, s.fitted_param, tg, 0.05)))
    name = "sigma_one_minus_sigma_L1_growth"
    checks.append(_fit(name, lambda: weight_decay_report(1.0, times, wave)["sigma_one_minus_sigma"],
                       lambda s: _within(name, s.fitted_param, 1.0, 0.1)))
    small = wave.with_delta(min(cfg.delta_eff, 0.2))
    ratio = delta_halving_ratio(np.concatenate([[0.0, 0.5, 1.0, 2.0, 5.0], times]), small)
    checks.append(_between("sigma_minus_eta_delta_halving", ratio, 1.6, 2.4))
    return checks


# -- torus -------------------------------------------------------------------------

def torus_checks(cfg: RunConfig, out_dir: Path | None = None, **_):
    from .torus import NORMS, acoustic_spec, decay_rate, init_periodic, run_torus

    law, visc = PressureLaw(cfg.gamma), cfg.viscous()
    n, base = 128, (1.0, 0.0)
    grid = TorusGrid(1, n)
    trajs = {}
    for eps in (0.01, 0.005):
        s = init_periodic(grid, base, acoustic_spec(eps, base, law, visc, n=n))
        trajs[eps] = run_torus(s, grid, visc, law, 1.5, base, 0.025, eps=eps)
    tr = trajs[0.01]
    if out_dir is not None:
        (out_dir / "torus_norms.csv").write_text(tr.norms_csv())
    dm, dp = tr.conservation_drift()
    checks = [_le("mass_drift_rel", dm, 1e-12), _le("momentum_drift_rel", dp, 1e-12)]
    for norm in NORMS:
        try:
            r = decay_rate(tr, norm)
            checks.append(Check(f"{norm}_alpha", r.alpha, "> 0.0", bool(r.alpha > 0), "rate"))
            checks.append(_le(f"{norm}_log_fit_residual", r.residual, 0.05, "rate"))
        except FitQualityError:
            checks.append(Check(f"{norm}_alpha", float("nan"), "> 0.0", False, "rate"))
        half = trajs[0.005].norms[norm]
        dev = float(np.max(np.abs(tr.norms[norm] / (2.0 * half) - 1.0)))
        checks.append(_le(f"{norm}_eps_halving_dev", dev, 0.1, "oracle"))
    return checks


# -- ansatz error terms and initial data ----------------------------------------

def ansatz_checks(cfg: RunConfig, out_dir: Path | None = None, **_):
    from .ansatz import error_norms_csv, error_series
    from .torus import Mode, PerturbationSpec

    law, visc = PressureLaw(cfg.gamma), cfg.viscous()
    wave = cfg.wave()
    checks = []
    # transverse shear modes: exact parallel flows on both tori
    spec = PerturbationSpec(cfg.epsilon, (Mode((0, 1), 0.0, (1.0, 0.0)),
                                          Mode((0, 2), 0.0, (0.5, 0.0), 0.7)))
    times = np.linspace(0.5, 5.0, 19)
    S = error_series(wave, visc, law, 2, 16, spec, times)
    checks.append(_le("h0_decomposition_identity", S.identity_h0, 1e-11))
    checks.append(_le("h_decomposition_identity", S.identity_h, 1e-11))
    if out_dir is not None:
        rows = [(t, 1.0, S.norms["h0_W2_1.0"][i], S.norms["h_shift_W1_1.0"][i],
                 S.norms["f_W1_1.0"][i], S.norms["g_W1inf"][i]) for i, t in enumerate(times)]
        (out_dir / "error_norms.csv").write_text(error_norms_csv(rows))
    for key, label in (("h0_W1_1.0", "h0_W11"), ("h_shift_L_1.0", "h_shifted_L1")):
        ser = DecaySeries(times, np.asarray(S.norms[key]), "exponential", label=label)
        try:
            f = fit_rate(ser, t_min=1.5)
            slope = -f.fitted_param
            checks.append(Check(f"{label}_log_slope", slope, "< 0.0", bool(slope < 0), "rate"))
            checks.append(_le(f"{label}_fit_residual", f.residual, 0.1, "rate"))
        except FitQualityError:
            checks.append(Check(f"{label}_log_slope", float("nan"), "< 0.0", False, "rate"))
    # eps = 0: the error terms are pure truncation error of the smooth wave
    zero = PerturbationSpec(0.0, ())
    prev = None
    for n in (16, 32, 64):
        E = error_series(wave, visc, law, 1, n, zero, [1.0], remove_wave=False, half_length=20.0)
        cur = (E.norms["h0_W1_1.0"][0], E.norms["h_shift_L_1.0"][0])
        if prev is not None:
            checks.append(_between(f"eps0_h0_refinement_ratio_n{n}", prev[0] / cur[0], 3.0, 5.0))
            checks.append(_between(f"eps0_h_shift_refinement_ratio_n{n}", prev[1] / cur[1], 3.0, 5.0))
        prev = cur
    checks += initial_data_checks(cfg)
    return checks


def initial_data_checks(cfg: RunConfig):
    from .ansatz import build_ansatz
    from .fnorms import lp_norm
    from .strip import init_strip, periodic_companions, psi0_closed_form, strip_spec

    wave = cfg.wave()
    strip = StripGrid.covering(cfg.d, 16, 12.0)

    def psi0(w, eps):
        spec = strip_spec(eps, cfg.d)
        s0 = init_strip(strip, w, spec)
        _, m, p = periodic_companions(strip, w, spec)
        A = build_ansatz(strip, w, m, p, 0.0)
        return s0, A, s0.velocity() - A.u_tilde, psi0_closed_form(strip, w, spec)

    s0, A, psi, closed = psi0(wave, cfg.epsilon)
    phi0 = max(float(np.max(np.abs(s0.rho - A.rho_tilde))),
               float(np.max(np.abs(s0.rho - A.rho_tilde_alt))))
    checks = [_le("phi0_zero", phi0, 1e-13),
              _le("psi0_closed_form", float(np.max(np.abs(psi - closed))), 1e-12)]

    def norm(w, eps):
        return lp_norm(psi0(w, eps)[2], 2.0, strip, lead=1)

    small = wave.with_delta(min(cfg.delta_eff, 0.2))
    eps = cfg.epsilon
    checks.append(_between("psi0_delta_halving", norm(small, eps) / norm(small.with_delta(
        0.5 * small.states.delta), eps), 1.8, 2.2))
    checks.append(_between("psi0_eps_halving", norm(small, eps) / norm(small, 0.5 * eps), 1.8, 2.2))
    return checks


# -- Gagliardo-Nirenberg ----------------------------------------------------------

GN_BOUND = 1.0


def gn_checks(cfg: RunConfig, seed: int = 0, **_):
    grid = StripGrid.covering(3, 16, 8.0)
    corpus = band_limited_corpus(grid, 100, seed)
    checks = []
    for tup in GN_TUPLES:
        ratios = [gn_inequality_check(u, tup.j, tup.m, tup.p, tup.q, tup.r, grid)[0]
                  for u in corpus]
        worst = max(ratios)
        finite = all(math.isfinite(r) for r in ratios)
        checks.append(Check(f"gn_{tup.name}_max_ratio", worst, f"<= {GN_BOUND!r}",
                             bool(finite and worst <= GN_BOUND), "oracle"))
        r2 = gn_inequality_check(2.0 * corpus[0], tup.j, tup.m, tup.p, tup.q, tup.r, grid)[0]
        checks.append(_le(f"gn_{tup.name}_homogeneity", abs(r2 - ratios[0]) / ratios[0], 1e-12))
    rec = orth = 0.0
    w = grid.weights()
    for u in corpus:
        D = gn_decompose(u)
        rec = max(rec, float(np.max(np.abs(D.reconstruct() - u))))
        a, b, c = D.parts
        scale = float(np.sum(w * u * u))
        for x, y in ((a, b), (a, c), (b, c)):
            orth = max(orth, abs(float(np.sum(w * x * y))) / scale)
    checks.append(_le("gn_decomposition_reconstruction", rec, 1e-12))
    checks.append(_le("gn_decomposition_orthogonality", orth, 1e-12))
    return checks


# -- flagship strip run -------------------------------------------------------------

def stability_checks(cfg: RunConfig, out_dir: Path | None = None, **_):
    from .strip import domain_doubling, residual_refinement, run_flagship

    checks = []
    try:
        res = run_flagship(cfg, out_dir)
    except RarelabError as exc:
        return [Check(f"flagship_run_failed: {type(exc).__name__}", float("nan"), "completes",
                      False, "oracle")]
    checks.append(Check("supnorm_to_fan_decreased", res.sup_final,
                        f"< {res.sup_transient!r} (t={res.t_transient:g})", res.decreased, "oracle"))
    checks.append(Check("supnorm_to_fan_below_theta", res.sup_final, f"< {res.theta!r}",
                        res.below_theta, "oracle"))
    checks.append(Check("entropy_sandwich", float(res.sandwich_ok), "holds at every sample",
                        res.sandwich_ok, "identity"))
    ref = residual_refinement(cfg)
    r0, r1 = ref[0][1], ref[-1][1]
    checks.append(_between("res1_refinement_ratio", r0.res1 / r1.res1, 3.0, 5.0))
    checks.append(_between("res2_refinement_ratio", r0.res2 / r1.res2, 3.0, 5.0))
    ident = max(max(r.identity1, r.identity2) for _, r in ref)
    checks.append(_le("residual_primitive_identity", ident, 1e-11))
    dd = domain_doubling(cfg)
    for k, v in dd.items():
        checks.append(_le(f"domain_doubling_{k}", v, 0.01, "oracle"))
    return checks


BATTERIES = {
    "waves": waves_checks,
    "smooth-decay": smooth_checks,
    "torus-decay": torus_checks,
    "ansatz-error": ansatz_checks,
    "gn": gn_checks,
    "stability": stability_checks,
}


def run_suite(name: str, cfg: RunConfig, seed: int = 0, out_dir=None) -> SuiteReport:
    from . import __version__

    if name not in BATTERIES:
        raise KeyError(name)
    out = None
    if out_dir is not None:
        out = Path(out_dir) / name
        out.mkdir(parents=True, exist_ok=True)
    checks = BATTERIES[name](cfg, seed=seed, out_dir=out)
    arts = sorted(p.name for p in out.iterdir()) if out is not None else []
    return SuiteReport(name, checks, cfg.echo(), __version__, seed, arts)


def emit_report(report: SuiteReport, fmt: str = "text") -> str:
    if fmt == "csv":
        lines = ["suite,check,value,tolerance,pass"]
        for c in report.checks:
            tol = c.tolerance.replace('"', '""')
            lines.append(f'{report.suite},{c.name},{c.value!r},"{tol}",{str(c.passed).lower()}')
        return "\n".join(lines) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    out = [f"suite: {report.suite}", f"version: {report.version}", f"seed: {report.seed}",
           "config:"]
    out += ["  " + ln for ln in report.config_echo.splitlines()]
    out.append("checks:")
    width = max((len(c.name) for c in report.checks), default=0)
    for c in report.checks:
        mark = "PASS" if c.passed else "FAIL"
        out.append(f"  {mark}  {c.name:<{width}}  value={c.value!r}  tol {c.tolerance}  [{c.kind}]")
    if report.artifacts:
        out.append("artifacts: " + ", ".join(report.artifacts))
    out.append(f"result: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(out) + "\n"
