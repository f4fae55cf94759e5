"""Periodic compressible Navier-Stokes on the torus T^d = [0, 1)^d.

Conservative variables (rho, m = rho u), centered second-order differences,
explicit SSP-RK3.  The convective terms are differences of fluxes, so the
discrete sums of rho and m telescope to zero each stage.
"""
from __future__ import annotations

import csv
import io
import math
import struct
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, FitQualityError, InstabilityError, VacuumError
from .fnorms import DecaySeries, fit_rate, fixed_sum, grid_norm
from .grids import TorusGrid, d1, d2
from .waves import DENSITY_FLOOR, PressureLaw


@dataclass(frozen=True)
class ViscousParams:
    mu: float = 0.1
    lam: float = 0.1

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError("mu must be positive")
        if not self.lam + 2.0 * self.mu / 3.0 >= 0:
            raise DomainError("need lam + 2 mu / 3 >= 0")

    @property
    def nu(self) -> float:
        """2 mu + lam, the longitudinal viscosity."""
        return 2.0 * self.mu + self.lam


@dataclass
class FlowState:
    rho: np.ndarray
    mom: np.ndarray  # shape (d,) + rho.shape
    t: float = 0.0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.mom = np.asarray(self.mom, dtype=float)
        if self.mom.shape != (self.rho.ndim,) + self.rho.shape:
            raise DomainError("momentum must have one component per spatial axis")

    @property
    def d(self) -> int:
        return self.rho.ndim

    def velocity(self):
        return self.mom / self.rho

    def copy(self) -> "FlowState":
        return FlowState(self.rho.copy(), self.mom.copy(), self.t)


@dataclass(frozen=True)
class Mode:
    """One Fourier mode cos(2 pi k.x + phase) carried by v0 and the w0 components."""

    k: tuple
    v: float = 0.0
    w: tuple = ()
    phase: float = 0.0


@dataclass(frozen=True)
class PerturbationSpec:
    """eps * sum over modes; zero-wavevector modes are rejected (zero mean)."""

    amplitude: float
    modes: tuple = ()

    def __post_init__(self):
        for m in self.modes:
            if not any(m.k):
                raise DomainError("a zero wavevector would give the perturbation a nonzero mean")

    @property
    def max_wavenumber(self) -> int:
        return max((max(abs(c) for c in m.k) for m in self.modes), default=0)

    def scaled(self, factor: float) -> "PerturbationSpec":
        return PerturbationSpec(self.amplitude * factor, self.modes)

    def fields(self, grid: TorusGrid):
        """(v0, w0) sampled on the torus; w0 has shape (d,) + grid.shape."""
        d = grid.d
        if self.max_wavenumber > grid.n // 4:
            raise DomainError(f"mode {self.max_wavenumber} not resolved on n={grid.n} (need <= n/4)")
        x = grid.mesh()
        v0 = np.zeros(grid.shape)
        w0 = np.zeros((d,) + grid.shape)
        for m in self.modes:
            k = tuple(m.k) + (0,) * (d - len(m.k))
            if any(k[d:]):
                raise DomainError(f"wavevector {m.k} has more components than d={d}")
            arg = m.phase + sum(2.0 * math.pi * k[j] * x[j] for j in range(d) if k[j])
            c = np.cos(arg)
            v0 += m.v * c
            for i, wi in enumerate(m.w[:d]):
                w0[i] += wi * c
        return self.amplitude * v0, self.amplitude * w0


def acoustic_spec(eps: float, base, law: PressureLaw, params: ViscousParams | None = None,
                  k: int = 1, n: int | None = None) -> PerturbationSpec:
    """Single right-going acoustic mode along x1 about base = (rho, u1).

    With ``params`` the mode is the damped eigenvector of the linearized
    system (so the perturbation norm decays as one clean exponential);
    with ``n`` as well, the eigenvector of the centered-difference
    discretization on n points per period.
    """
    rho, u1 = base
    c = float(law.sound_speed(rho))
    kk = 2.0 * math.pi * k
    if n is None:
        ks, k2 = kk, kk * kk
    else:
        h = 1.0 / n
        ks, k2 = math.sin(kk * h) / h, (2.0 * math.sin(0.5 * kk * h) / h) ** 2
    damp = 0.0 if params is None else params.nu * k2 / rho
    # s^2 + damp s + c^2 ks^2 = 0 in the frame moving with u1; right-going root
    s = 0.5 * (-damp - np.sqrt(complex(damp * damp - 4.0 * c * c * ks * ks)))
    if s.imag == 0.0:
        s = complex(0.5 * (-damp + math.sqrt(damp * damp - 4.0 * c * c * ks * ks)))
    zhat = 1j * s / (ks * rho)
    # z = Re(zhat e^{i kk x}) = Re(zhat) cos - Im(zhat) sin; w = rho z + v u1
    modes = [Mode((k,), 1.0, (rho * zhat.real + u1,))]
    if zhat.imag != 0.0:
        modes.append(Mode((k,), 0.0, (-rho * zhat.imag,), -0.5 * math.pi))
    return PerturbationSpec(eps, tuple(modes))


def mixed_spec(eps: float) -> PerturbationSpec:
    """A three-mode sample with incommensurate phases."""
    return PerturbationSpec(eps, (
        Mode((1,), 1.0, (0.5, 0.3, -0.2), 0.3),
        Mode((2, 1), 0.4, (-0.3, 0.6, 0.1), 1.1),
        Mode((1, 0, 1), -0.25, (0.2, -0.1, 0.4), 2.0),
    ))


def init_periodic(grid: TorusGrid, base, spec: PerturbationSpec) -> FlowState:
    """(rho, m)(., 0) = (rho_bar, rho_bar u1_bar e1) + (v0, w0)."""
    rho_bar, u1_bar = base
    v0, w0 = spec.fields(grid)
    rho = rho_bar + v0
    if not np.min(rho) > DENSITY_FLOOR:
        raise DomainError("initial density reaches vacuum")
    mom = w0.copy()
    mom[0] += rho_bar * u1_bar
    return FlowState(rho, mom, 0.0)


# -- right-hand side ---------------------------------------------------------

def rhs(rho, mom, spacing, params: ViscousParams, law: PressureLaw):
    """Time derivative of (rho, m) for the conservative CNS system.

    All differences wrap periodically (np.roll); non-periodic callers
    overwrite the boundary rows afterwards.
    """
    d = rho.ndim
    u = mom / rho
    p = law.p(rho)
    drho = np.zeros_like(rho)
    for j in range(d):
        drho -= d1(mom[j], j, spacing[j])
    # longitudinal derivatives du_j/dx_j, reused by the grad-div mixed terms
    g = [d1(u[j], j, spacing[j]) for j in range(d)]
    dmom = np.empty_like(mom)
    mu, ml = params.mu, params.mu + params.lam
    for i in range(d):
        acc = -d1(p, i, spacing[i])
        for j in range(d):
            acc -= d1(mom[i] * u[j], j, spacing[j])
        for j in range(d):
            acc += (mu + (ml if j == i else 0.0)) * d2(u[i], j, spacing[j])
        for j in range(d):
            if j != i:
                acc += ml * d1(g[j], i, spacing[i])
        dmom[i] = acc
    return drho, dmom


def stable_dt(rho, mom, spacing, params: ViscousParams, law: PressureLaw, cfl: float = 0.4) -> float:
    """cfl * min(dx / max(|u| + c), dx^2 rho_min / (2 (2 mu + lam)))."""
    dx = min(spacing)
    u = mom / rho
    speed = np.sqrt(np.sum(u * u, axis=0)) + law.sound_speed(rho)
    rho_min = float(np.min(rho))
    return cfl * min(dx / float(np.max(speed)), dx * dx * rho_min / (2.0 * params.nu))


def _check(rho, mom, t):
    if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(mom))):
        raise InstabilityError(f"non-finite values at t={t:.6g}")
    if not np.min(rho) > DENSITY_FLOOR:
        raise VacuumError(f"density fell to {np.min(rho):.3e} at t={t:.6g}")


# SSP-RK3 stages as integer weights (a, b, den, c):
#   U_new = (a U_n + b (U_stage + dt L(U_stage))) / den, stage time t + c dt.
# Integer weights keep a + b == den exact; 1/3 + 2/3 rounds to 1 - 2**-54 in
# float64, which would bias the mass total by ~1e-16 per step.
SSP_RK3 = ((0, 1, 1, 1.0), (3, 1, 4, 0.5), (1, 2, 3, 1.0))


def rk_combine(u0, u, du, dt, a, b, den):
    if a == 0:
        return u + dt * du
    return (a * u0 + b * (u + dt * du)) / den


def step_torus(state: FlowState, params: ViscousParams, law: PressureLaw, dt: float,
               spacing: Sequence[float] | None = None) -> FlowState:
    """One SSP-RK3 step on the torus."""
    if spacing is None:
        spacing = (1.0 / state.rho.shape[0],) * state.d
    r0, m0 = state.rho, state.mom
    r, m = r0, m0
    for a, b, den, _c in SSP_RK3:
        _check(r, m, state.t)
        dr, dm = rhs(r, m, spacing, params, law)
        r = rk_combine(r0, r, dr, dt, a, b, den)
        m = rk_combine(m0, m, dm, dt, a, b, den)
    _check(r, m, state.t + dt)
    return FlowState(r, m, state.t + dt)


# -- perturbation norms and trajectories -------------------------------------

def perturbation_fields(state: FlowState, base):
    """(v, w, z) about the constant state base = (rho_bar, u1_bar).

    z is computed as (w - v u_bar) / rho; it equals u - u_bar identically.
    """
    rho_bar, u1_bar = base
    v = state.rho - rho_bar
    w = state.mom.copy()
    w[0] -= rho_bar * u1_bar
    ubar = np.zeros(state.d)
    ubar[0] = u1_bar
    z = (w - v * ubar.reshape((-1,) + (1,) * state.d)) / state.rho
    return v, w, z


def perturbation_norms(state: FlowState, base, grid: TorusGrid):
    """||(v, z)|| in L2, W^{1,inf} and W^{3,inf} using the solver stencils."""
    v, _, z = perturbation_fields(state, base)
    vz = np.concatenate([v[None], z])
    return {
        "L2": grid_norm(vz, 0, 2.0, grid, lead=1),
        "W1inf": grid_norm(vz, 1, math.inf, grid, lead=1),
        "W3inf": grid_norm(vz, 3, math.inf, grid, lead=1),
    }


NORMS = ("L2", "W1inf", "W3inf")


@dataclass
class Trajectory:
    grid: TorusGrid
    base: tuple
    times: np.ndarray
    norms: dict
    mass: np.ndarray
    momentum: np.ndarray  # (samples, d)
    eps: float = 0.0
    min_rho: float = math.inf
    snapshots: list = field(default_factory=list)

    def series(self, name: str) -> DecaySeries:
        return DecaySeries(self.times, np.asarray(self.norms[name]), "exponential", label=name)

    def conservation_drift(self):
        """Max relative drift of the discrete mass and momentum totals."""
        m0 = self.mass[0]
        dm = float(np.max(np.abs(self.mass - m0)) / abs(m0))
        scale = max(float(np.max(np.abs(self.momentum[0]))), abs(m0))
        dp = float(np.max(np.abs(self.momentum - self.momentum[0])) / scale)
        return dm, dp

    def norms_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", *NORMS])
        for i, t in enumerate(self.times):
            w.writerow([repr(float(t))] + [repr(float(self.norms[k][i])) for k in NORMS])
        return buf.getvalue()


def totals(state: FlowState, grid: TorusGrid):
    cv = grid.cell_volume
    return fixed_sum(state.rho) * cv, np.array([fixed_sum(m) * cv for m in state.mom])


def run_torus(state: FlowState, grid: TorusGrid, params: ViscousParams, law: PressureLaw,
              t_final: float, base, sample_dt: float, cfl: float = 0.4, eps: float = 0.0,
              keep_snapshots: bool = False, positivity_floor: float | None = None,
              on_sample: Callable | None = None) -> Trajectory:
    """Advance to t_final, sampling perturbation norms every sample_dt.

    Steps are shortened to land exactly on sample times.  If
    ``positivity_floor`` is given the run aborts when min rho drops below it.
    """
    n_samples = int(round((t_final - state.t) / sample_dt))
    sample_times = state.t + sample_dt * np.arange(n_samples + 1)
    times, mass, mom = [], [], []
    norms = {k: [] for k in NORMS}
    snaps = []
    min_rho = math.inf

    def record(s):
        times.append(s.t)
        for k, val in perturbation_norms(s, base, grid).items():
            norms[k].append(val)
        ms, mm = totals(s, grid)
        mass.append(ms)
        mom.append(mm)
        if keep_snapshots:
            snaps.append(s.copy())
        if on_sample is not None:
            on_sample(s)

    record(state)
    for t_next in sample_times[1:]:
        while state.t < t_next - 1e-12 * max(1.0, t_next):
            dt = min(stable_dt(state.rho, state.mom, grid.spacing, params, law, cfl), t_next - state.t)
            state = step_torus(state, params, law, dt, grid.spacing)
            rmin = float(np.min(state.rho))
            min_rho = min(min_rho, rmin)
            if positivity_floor is not None and rmin < positivity_floor:
                raise VacuumError(f"density {rmin:.4g} below the monitored floor {positivity_floor:.4g}")
        state.t = float(t_next)
        record(state)
    return Trajectory(grid, tuple(base), np.array(times), {k: np.array(v) for k, v in norms.items()},
                      np.array(mass), np.array(mom), eps, min_rho, snaps)


@dataclass
class DecayRate:
    slope: float  # fitted d log||.|| / dt
    alpha: float  # -slope / 2
    residual: float
    status: str = "ok"
    fit: DecaySeries | None = None


def decay_rate(traj: Trajectory, norm: str = "L2", floor: float = 1e-13,
               skip: float = 0.1) -> DecayRate:
    """Exponential fit of log||(v, z)|| against t after the transient.

    The window drops the first ``skip`` fraction of the run and everything
    after the norm reaches ``floor`` times its initial value (round-off
    plateau).  A tail that grows again means the run is under-resolved.
    """
    if norm not in NORMS:
        raise DomainError(f"norm must be one of {NORMS}")
    vals = np.asarray(traj.norms[norm])
    t = traj.times
    if traj.eps == 0.0 or vals[0] <= 1e-300:
        return DecayRate(0.0, 0.0, 0.0, "degenerate, decay vacuous")
    above = vals > floor * vals[0]
    stop = int(np.argmin(above)) if not np.all(above) else vals.size
    start = int(np.searchsorted(t, t[0] + skip * (t[stop - 1] - t[0])))
    seg = vals[start:stop]
    if seg.size < 8:
        raise FitQualityError("too few samples in the decay window")
    if seg[-1] > seg[0]:
        raise FitQualityError("norm grows over the decay window (under-resolved run?)")
    # reject a tail that turns upward: compare the last quarter with its own trend
    q = max(seg.size // 4, 2)
    if np.all(np.diff(np.log(seg[-q:])) > 0):
        raise FitQualityError("non-monotone tail in the decay window")
    fit = fit_rate(DecaySeries(t[start:stop], seg, "exponential", label=norm))
    slope = -fit.fitted_param
    return DecayRate(slope, -0.5 * slope, fit.residual, "ok", fit)


# -- binary snapshots --------------------------------------------------------
# header: int32 d, int32 n, float64 t (little-endian); then rho and the d
# momentum components, each row-major float64 little-endian.

_HEADER = struct.Struct("<iid")


def write_snapshot(path, state: FlowState):
    n = state.rho.shape[-1]
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(state.d, n, float(state.t)))
        fh.write(np.ascontiguousarray(state.rho, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(state.mom, dtype="<f8").tobytes())


def read_snapshot(path, shape=None) -> FlowState:
    """Read a snapshot; ``shape`` overrides the (n,)*d field shape (strip runs)."""
    with open(path, "rb") as fh:
        d, n, t = _HEADER.unpack(fh.read(_HEADER.size))
        data = np.frombuffer(fh.read(), dtype="<f8")
    shape = tuple(shape) if shape is not None else (n,) * d
    size = int(np.prod(shape))
    if data.size != size * (d + 1):
        raise DomainError("snapshot size does not match its header")
    rho = data[:size].reshape(shape).astype(float)
    mom = data[size:].reshape((d,) + shape).astype(float)
    return FlowState(rho, mom, t)
