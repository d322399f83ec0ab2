"""Demagnetization / magnetization segment propagators.

During these segments the external field omega(t) sweeps between its two
set points with no bath contact.  The (E, L, C) components obey, in the
winding variable Theta (dTheta = Omega dt),

    d/dTheta (E, L, C) = [[ r, -mu, 0 ],
                          [ mu,  r, -1 ],
                          [ 0,   1,  r ]] (E, L, C)

with mu = J * domega/dt / Omega^3 the adiabatic measure and r the scalar
level-scaling rate; r integrates exactly to Omega_end/Omega_start.  For a
schedule that keeps mu constant the remaining generator is a fixed
rotation about the axis (1, 0, mu)/sqrt(1 + mu^2), which yields the
closed-form propagator; arbitrary schedules and control noise are handled
by adaptive ODE integration.

Control noise enters as Lindblad double commutators: phase noise damps
the L and C rows by gamma_p * Omega per unit Theta; amplitude noise adds
a field-aligned dissipator proportional to gamma_a * omega^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .errors import DegenerateField, IntegrationFailure, NoSolution, ScheduleInfeasible
from .medium import FieldPoint, MediumParams, effective_gap
from .propagator import AffinePropagator, assemble

ODE_RTOL = 1e-12
ODE_ATOL = 1e-14


@dataclass(frozen=True)
class NoiseParams:
    """Strengths of phase and amplitude noise on the field controls."""

    gamma_p: float = 0.0
    gamma_a: float = 0.0

    def __post_init__(self):
        if self.gamma_p < 0 or self.gamma_a < 0:
            raise ValueError("noise strengths must be >= 0")

    @property
    def is_zero(self) -> bool:
        return self.gamma_p == 0.0 and self.gamma_a == 0.0


@dataclass(frozen=True)
class AdiabatSpec:
    """One field sweep: endpoints, duration, schedule kind and noise.

    schedule is "constant-mu", "linear", or a (t_k, omega_k) table covering
    [0, tau] with strictly increasing t_k.
    """

    omega_start: float
    omega_end: float
    tau: float
    schedule: object = "constant-mu"
    noise: NoiseParams = field(default_factory=NoiseParams)

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if self.omega_start < 0 or self.omega_end < 0:
            raise ValueError("field endpoints must be >= 0")
        if isinstance(self.schedule, str):
            if self.schedule not in ("constant-mu", "linear"):
                raise ValueError(f"unknown schedule {self.schedule!r}")
        else:
            t, w = self.schedule
            t = np.asarray(t, dtype=float)
            w = np.asarray(w, dtype=float)
            if t.ndim != 1 or t.shape != w.shape or len(t) < 2:
                raise ValueError("table schedule needs matching 1-d t and omega")
            if np.any(np.diff(t) <= 0):
                raise ValueError("table times must be strictly increasing")
            if abs(t[0]) > 1e-12 or abs(t[-1] - self.tau) > 1e-9 * max(1.0, self.tau):
                raise ValueError("table must cover [0, tau]")
            if np.any(w < 0):
                raise ScheduleInfeasible("table schedule leaves omega >= 0")
            object.__setattr__(self, "schedule", (t, w))


@dataclass(frozen=True)
class AdiabatGeometry:
    """Constant-mu invariants of a sweep between two field points.

    K is the reciprocal constant (K = tau * mu), Phi the signed compression
    angle, mu the adiabatic measure and Theta_total = Phi / mu the total
    winding angle.
    """

    start: FieldPoint
    end: FieldPoint
    K: float
    Phi: float
    mu: float
    Theta_total: float


def adiabat_geometry(spec: AdiabatSpec, medium: MediumParams) -> AdiabatGeometry:
    """Geometry of the constant-mu sweep defined by spec's endpoints and tau."""
    fs = effective_gap(spec.omega_start, medium)
    fe = effective_gap(spec.omega_end, medium)
    f0 = fs.omega / fs.Omega
    f1 = fe.omega / fe.Omega
    K = (f1 - f0) / medium.J
    Phi = float(np.arcsin(f1) - np.arcsin(f0))
    mu = K / spec.tau
    theta = Phi / mu if mu != 0.0 else 0.0
    return AdiabatGeometry(fs, fe, K, Phi, mu, theta)


def constant_mu_schedule(spec: AdiabatSpec, medium: MediumParams
                         ) -> Callable[[float], tuple[float, float]]:
    """omega(t), Omega(t) for the schedule that keeps mu constant.

    f(t) = omega/Omega is linear in t; omega = J f / sqrt(1 - f^2).
    """
    if spec.schedule != "constant-mu":
        raise ValueError("spec schedule is not constant-mu")
    fs = effective_gap(spec.omega_start, medium)
    fe = effective_gap(spec.omega_end, medium)
    f0 = fs.omega / fs.Omega
    f1 = fe.omega / fe.Omega
    J = medium.J

    def at(t: float) -> tuple[float, float]:
        f = f0 + (f1 - f0) * (t / spec.tau)
        root = np.sqrt(1.0 - f * f)
        return J * f / root, J / root

    return at


def _rotation_block(mu: float, angle: float) -> np.ndarray:
    """exp(angle * A) with A the antisymmetric generator of axis (1, 0, mu)."""
    q2 = 1.0 + mu * mu
    q = np.sqrt(q2)
    s = np.sin(angle)
    c = np.cos(angle)
    return np.array([
        [(1.0 + mu * mu * c) / q2, -mu * s / q, mu * (1.0 - c) / q2],
        [mu * s / q, c, -s / q],
        [mu * (1.0 - c) / q2, s / q, (mu * mu + c) / q2],
    ])


def closed_form_propagator(spec: AdiabatSpec, medium: MediumParams,
                           t: float | None = None) -> AffinePropagator:
    """Exact propagator for a noiseless constant-mu sweep.

    The (E, L, C) block is (Omega_end/Omega_start) times an orthogonal
    rotation; D scales by the same gap ratio.  With t given, returns the
    partial propagator from 0 to t.
    """
    if spec.schedule != "constant-mu":
        raise ValueError("closed form requires a constant-mu schedule")
    if not spec.noise.is_zero:
        raise ValueError("closed form requires zero noise")
    geom = adiabat_geometry(spec, medium)
    if t is None:
        fp_end = geom.end
        theta = geom.Theta_total
    else:
        w, _ = constant_mu_schedule(spec, medium)(t)
        fp_end = effective_gap(w, medium)
        f0 = geom.start.omega / geom.start.Omega
        theta = (np.arcsin(fp_end.omega / fp_end.Omega) - np.arcsin(f0)) / geom.mu
    scale = fp_end.Omega / geom.start.Omega
    q = np.sqrt(1.0 + geom.mu ** 2)
    block = scale * _rotation_block(geom.mu, q * theta)
    return AffinePropagator(assemble(block, scale), geom.start, fp_end)


def _schedule_funcs(spec: AdiabatSpec, medium: MediumParams):
    """(omega(t), omegadot(t)) callables for linear and table schedules."""
    if spec.schedule == "linear":
        slope = (spec.omega_end - spec.omega_start) / spec.tau
        return (lambda t: spec.omega_start + slope * t), (lambda t: slope)
    t_k, w_k = spec.schedule
    interp = PchipInterpolator(t_k, w_k)
    deriv = interp.derivative()
    return (lambda t: float(interp(t))), (lambda t: float(deriv(t)))


def _amp_matrix(J: float, w: float, Om: float) -> np.ndarray:
    o2 = Om * Om
    return np.array([
        [J * J / o2, J * w / o2, 0.0],
        [J * w / o2, w * w / o2, 0.0],
        [0.0, 0.0, 1.0],
    ])


def numeric_propagator(spec: AdiabatSpec, medium: MediumParams,
                       t_eval: Sequence[float] | None = None):
    """ODE-integrated propagator for any schedule and noise.

    Constant-mu schedules are integrated in the winding variable Theta;
    other schedules in t.  The scalar level-scaling factor is applied
    exactly as Omega_end/Omega_start.  With t_eval given, returns
    (propagator, [partial propagators at the requested times]).
    """
    J = medium.J
    gp = spec.noise.gamma_p
    ga = spec.noise.gamma_a
    fs = effective_gap(spec.omega_start, medium)
    geom = adiabat_geometry(spec, medium)

    if spec.schedule == "constant-mu":
        mu = geom.mu
        phi0 = float(np.arcsin(fs.omega / fs.Omega))

        def omega_at_theta(th):
            phi = phi0 + mu * th
            return J * np.tan(phi), J / np.cos(phi)

        def rhs(th, y):
            M = y.reshape(3, 3)
            w, Om = omega_at_theta(th)
            G = np.array([[0.0, -mu, 0.0], [mu, 0.0, -1.0], [0.0, 1.0, 0.0]])
            if gp:
                G[1, 1] -= gp * Om
                G[2, 2] -= gp * Om
            if ga:
                G -= ga * (w * w / Om) * _amp_matrix(J, w, Om)
            return (G @ M).ravel()

        span = (0.0, geom.Theta_total)
        if t_eval is not None:
            phis = []
            f0 = fs.omega / fs.Omega
            f1 = geom.end.omega / geom.end.Omega
            for t in t_eval:
                f = f0 + (f1 - f0) * (t / spec.tau)
                phis.append((np.arcsin(f) - phi0) / mu)
            eval_pts = np.asarray(phis)
        else:
            eval_pts = None
    else:
        omega_f, omegadot_f = _schedule_funcs(spec, medium)

        def rhs(t, y):
            M = y.reshape(3, 3)
            w = omega_f(t)
            Om = np.hypot(w, J)
            mu_t = J * omegadot_f(t) / Om ** 3
            G = np.array([
                [0.0, -mu_t * Om, 0.0],
                [mu_t * Om, 0.0, -Om],
                [0.0, Om, 0.0],
            ])
            if gp:
                G[1, 1] -= gp * Om * Om
                G[2, 2] -= gp * Om * Om
            if ga:
                G -= ga * w * w * _amp_matrix(J, w, Om)
            return (G @ M).ravel()

        span = (0.0, spec.tau)
        eval_pts = np.asarray(t_eval, dtype=float) if t_eval is not None else None

    sol = solve_ivp(rhs, span, np.eye(3).ravel(), method="DOP853",
                    rtol=ODE_RTOL, atol=ODE_ATOL, dense_output=eval_pts is not None)
    if not sol.success:
        raise IntegrationFailure(f"adiabat integration failed: {sol.message}")

    def wrap(block_raw: np.ndarray, t: float | None) -> AffinePropagator:
        if t is None:
            fp_end = geom.end
        elif spec.schedule == "constant-mu":
            w, _ = constant_mu_schedule(spec, medium)(t)
            fp_end = effective_gap(w, medium)
        else:
            fp_end = effective_gap(_schedule_funcs(spec, medium)[0](t), medium)
        scale = fp_end.Omega / fs.Omega
        return AffinePropagator(assemble(scale * block_raw, scale), fs, fp_end)

    prop = wrap(sol.y[:, -1].reshape(3, 3), None)
    if eval_pts is None:
        return prop
    partials = [wrap(sol.sol(x).reshape(3, 3), t)
                for x, t in zip(eval_pts, t_eval)]
    return prop, partials


def adiabaticity_delta(prop: AffinePropagator) -> float:
    """Deviation from frictionless energy scaling: 1 - (Om_start/Om_end) U(1,1)."""
    return 1.0 - (prop.field_start.Omega / prop.field_end.Omega) * prop.M[0, 0]


@dataclass(frozen=True)
class FrictionlessSolution:
    """Quantized sweep: winding number l, measure mu_l and duration tau_l."""

    l: int
    mu_l: float
    tau_l: float


def frictionless_family(geometry: AdiabatGeometry, l_max: int
                        ) -> list[FrictionlessSolution]:
    """Quantized (mu_l, tau_l) for winding numbers up to l_max.

    mu_l = ((2 pi l / Phi)^2 - 1)^(-1/2); tau_l = |K| / mu_l, strictly
    increasing in l.
    """
    if geometry.Phi == 0.0:
        raise NoSolution("degenerate sweep: Phi = 0")
    out = []
    for l in range(1, l_max + 1):
        ratio = (2.0 * np.pi * l / geometry.Phi) ** 2 - 1.0
        if ratio <= 0.0:
            continue
        mu_l = ratio ** -0.5
        out.append(FrictionlessSolution(l, mu_l, abs(geometry.K) / mu_l))
    if not out:
        raise NoSolution(f"no frictionless solution up to l = {l_max}")
    return out


@dataclass(frozen=True)
class PhaseNoiseAsymptote:
    """Residual rotation angle and minimum friction from phase noise."""

    alpha: float
    delta_min: float
    delta_min_small_angle: float


def phase_noise_asymptotics(geometry: AdiabatGeometry, medium: MediumParams,
                            gamma_p: float) -> PhaseNoiseAsymptote:
    """Leading-order phase-noise friction floor in the many-revolution limit.

    Valid for omega at the low end << J << omega at the high end.
    """
    if gamma_p < 0:
        raise ValueError("gamma_p must be >= 0")
    hi, lo = geometry.start, geometry.end
    if hi.omega < lo.omega:
        hi, lo = lo, hi
    if hi.omega == 0.0:
        raise DegenerateField("phase-noise asymptote undefined at omega_h = 0")
    J = medium.J
    logfac = np.log((hi.Omega + hi.omega) * (lo.Omega - lo.omega)
                    / ((hi.Omega - hi.omega) * (lo.Omega + lo.omega)))
    alpha = np.pi * gamma_p * J * logfac
    small = (np.pi * gamma_p * J) ** 2 * np.log(hi.omega / J)
    return PhaseNoiseAsymptote(alpha, 1.0 - np.cos(alpha), small)


def amplitude_noise_asymptotics(geometry: AdiabatGeometry, medium: MediumParams,
                                gamma_a: float, l: int) -> float:
    """Leading-order amplitude-noise friction at the l-th quantized duration.

    delta = 1 - exp(-gamma_a J^2 omega_hi^2 / (3 Omega_lo^2) * tau_l);
    accurate when the gap varies little across the sweep.
    """
    if gamma_a < 0:
        raise ValueError("gamma_a must be >= 0")
    sols = frictionless_family(geometry, l)
    tau_l = {s.l: s.tau_l for s in sols}.get(l)
    if tau_l is None:
        raise NoSolution(f"no quantized solution with l = {l}")
    hi, lo = geometry.start, geometry.end
    if hi.omega < lo.omega:
        hi, lo = lo, hi
    J = medium.J
    rate = gamma_a * J * J * hi.omega ** 2 / (3.0 * lo.Omega ** 2)
    return 1.0 - np.exp(-rate * tau_l)


def perturbed_mu_schedule(geometry: AdiabatGeometry, g: Callable[[float], float],
                          mu1: float, n_grid: int = 2001) -> AdiabatSpec:
    """Table schedule realizing mu(t) = mu0 + mu1 g(t) with zero-mean g.

    Uses f(t) = f_start + J * integral of mu, the exact quadrature relation
    between the measure and the normalized field.
    """
    tau = geometry.K / geometry.mu
    t = np.linspace(0.0, tau, n_grid)
    gv = np.array([g(x) for x in t])
    g_int = np.concatenate(([0.0], np.cumsum((gv[1:] + gv[:-1]) * 0.5 * np.diff(t))))
    if abs(g_int[-1]) > 1e-8 * tau * max(1.0, np.abs(gv).max()):
        raise ValueError("perturbation g must integrate to zero over [0, tau]")
    J = np.sqrt(geometry.start.Omega ** 2 - geometry.start.omega ** 2)
    f0 = geometry.start.omega / geometry.start.Omega
    f = f0 + J * (geometry.mu * t + mu1 * g_int)
    if np.any(f < 0.0) or np.any(f >= 1.0):
        raise ScheduleInfeasible("perturbed schedule leaves omega in [0, inf)")
    omega = J * f / np.sqrt(1.0 - f * f)
    return AdiabatSpec(omega[0], omega[-1], tau, schedule=(t, omega))


def constant_mu_optimality_check(geometry: AdiabatGeometry, medium: MediumParams,
                                 g: Callable[[float], float], mu1: float
                                 ) -> tuple[float, float]:
    """(delta_const, delta_perturbed) for mu(t) = mu0 + mu1 g(t).

    At quantized durations delta_const = 0 and any zero-mean perturbation
    can only increase the friction, quadratically in mu1.
    """
    if abs(mu1) > 0.1 * abs(geometry.mu) + 1e-300:
        raise ValueError("perturbation amplitude must satisfy |mu1| <= 0.1 |mu0|")
    tau = geometry.K / geometry.mu
    base = AdiabatSpec(geometry.start.omega, geometry.end.omega, tau)
    delta_const = adiabaticity_delta(numeric_propagator(base, medium))
    if mu1 == 0.0:
        return delta_const, delta_const
    spec = perturbed_mu_schedule(geometry, g, mu1)
    delta_pert = adiabaticity_delta(numeric_propagator(spec, medium))
    return delta_const, delta_pert
