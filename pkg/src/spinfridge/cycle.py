"""Four-stroke refrigeration cycle: compose segments, find the limit cycle.

One cycle runs hot isochore -> demagnetization -> cold isochore ->
magnetization, with corners labelled

    A  start of the hot isochore (field omega_h)
    B  start of the demagnetization sweep
    C  start of the cold isochore (field omega_c)
    D  start of the magnetization sweep

Heat flows are read off the energy changes along the bath contacts:
Q_h = E(B) - E(A) (negative for a refrigerator: heat rejected to the hot
bath) and Q_c = E(D) - E(C) (positive: heat extracted from the cold bath).
Because every segment propagator is affine, the limit cycle is the unique
fixed point of a 4x4 linear map plus offset and is obtained by a direct
linear solve rather than by iterating the cycle to convergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .adiabats import AdiabatSpec, NoiseParams, adiabaticity_delta, \
    closed_form_propagator, numeric_propagator
from .errors import NoUniqueLimitCycle
from .isochores import IsochoreSpec, isochore_propagator
from .medium import Bath, MediumParams, ObservableState, effective_gap, \
    equilibrium_energy
from .propagator import AffinePropagator

# eigenvalue margin below which the cycle map counts as non-contractive
UNIT_CIRCLE_TOL = 1e-12


@dataclass(frozen=True)
class CycleSpec:
    """Full cycle definition: fields, baths, stroke durations, noise.

    tau_hc is the demagnetization (hot -> cold) duration and tau_ch the
    magnetization (cold -> hot) duration.  propagator selects how the
    field sweeps are propagated: "auto" uses the closed form whenever the
    schedule is constant-mu and noiseless, "numeric" always integrates.
    """

    omega_c: float
    omega_h: float
    hot: Bath
    cold: Bath
    tau_h: float
    tau_hc: float
    tau_c: float
    tau_ch: float
    schedule: object = "constant-mu"
    noise: NoiseParams = field(default_factory=NoiseParams)
    propagator: str = "auto"

    def __post_init__(self):
        if not 0 <= self.omega_c < self.omega_h:
            raise ValueError("require 0 <= omega_c < omega_h")
        if self.propagator not in ("auto", "numeric"):
            raise ValueError(f"unknown propagator mode {self.propagator!r}")
        for name in ("tau_h", "tau_hc", "tau_c", "tau_ch"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")

    def segments(self, medium: MediumParams) -> dict[str, object]:
        return {
            "hot": IsochoreSpec(self.omega_h, self.tau_h, self.hot),
            "demag": AdiabatSpec(self.omega_h, self.omega_c, self.tau_hc,
                                 schedule=self.schedule, noise=self.noise),
            "cold": IsochoreSpec(self.omega_c, self.tau_c, self.cold),
            "mag": AdiabatSpec(self.omega_c, self.omega_h, self.tau_ch,
                               schedule=self.schedule, noise=self.noise),
        }


def adiabat_propagator(spec: AdiabatSpec, medium: MediumParams,
                       mode: str = "auto") -> AffinePropagator:
    """Sweep propagator: closed form when exact, ODE integration otherwise."""
    if mode == "auto" and spec.schedule == "constant-mu" and spec.noise.is_zero:
        return closed_form_propagator(spec, medium)
    return numeric_propagator(spec, medium)


def segment_propagators(spec: CycleSpec, medium: MediumParams
                        ) -> dict[str, AffinePropagator]:
    """Propagators of the four strokes, keyed hot/demag/cold/mag."""
    segs = spec.segments(medium)
    return {
        "hot": isochore_propagator(segs["hot"], medium),
        "demag": adiabat_propagator(segs["demag"], medium, spec.propagator),
        "cold": isochore_propagator(segs["cold"], medium),
        "mag": adiabat_propagator(segs["mag"], medium, spec.propagator),
    }


def cycle_propagator(spec: CycleSpec, medium: MediumParams) -> AffinePropagator:
    """One-cycle map at corner A (start of the hot isochore)."""
    p = segment_propagators(spec, medium)
    return p["mag"].after(p["cold"]).after(p["demag"]).after(p["hot"])


@dataclass(frozen=True)
class CycleMetrics:
    """Per-cycle heats, work and entropy production at the limit cycle.

    W is the work input (> 0 when driving refrigeration), cop = Q_c / W,
    and dS_u = -Q_c/T_c - Q_h/T_h the entropy dumped into the universe.
    """

    Q_c: float
    Q_h: float
    W: float
    dS_u: float
    cop: float
    tau_cycle: float
    is_refrigerator: bool
    P_c: float = np.nan
    delta_hc: float = np.nan
    delta_ch: float = np.nan


def limit_cycle(spec: CycleSpec, medium: MediumParams
                ) -> tuple[dict[str, ObservableState], CycleMetrics]:
    """Fixed point of the cycle map and the resulting per-cycle metrics.

    Solves (I - M) x = b for the 4-component state at corner A, checks the
    solve against one application of the cycle map, and raises
    NoUniqueLimitCycle if the linear block has an eigenvalue on the unit
    circle (no bath contact would do this).
    """
    props = segment_propagators(spec, medium)
    cyc = props["mag"].after(props["cold"]).after(props["demag"]).after(props["hot"])
    M = cyc.linear_block
    b = cyc.affine_column
    mods = np.abs(np.linalg.eigvals(M))
    if np.any(mods >= 1.0 - UNIT_CIRCLE_TOL):
        raise NoUniqueLimitCycle(
            f"cycle map eigenvalue modulus {mods.max():.15g} reaches 1"
        )
    x = np.linalg.solve(np.eye(4) - M, b)
    resid = np.abs(M @ x + b - x).max()
    if resid > 1e-8 * max(1.0, np.abs(x).max()):
        raise NoUniqueLimitCycle(f"fixed-point residual {resid:.3e} too large")

    fp_h = effective_gap(spec.omega_h, medium)
    A = ObservableState(*x, fp_h)
    B = props["hot"].apply(A)
    C = props["demag"].apply(B)
    D = props["cold"].apply(C)
    corners = {"A": A, "B": B, "C": C, "D": D}

    q_h = B.E - A.E
    q_c = D.E - C.E
    w = -(q_c + q_h)
    ds_u = -q_c / spec.cold.T - q_h / spec.hot.T
    tau = spec.tau_h + spec.tau_hc + spec.tau_c + spec.tau_ch
    cop = q_c / w if w > 0 else np.nan
    metrics = CycleMetrics(
        q_c, q_h, w, ds_u, cop, tau, bool(q_c > 0 and w > 0),
        P_c=q_c / tau,
        delta_hc=adiabaticity_delta(props["demag"]),
        delta_ch=adiabaticity_delta(props["mag"]))
    return corners, metrics


def q_c_max(spec: CycleSpec, medium: MediumParams, delta: float) -> float:
    """Upper bound on extracted heat per cycle at friction level delta.

    Assumes full thermalization on both isochores; the bound is
    2 Omega_c (exp(-Omega_c/T_c) - exp(-Omega_h/T_h) - delta/2).
    """
    Om_c = effective_gap(spec.omega_c, medium).Omega
    Om_h = effective_gap(spec.omega_h, medium).Omega
    return 2.0 * Om_c * (np.exp(-Om_c / spec.cold.T)
                         - np.exp(-Om_h / spec.hot.T) - 0.5 * delta)


def min_temperature(medium: MediumParams, delta: float) -> float:
    """Coldest bath temperature at which extraction can stay positive.

    With friction floor delta > 0 the bound is J / (-ln(delta/2)); at
    delta = 0 there is no floor and the function returns 0.
    """
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    if delta == 0.0:
        return 0.0
    if delta >= 2.0:
        raise ValueError("delta must be < 2")
    return medium.J / (-np.log(0.5 * delta))


@dataclass(frozen=True)
class ThermoBounds:
    """Compression ratio C = Omega_h/Omega_c and reversibility measure R.

    R = T_c Omega_h / (T_h Omega_c); refrigeration at full thermalization
    requires R > 1.
    """

    compression: float
    reversibility: float


def thermo_bounds(spec: CycleSpec, medium: MediumParams) -> ThermoBounds:
    Om_c = effective_gap(spec.omega_c, medium).Omega
    Om_h = effective_gap(spec.omega_h, medium).Omega
    comp = Om_h / Om_c
    return ThermoBounds(comp, comp * spec.cold.T / spec.hot.T)


def cycle_trajectory(spec: CycleSpec, medium: MediumParams,
                     n_per_segment: int = 200
                     ) -> tuple[np.ndarray, list[ObservableState], np.ndarray]:
    """(times, states, segment boundaries) along one traversal of the limit
    cycle, starting from corner A."""
    corners, _ = limit_cycle(spec, medium)
    segs = spec.segments(medium)
    order = [("hot", corners["A"]), ("demag", corners["B"]),
             ("cold", corners["C"]), ("mag", corners["D"])]
    times: list[float] = []
    states: list[ObservableState] = []
    t0 = 0.0
    bounds = [0.0]
    for name, start in order:
        seg = segs[name]
        local = np.linspace(0.0, seg.tau, n_per_segment, endpoint=False)
        if name in ("hot", "cold"):
            partials = [isochore_propagator(seg, medium, t) for t in local]
        elif spec.propagator == "auto" and spec.schedule == "constant-mu" \
                and spec.noise.is_zero:
            partials = [closed_form_propagator(seg, medium, t) for t in local]
        else:
            _, partials = numeric_propagator(seg, medium, t_eval=local)
        for t, p in zip(local, partials):
            times.append(t0 + t)
            states.append(p.apply(start))
        t0 += seg.tau
        bounds.append(t0)
    times.append(t0)
    states.append(corners["A"])
    return np.asarray(times), states, np.asarray(bounds)
