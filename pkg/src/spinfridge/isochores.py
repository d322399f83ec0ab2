"""Constant-field bath-contact segments.

With the field held fixed, the Lindblad contact with a thermal bath relaxes
the energy exponentially toward its equilibrium value at rate
Gamma = kappa+ + kappa-, while the extreme-level coherences (L, C) rotate
at the gap frequency Omega and damp at Gamma plus any bath-induced
dephasing gamma_b * Omega^2.  The doublet imbalance D relaxes at 2*Gamma
toward its equilibrium E_eq^2 / Omega, driven by the instantaneous energy.
All of this is linear, so the segment propagator is affine and available
in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationFailure
from .medium import Bath, FieldPoint, MediumParams, ObservableState, \
    effective_gap, equilibrium_energy
from .propagator import AffinePropagator


@dataclass(frozen=True)
class IsochoreSpec:
    """Bath contact at fixed field omega for a duration tau."""

    omega: float
    tau: float
    bath: Bath

    def __post_init__(self):
        if not self.tau >= 0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")


def isochore_propagator(spec: IsochoreSpec, medium: MediumParams,
                        t: float | None = None) -> AffinePropagator:
    """Closed-form affine propagator for a fixed-field bath contact.

    With t given, returns the partial propagator from 0 to t <= tau.
    """
    tau = spec.tau if t is None else float(t)
    if tau < 0 or tau > spec.tau * (1 + 1e-12):
        raise ValueError(f"t must lie in [0, tau], got {t}")
    fp = effective_gap(spec.omega, medium)
    Om = fp.Omega
    G = spec.bath.Gamma
    e_eq = equilibrium_energy(fp, spec.bath.T)

    a = np.exp(-G * tau)
    damp = np.exp(-(G + medium.gamma_b * Om * Om) * tau)
    c, s = np.cos(Om * tau), np.sin(Om * tau)

    M = np.zeros((5, 5))
    M[0, 0] = a
    M[0, 4] = (1.0 - a) * e_eq
    M[1, 1] = damp * c
    M[1, 2] = -damp * s
    M[2, 1] = damp * s
    M[2, 2] = damp * c
    M[3, 3] = a * a
    M[3, 0] = (2.0 * e_eq / Om) * (a - a * a)
    M[3, 4] = (e_eq * e_eq / Om) * (1.0 - a) ** 2
    M[4, 4] = 1.0
    return AffinePropagator(M, fp, fp)


def isochore_oracle(spec: IsochoreSpec, medium: MediumParams,
                    state: ObservableState) -> ObservableState:
    """Direct ODE integration of the bath-contact equations of motion.

    Independent check of isochore_propagator: integrates

        dE/dt = -Gamma (E - E_eq)
        dL/dt = -Omega C - (Gamma + gamma_b Omega^2) L
        dC/dt = +Omega L - (Gamma + gamma_b Omega^2) C
        dD/dt = -2 Gamma D + 2 Gamma (E_eq/Omega) E

    The D equation follows from the four-level ladder picture (bath-driven
    transitions between adjacent levels at rates kappa+-) and preserves
    positivity of the reconstructed density matrix.
    """
    fp = effective_gap(spec.omega, medium)
    Om = fp.Omega
    G = spec.bath.Gamma
    e_eq = equilibrium_energy(fp, spec.bath.T)
    gd = G + medium.gamma_b * Om * Om

    def rhs(_, y):
        E, L, C, D = y
        return [
            -G * (E - e_eq),
            -Om * C - gd * L,
            Om * L - gd * C,
            -2.0 * G * D + 2.0 * G * (e_eq / Om) * E,
        ]

    sol = solve_ivp(rhs, (0.0, spec.tau), [state.E, state.L, state.C, state.D],
                    method="DOP853", rtol=1e-12, atol=1e-14)
    if not sol.success:
        raise IntegrationFailure(f"isochore integration failed: {sol.message}")
    E, L, C, D = sol.y[:, -1]
    return ObservableState(E, L, C, D, fp)
