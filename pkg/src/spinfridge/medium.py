"""Working medium: two coupled spins with an uncontrollable energy gap.

The Hamiltonian is H = omega(t)*B1 + J*B2 where B1 is the collective
z-magnetization and B2 the xx-yy exchange term.  Its spectrum is
(-Omega, 0, 0, +Omega) with Omega = sqrt(omega^2 + J^2), so even at zero
field there is a gap J between the ground and first excited level.

The state is tracked by four expectation values (E, L, C, D) taken in the
instantaneous energy basis:

    E = <H>   energy
    L, C      coherences between the extreme levels (quantum friction)
    D         population imbalance of the middle doublet

All quantities use hbar = k_B = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PhysicalityViolation

# eigenvalue tolerance absorbing integrator round-off
PSD_TOL = 1e-10


@dataclass(frozen=True)
class MediumParams:
    """Coupling strength J (> 0) and bath-isochore dephasing coefficient."""

    J: float
    gamma_b: float = 0.0

    def __post_init__(self):
        if not self.J > 0:
            raise ValueError(f"J must be > 0, got {self.J}")
        if self.gamma_b < 0:
            raise ValueError(f"gamma_b must be >= 0, got {self.gamma_b}")


@dataclass(frozen=True)
class FieldPoint:
    """External field omega and the effective gap Omega = sqrt(omega^2 + J^2)."""

    omega: float
    Omega: float


def effective_gap(omega: float, medium: MediumParams) -> FieldPoint:
    """Gap at external field omega; Omega = J at zero field."""
    if omega < 0:
        raise ValueError(f"omega must be >= 0, got {omega}")
    return FieldPoint(omega, float(np.hypot(omega, medium.J)))


@dataclass(frozen=True)
class Bath:
    """Thermal bath: temperature T and heat conductance Gamma = kappa+ + kappa-."""

    T: float
    Gamma: float

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"bath T must be > 0, got {self.T}")
        if not self.Gamma > 0:
            raise ValueError(f"bath Gamma must be > 0, got {self.Gamma}")

    def kappas(self, Omega: float) -> tuple[float, float]:
        """(kappa+, kappa-) from detailed balance kappa+/kappa- = exp(-Omega/T)."""
        ex = np.exp(-Omega / self.T)
        km = self.Gamma / (1.0 + ex)
        return km * ex, km


@dataclass(frozen=True)
class ObservableState:
    """Cycle state (E, L, C, D) at a given field point."""

    E: float
    L: float
    C: float
    D: float
    at_field: FieldPoint

    def vector(self) -> np.ndarray:
        """Affine column (E, L, C, D, 1)."""
        return np.array([self.E, self.L, self.C, self.D, 1.0])


def equilibrium_energy(fp: FieldPoint, T: float) -> float:
    """Thermal expectation of H over the four levels (-Omega, 0, 0, Omega).

    Equals -Omega*tanh(Omega/2T); safe for Omega/T >> 1 (returns -Omega,
    never NaN).
    """
    if not T > 0:
        raise ValueError(f"T must be > 0, got {T}")
    return -fp.Omega * np.tanh(0.5 * fp.Omega / T)


def thermal_state(fp: FieldPoint, T: float) -> ObservableState:
    """Gibbs state at temperature T: L = C = 0, D = E^2/Omega."""
    e = equilibrium_energy(fp, T)
    return ObservableState(e, 0.0, 0.0, e * e / fp.Omega, fp)


def reconstruct_rho(state: ObservableState) -> np.ndarray:
    """Density matrix in the energy basis ordered (-Omega, 0, 0, +Omega).

    Orthogonal-operator expansion rho = I/4 + sum_O <O> O / tr(O^2); the
    nonzero pattern is the outer 2x2 block plus the diagonal.  Raises
    PhysicalityViolation if any eigenvalue is below -1e-10.
    """
    for name in ("E", "L", "C", "D"):
        if not np.isfinite(getattr(state, name)):
            raise ValueError(f"state.{name} is not finite")
    Om = state.at_field.Omega
    e = state.E / (2.0 * Om)
    d = state.D / (4.0 * Om)
    off = (state.L + 1j * state.C) / (2.0 * Om)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 0.25 - e + d
    rho[1, 1] = 0.25 - d
    rho[2, 2] = 0.25 - d
    rho[3, 3] = 0.25 + e + d
    rho[0, 3] = off
    rho[3, 0] = np.conj(off)
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -PSD_TOL:
        raise PhysicalityViolation(
            f"density matrix eigenvalue {evals.min():.3e} below -{PSD_TOL:g}"
        )
    return rho


def extract_observables(rho: np.ndarray, fp: FieldPoint) -> ObservableState:
    """Inverse of reconstruct_rho: read (E, L, C, D) off a density matrix."""
    Om = fp.Omega
    E = Om * float((rho[3, 3] - rho[0, 0]).real)
    L = Om * float(2.0 * rho[0, 3].real)
    C = Om * float(2.0 * rho[0, 3].imag)
    D = Om * float((rho[0, 0] - rho[1, 1] - rho[2, 2] + rho[3, 3]).real)
    return ObservableState(E, L, C, D, fp)


def _xlogx(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    mask = p > 0.0
    out[mask] = p[mask] * np.log(p[mask])
    return out


def entropies(state: ObservableState) -> tuple[float, float]:
    """(S_vn, S_E): von Neumann and energy-population entropies.

    S_E >= S_vn always, with equality exactly when L = C = 0.
    """
    rho = reconstruct_rho(state)
    evals = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
    diag = np.clip(np.diag(rho).real, 0.0, None)
    s_vn = -float(_xlogx(evals).sum())
    s_e = -float(_xlogx(diag).sum())
    return s_vn, s_e


# Energy-basis operators, used by tests as an independent construction check.
def basis_operators(fp: FieldPoint) -> dict[str, np.ndarray]:
    """The four expansion operators H, L, C, D in the energy basis."""
    Om = fp.Omega
    H = Om * np.diag([-1.0, 0.0, 0.0, 1.0]).astype(complex)
    L = np.zeros((4, 4), dtype=complex)
    L[0, 3] = L[3, 0] = Om
    C = np.zeros((4, 4), dtype=complex)
    C[0, 3] = 1j * Om
    C[3, 0] = -1j * Om
    D = Om * np.diag([1.0, -1.0, -1.0, 1.0]).astype(complex)
    return {"H": H, "L": L, "C": C, "D": D}
