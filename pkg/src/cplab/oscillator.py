"""Assembly of the coupled quadratic forms and exact ground-state energies.

A dipole at position ``x`` couples linearly to the lattice field through a
dense ``3 x 4N`` block; the full quadratic form is the free diagonal (trap
frequencies and photon dispersions) plus those off-diagonal blocks.  The
ground energy is the zero-point trace formula

    E = 0.5 * (sum sqrt(eigenvalues) - sum sqrt(free diagonal)) + shift,

with shift ``1.5 e nu`` per particle, evaluated by a full symmetric
eigendecomposition.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidParameterError, NotPositiveSemidefiniteError
from .model import (ChargeProfile, Geometry, Lattice, ModelParams,
                    polarization_basis)

__all__ = [
    "CouplingMatrix", "QuadraticForm", "EnergyResult",
    "LatticePeriodicityWarning", "build_coupling", "assemble_one_electron",
    "assemble_two_electron", "direct_coupling", "ground_energy",
    "binding_energy_exact",
]

#: clamp window for eigenvalues that are negative by roundoff only
CLAMP_REL = 1e-10
#: enforced relative symmetry of assembled forms
SYMMETRY_REL = 1e-14


class LatticePeriodicityWarning(UserWarning):
    """Separation is commensurate with the box; energies are periodic in R."""


@dataclass(frozen=True)
class CouplingMatrix:
    """Dense dipole-field coupling block.

    ``entries[i, 4*n + (c-1)]`` is the i-th component of the polarization
    vector of mode ``n`` in channel ``c`` times that mode's form factor at
    the dipole position ``x``.  Sine channels (3, 4) vanish at ``x = 0``.
    """

    x: np.ndarray
    entries: np.ndarray


@dataclass
class QuadraticForm:
    """Assembled symmetric form with its free diagonal and metadata."""

    dim: int
    omega0_diag: np.ndarray
    omega: np.ndarray
    zero_point_shift: float
    params: ModelParams
    lattice: Lattice
    geometry: Optional[Geometry] = None
    include_direct_term: bool = False


@dataclass(frozen=True)
class EnergyResult:
    """Ground energy together with eigenvalue diagnostics."""

    energy: float
    min_eigenvalue: float
    trace_difference: float
    zero_point_shift: float
    n_eigenvalues: int
    n_clamped: int


def build_coupling(x, lattice: Lattice, profile: ChargeProfile,
                   rotation_angles: Optional[np.ndarray] = None
                   ) -> CouplingMatrix:
    """Assemble the ``3 x 4N`` coupling block at dipole position ``x``.

    Channel layout per mode: (cos, eps1), (cos, eps2), (sin, eps1),
    (sin, eps2).
    """
    x = np.asarray(x, dtype=float)
    eps1, eps2 = polarization_basis(lattice.points, rotation_angles)
    scale = (math.sqrt(lattice.cell_weight) * lattice.norms
             * profile.radial(lattice.norms))
    phase = lattice.points @ x
    cos, sin = np.cos(phase), np.sin(phase)
    n = lattice.count
    entries = np.zeros((3, 4 * n))
    entries[:, 0::4] = (eps1 * (scale * cos)[:, None]).T
    entries[:, 1::4] = (eps2 * (scale * cos)[:, None]).T
    entries[:, 2::4] = (eps1 * (scale * sin)[:, None]).T
    entries[:, 3::4] = (eps2 * (scale * sin)[:, None]).T
    return CouplingMatrix(x=x, entries=entries)


def _photon_diag(lattice: Lattice) -> np.ndarray:
    return np.repeat(lattice.norms ** 2, 4)


def assemble_one_electron(params: ModelParams, lattice: Lattice,
                          profile: ChargeProfile, shift=None,
                          rotation_angles: Optional[np.ndarray] = None,
                          coupling_scale: float = 1.0) -> QuadraticForm:
    """One-dipole form of dimension ``3 + 4N``.

    ``shift`` moves the dipole position used in the coupling block; the
    spectrum is invariant under it, and the canonical choice is the origin.
    ``coupling_scale`` multiplies the off-diagonal block only (used by
    perturbative cross-checks).
    """
    x = np.zeros(3) if shift is None else np.asarray(shift, dtype=float)
    n = lattice.count
    dim = 3 + 4 * n
    diag = np.empty(dim)
    diag[:3] = (params.e * params.nu) ** 2
    diag[3:] = _photon_diag(lattice)
    omega = np.diag(diag)
    block = (coupling_scale * params.e
             * build_coupling(x, lattice, profile, rotation_angles).entries)
    omega[:3, 3:] = block
    omega[3:, :3] = block.T
    return QuadraticForm(dim=dim, omega0_diag=diag, omega=omega,
                         zero_point_shift=1.5 * params.e * params.nu,
                         params=params, lattice=lattice)


def direct_coupling(params: ModelParams, lattice: Lattice,
                    profile: ChargeProfile, geometry: Geometry) -> float:
    """Strength of the dropped dipole-dipole contact term.

    ``gamma(R) = e**2 * cell_weight * sum_k f(|k|)**2 cos(k . r)`` summed
    over the full cutoff box including the origin cell: the contact term is
    a plain quadrature of its defining continuum integral, not a field
    mode, and dropping the origin cell would leave a spurious
    R-independent offset.  Decays faster than any power of ``R`` for
    rapidly decreasing profiles while ``R`` stays below half the box.
    """
    f = profile.radial(lattice.norms)
    cos = np.cos(lattice.points @ geometry.r)
    origin = float(profile.radial(0.0)) ** 2
    return (params.e ** 2 * lattice.cell_weight
            * (origin + float(np.sum(f * f * cos))))


def assemble_two_electron(params: ModelParams, lattice: Lattice,
                          profile: ChargeProfile, geometry: Geometry,
                          include_direct_term: bool = False,
                          rotation_angles: Optional[np.ndarray] = None,
                          coupling_scale: float = 1.0) -> QuadraticForm:
    """Two-dipole form of dimension ``6 + 4N``.

    The first dipole couples at the origin, the second at ``r = R n_hat``.
    The particle-particle block is zero unless ``include_direct_term`` is
    set, in which case it carries ``gamma(R)`` times the identity.
    """
    n = lattice.count
    dim = 6 + 4 * n
    diag = np.empty(dim)
    diag[:6] = (params.e * params.nu) ** 2
    diag[6:] = _photon_diag(lattice)
    omega = np.diag(diag)
    b1 = (coupling_scale * params.e
          * build_coupling(np.zeros(3), lattice, profile,
                           rotation_angles).entries)
    b2 = (coupling_scale * params.e
          * build_coupling(geometry.r, lattice, profile,
                           rotation_angles).entries)
    omega[0:3, 6:] = b1
    omega[6:, 0:3] = b1.T
    omega[3:6, 6:] = b2
    omega[6:, 3:6] = b2.T
    if include_direct_term:
        g = direct_coupling(params, lattice, profile, geometry)
        omega[0:3, 3:6] = g * np.eye(3)
        omega[3:6, 0:3] = g * np.eye(3)
    return QuadraticForm(dim=dim, omega0_diag=diag, omega=omega,
                         zero_point_shift=3.0 * params.e * params.nu,
                         params=params, lattice=lattice, geometry=geometry,
                         include_direct_term=include_direct_term)


def ground_energy(form: QuadraticForm) -> EnergyResult:
    """Exact ground energy of an assembled form.

    Eigenvalues in ``[-1e-10 * norm, 0)`` are clamped to zero (roundoff);
    anything lower raises ``NotPositiveSemidefiniteError``, signalling a
    genuine violation of the positivity hypotheses.
    """
    omega = form.omega
    asym = np.max(np.abs(omega - omega.T))
    scale = np.max(np.abs(omega))
    if asym > SYMMETRY_REL * scale:
        raise InvalidParameterError(
            f"form is not symmetric: asymmetry {asym:.3e} vs scale {scale:.3e}")
    sym = 0.5 * (omega + omega.T)
    eigs = np.linalg.eigvalsh(sym)
    norm = max(abs(eigs[0]), abs(eigs[-1]))
    floor = -CLAMP_REL * norm
    min_eig = float(eigs[0])
    if eigs[0] < floor:
        raise NotPositiveSemidefiniteError(
            f"eigenvalue {eigs[0]:.6e} below the roundoff floor {floor:.6e}; "
            "positivity hypotheses violated")
    clamped = int(np.sum(eigs < 0.0))
    eigs = np.clip(eigs, 0.0, None)
    # ascending pairing of perturbed and free square roots, compensated sum
    diffs = np.sqrt(np.sort(eigs)) - np.sqrt(np.sort(form.omega0_diag))
    trace_difference = 0.5 * math.fsum(diffs)
    return EnergyResult(
        energy=trace_difference + form.zero_point_shift,
        min_eigenvalue=min_eig, trace_difference=trace_difference,
        zero_point_shift=form.zero_point_shift,
        n_eigenvalues=form.dim, n_clamped=clamped)


def binding_energy_exact(params: ModelParams, lattice: Lattice,
                         profile: ChargeProfile, R: float,
                         include_direct_term: bool = False) -> float:
    """Exact binding ``2 E - E(R)`` from two eigendecompositions.

    Positive values mean attraction.  The zero-point shifts cancel exactly.
    A warning is issued for ``R >= L / 2``: lattice momenta are multiples of
    ``2 pi / L``, so the two-dipole energy is periodic in ``R`` with period
    ``L`` and large separations are not meaningful on a finite box.
    """
    if R >= lattice.box_period / 2.0:
        warnings.warn(
            f"R = {R} is not below half the box period L = "
            f"{lattice.box_period}; the binding energy is periodic in R",
            LatticePeriodicityWarning, stacklevel=2)
    one = ground_energy(assemble_one_electron(params, lattice, profile))
    two = ground_energy(assemble_two_electron(
        params, lattice, profile, Geometry(R),
        include_direct_term=include_direct_term))
    return 2.0 * one.energy - two.energy
