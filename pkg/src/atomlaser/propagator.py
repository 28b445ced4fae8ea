"""Closed-form Heisenberg-picture solution of the linear light-atom coupling.

The coupled mode operators obey a linear 2x2 system, so the full dynamics is
a unitary transfer matrix acting on (b, a).  At detuning the oscillation runs
at the generalized Rabi frequency I = omega_r / cos(varphi) with detuning
angle varphi fixed by omega0 - omega_a = 2 omega_r tan(varphi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import MomentSet

VACUUM_TOLERANCE = 1e-12


class ResonanceError(ValueError):
    """Operation is only defined at resonance (omega0 == omega_a)."""


@dataclass(frozen=True)
class ModelParams:
    """Reduced two-mode model parameters.

    omega0   level splitting of the atomic transition (rad/time)
    omega_a  optical frequency (rad/time)
    omega_r  collective coupling, single-atom coupling times sqrt(condensate
             number); the slow condensate depletion is not modelled
    theta    condensate phase (rad), enters only off-diagonal phases
    """

    omega0: float
    omega_a: float
    omega_r: float
    theta: float = 0.0

    def __post_init__(self) -> None:
        if self.omega_r <= 0:
            raise ValueError(f"omega_r must be > 0, got {self.omega_r}")

    @property
    def resonant(self) -> bool:
        return self.omega0 == self.omega_a

    @property
    def omega_mean(self) -> float:
        return 0.5 * (self.omega0 + self.omega_a)


@dataclass(frozen=True)
class DetuningGeometry:
    """Detuning angle and generalized Rabi frequency."""

    varphi: float  # omega0 - omega_a = 2 omega_r tan(varphi), in (-pi/2, pi/2)
    big_i: float   # omega_r / cos(varphi) = sqrt(omega_r^2 + ((omega0-omega_a)/2)^2)


@dataclass(frozen=True)
class PropagatorMatrix:
    """Unitary 2x2 transfer matrix for (b, a) plus the overall free phase."""

    entries: np.ndarray
    global_phase: complex
    t: float

    @property
    def matrix(self) -> np.ndarray:
        """The full coefficient matrix including the global phase."""
        return self.global_phase * self.entries


def detuning_geometry(params: ModelParams) -> DetuningGeometry:
    varphi = math.atan2(params.omega0 - params.omega_a, 2.0 * params.omega_r)
    return DetuningGeometry(varphi, params.omega_r / math.cos(varphi))


def propagator_at(params: ModelParams, t: float) -> PropagatorMatrix:
    """Transfer matrix at time t: rows give b(t), a(t) in terms of b(0), a(0).

    entries = [[lam_minus, -i eta e^{-i theta}],
               [-i eta e^{+i theta}, lam_plus]]
    with lam_pm = cos(I t) +/- i sin(varphi) sin(I t), eta = cos(varphi) sin(I t),
    all times the global phase e^{-i (omega0 + omega_a) t / 2}.  At resonance
    this reduces to the plain Rabi rotation cos/sin(omega_r t).
    """
    geo = detuning_geometry(params)
    cos_it = math.cos(geo.big_i * t)
    sin_it = math.sin(geo.big_i * t)
    lam_minus = cos_it - 1j * math.sin(geo.varphi) * sin_it
    lam_plus = cos_it + 1j * math.sin(geo.varphi) * sin_it
    eta = math.cos(geo.varphi) * sin_it
    phase = np.exp(-1j * params.theta)
    entries = np.array(
        [
            [lam_minus, -1j * eta * phase],
            [-1j * eta * np.conj(phase), lam_plus],
        ],
        dtype=complex,
    )
    global_phase = complex(np.exp(-1j * params.omega_mean * t))
    return PropagatorMatrix(entries, global_phase, float(t))


def conversion_times(params: ModelParams, count: int) -> np.ndarray:
    """Times t_n = (n + 1/2) pi / omega_r of complete statistics transfer.

    Complete conversion only happens at resonance; detuned parameters raise
    ResonanceError.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if not params.resonant:
        raise ResonanceError(
            f"complete conversion requires omega0 == omega_a, got "
            f"{params.omega0} != {params.omega_a}"
        )
    return (np.arange(count) + 0.5) * math.pi / params.omega_r


def heisenberg_moment_map(
    u: PropagatorMatrix, initial_a: MomentSet, initial_b: MomentSet
) -> tuple[MomentSet, MomentSet]:
    """Map initial moments through c(t) = alpha b(0) + beta a(0).

    The atom mode must start in vacuum (that is the modelled preparation);
    then every mixed term annihilates and the transformed moments close on
    the four input moments:

        <c>       = beta <a>
        <c^2>     = beta^2 <a^2>
        <c†c>     = |beta|^2 <a†a>
        <(c†c)^2> = |beta|^4 <(a†a)^2> + |alpha|^2 |beta|^2 <a†a>

    Returns the pair (a(t) moments, b(t) moments).  Exact for any unitary
    transfer matrix, resonant or detuned.
    """
    for value in (
        initial_b.mean_amp,
        initial_b.sq_amp,
        initial_b.number_mean,
        initial_b.number_sq,
    ):
        if abs(value) > VACUUM_TOLERANCE:
            raise ValueError(
                "the atom mode must start in vacuum for the closed moment map"
            )
    full = u.matrix

    def transform(alpha: complex, beta: complex) -> MomentSet:
        weight = abs(beta) ** 2
        return MomentSet(
            mean_amp=beta * initial_a.mean_amp,
            sq_amp=beta * beta * initial_a.sq_amp,
            number_mean=weight * initial_a.number_mean,
            number_sq=weight * weight * initial_a.number_sq
            + abs(alpha) ** 2 * weight * initial_a.number_mean,
        )

    b_t = transform(full[0, 0], full[0, 1])
    a_t = transform(full[1, 0], full[1, 1])
    return a_t, b_t
