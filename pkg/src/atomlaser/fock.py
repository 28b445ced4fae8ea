"""Truncated Fock-space machinery for the two coupled bosonic modes.

States are plain complex amplitude vectors over number states.  The two-mode
index convention is ``flat = n_b * (n_max + 1) + n_a`` with the light
occupation ``n_a`` fastest-varying.  Every constructor returns a unit-norm
state and carries truncation diagnostics (top-decile tail mass, projection
norm deficit) so that downstream consumers can scale tolerances by the
truncation quality instead of guessing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

DEFAULT_TAIL_THRESHOLD = 1e-10
DEFAULT_DEFICIT_THRESHOLD = 1e-8


class TruncationError(RuntimeError):
    """The requested state does not fit the truncated basis to the required accuracy."""


@dataclass(frozen=True)
class Truncation:
    """Highest Fock occupation retained per mode."""

    n_max: int

    def __post_init__(self) -> None:
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def dim(self) -> int:
        return self.n_max + 1

    @property
    def two_mode_dim(self) -> int:
        return self.dim * self.dim

    @classmethod
    def suggest(cls, inp: "SqueezedInput") -> "Truncation":
        """Heuristic cutoff ceil(4 (|m| e^r + e^r)^2 + 20) for a squeezed-coherent input.

        Squeezing inflates the occupation scale by e^(2r).  This is a starting
        point only; the tail-mass and norm-deficit checks in the constructors
        are the authoritative acceptance of a truncation.  Squeezed states have
        heavy (geometric) number tails, so high-accuracy work typically needs
        more than this estimate suggests.
        """
        amp = (abs(inp.m) + 1.0) * math.exp(inp.r)
        return cls(int(math.ceil(4.0 * amp * amp + 20.0)))


@dataclass(frozen=True)
class SqueezedInput:
    """Squeezed-coherent preparation of the initial light mode.

    The state is built as squeeze-after-displacement, S D(m)|0>, with

        S = exp[(r/2) (e^{-2i phi} adag^2  -  e^{2i phi} a^2)]

    so that the Bogoliubov factors are cosh(r) / sinh(r):  adag a has mean
    sinh(r)^2 for m = 0 and <a^2> = +e^{-2i phi} sinh(r) cosh(r).  r = 0 with
    any phi reduces exactly to the coherent state |m>.
    """

    r: float
    phi: float = 0.0
    m: complex = 0j

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError(f"squeeze magnitude r must be >= 0, got {self.r}")


@dataclass(frozen=True)
class ModeVector:
    """Unit-norm single-mode state plus truncation diagnostics."""

    amplitudes: np.ndarray
    truncation: Truncation
    tail_mass: float = 0.0      # probability in the top 10% of retained indices
    norm_deficit: float = 0.0   # probability lost projecting into this basis

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class TwoModeState:
    """Unit-norm two-mode state over the flat (n_b, n_a) grid."""

    amplitudes: np.ndarray
    truncation: Truncation
    tail_mass: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def grid(self) -> np.ndarray:
        """Amplitudes reshaped to [n_b, n_a]."""
        d = self.truncation.dim
        return self.amplitudes.reshape(d, d)


@dataclass(frozen=True)
class MomentSet:
    """The mode moments <c>, <c^2>, <c†c>, <(c†c)^2> needed by every observable."""

    mean_amp: complex
    sq_amp: complex
    number_mean: float
    number_sq: float

    @property
    def number_var(self) -> float:
        return self.number_sq - self.number_mean**2

    @classmethod
    def vacuum(cls) -> "MomentSet":
        return cls(0j, 0j, 0.0, 0.0)


def top_decile_mass(amplitudes: np.ndarray) -> float:
    """Probability carried by the top 10% of basis indices (tail diagnostic)."""
    k = max(1, math.ceil(0.1 * len(amplitudes)))
    return float(np.sum(np.abs(amplitudes[-k:]) ** 2))


def ladder_matrix(truncation: Truncation) -> np.ndarray:
    """Annihilation operator: entries sqrt(n) at the (n-1, n) positions.

    The creation operator is the conjugate transpose.  In the truncated basis
    a adag - adag a equals the identity except for the bottom-right corner
    entry, which is -n_max.
    """
    return np.diag(np.sqrt(np.arange(1.0, truncation.dim)), k=1).astype(complex)


def coherent_state(
    m: complex,
    truncation: Truncation,
    tail_threshold: float = DEFAULT_TAIL_THRESHOLD,
) -> ModeVector:
    """Coherent state |m> via the stable ratio recursion c_n = c_{n-1} m / sqrt(n).

    The recursion avoids explicit factorials, so large cutoffs do not
    overflow.  Raises TruncationError when the top-decile tail mass exceeds
    ``tail_threshold`` (the basis cannot hold the state).
    """
    amps = np.empty(truncation.dim, dtype=complex)
    amps[0] = 1.0
    for n in range(1, truncation.dim):
        amps[n] = amps[n - 1] * (m / math.sqrt(n))
    amps /= np.linalg.norm(amps)
    tail = top_decile_mass(amps)
    if tail > tail_threshold:
        raise TruncationError(
            f"coherent state with |m|={abs(m):.4g} does not fit n_max="
            f"{truncation.n_max}: top-decile mass {tail:.3e} exceeds "
            f"{tail_threshold:.1e}"
        )
    return ModeVector(amps, truncation, tail_mass=tail)


def squeezed_coherent_state(
    inp: SqueezedInput,
    truncation: Truncation,
    deficit_threshold: float = DEFAULT_DEFICIT_THRESHOLD,
    tail_threshold: float = DEFAULT_TAIL_THRESHOLD,
) -> ModeVector:
    """Numerically squeeze the coherent state |m> and project to ``truncation``.

    The generator kappa adag^2 - kappa* a^2, kappa = (r/2) e^{-2i phi},
    couples n to n +/- 2 and leaks population past any fixed cutoff, so it is
    exponentiated at the working cutoff 2 n_max and the result projected back
    and renormalised.  The projection loss is the accuracy contract: a norm
    deficit above ``deficit_threshold`` raises TruncationError.
    """
    working = Truncation(2 * truncation.n_max)
    coh = coherent_state(inp.m, working, tail_threshold=tail_threshold)
    if inp.r == 0.0:
        full = coh.amplitudes
    else:
        a = ladder_matrix(working)
        adag = a.conj().T
        kappa = 0.5 * inp.r * np.exp(-2j * inp.phi)
        generator = kappa * (adag @ adag) - np.conj(kappa) * (a @ a)
        full = expm(generator) @ coh.amplitudes
    proj = full[: truncation.dim]
    kept = float(np.sum(np.abs(proj) ** 2))
    deficit = max(0.0, 1.0 - kept)
    if deficit > deficit_threshold:
        raise TruncationError(
            f"squeezed state (r={inp.r:.4g}, |m|={abs(inp.m):.4g}) does not fit "
            f"n_max={truncation.n_max}: norm deficit {deficit:.3e} exceeds "
            f"{deficit_threshold:.1e}"
        )
    amps = proj / math.sqrt(kept)
    return ModeVector(
        amps, truncation, tail_mass=top_decile_mass(amps), norm_deficit=deficit
    )


def tensor_product(b_state: ModeVector, a_state: ModeVector) -> TwoModeState:
    """Product state with amplitudes[(n_b, n_a)] = b[n_b] * a[n_a]."""
    if b_state.truncation != a_state.truncation:
        raise ValueError(
            f"truncation mismatch: {b_state.truncation.n_max} != "
            f"{a_state.truncation.n_max}"
        )
    amps = np.outer(b_state.amplitudes, a_state.amplitudes).ravel()
    tail = 1.0 - (1.0 - b_state.tail_mass) * (1.0 - a_state.tail_mass)
    return TwoModeState(amps, b_state.truncation, tail_mass=tail)


def _moments_last_axis(psi: np.ndarray) -> MomentSet:
    # psi[..., n] with n the occupation of the target mode; number moments are
    # plain probability sums, amplitude moments single shifted contractions.
    d = psi.shape[-1]
    n = np.arange(d)
    prob = np.abs(psi) ** 2
    number_mean = float(np.sum(prob * n))
    number_sq = float(np.sum(prob * n * n))
    mean_amp = complex(np.sum(np.conj(psi[..., :-1]) * np.sqrt(n[1:]) * psi[..., 1:]))
    sq_amp = complex(
        np.sum(np.conj(psi[..., :-2]) * np.sqrt(n[2:] * (n[2:] - 1.0)) * psi[..., 2:])
    )
    return MomentSet(mean_amp, sq_amp, number_mean, number_sq)


def extract_moments(state: TwoModeState, mode: str) -> MomentSet:
    """Moments of one mode of a two-mode state by direct summation over amplitudes."""
    if mode == "a":
        psi = state.grid()
    elif mode == "b":
        psi = state.grid().T
    else:
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    return _moments_last_axis(psi)


def mode_moments(vec: ModeVector) -> MomentSet:
    """Moments of a single-mode state."""
    return _moments_last_axis(vec.amplitudes)
