"""Algebra of the isolated microwave Lambda scheme.

Two nuclear-spin ground states |up>, |down> are each driven to one shared
excited state |-> by a microwave tone. The drive pair defines an orthonormal
dark/bright decomposition of the ground manifold: the dark state carries no
coupling to |-> at two-photon resonance, the bright state carries all of it.
Everything in this module is closed-form spinor algebra; no time evolution
happens here (see :mod:`lambda_cpt.dynamics` for that).

Units: Rabi frequencies and detunings are linear frequencies in MHz, angles
in rad. Factors of 2*pi appear only in the dynamics engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LambdaConfig",
    "LambdaBasis",
    "BranchingRates",
    "dark_bright_basis",
    "polarization_efficiency",
    "branching_rates",
    "dark_precession_overlap",
]


@dataclass(frozen=True)
class LambdaConfig:
    """Drive and mixing parameters of one Lambda scheme.

    Parameters
    ----------
    omega_1, omega_2:
        Rabi frequencies of the two branches (MHz, linear frequency).
        Branch 1 couples |up> <-> |->, branch 2 couples |down> <-> |->.
    delta_1, delta_2:
        One-photon detunings of the two tones (MHz).
    psi:
        Relative phase between the two microwave tones (rad).
    theta:
        Nuclear mixing angle of the excited-state spinor (rad).
    phi:
        Hyperfine azimuthal phase (rad).
    """

    omega_1: float
    omega_2: float
    delta_1: float = 0.0
    delta_2: float = 0.0
    psi: float = 0.0
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self) -> None:
        if self.omega_1 < 0 or self.omega_2 < 0:
            raise ValueError("Rabi frequencies must be nonnegative")
        if self.omega_1 == 0 and self.omega_2 == 0:
            raise ValueError("at least one Rabi frequency must be nonzero")

    @property
    def delta_r(self) -> float:
        """Two-photon detuning delta_1 - delta_2 (MHz)."""
        return self.delta_1 - self.delta_2

    @property
    def omega_eff(self) -> float:
        """Effective Rabi frequency sqrt(omega_1^2 + omega_2^2) (MHz)."""
        return math.hypot(self.omega_1, self.omega_2)


@dataclass(frozen=True)
class LambdaBasis:
    """Dark/bright ground spinors plus the excited state's nuclear spinor.

    All three are 2-component complex vectors over (|up>, |down>). ``dark``
    and ``bright`` are orthonormal; ``excited`` is the nuclear character of
    |-> and is generally not orthogonal to either.
    """

    dark: np.ndarray
    bright: np.ndarray
    excited: np.ndarray


@dataclass(frozen=True)
class BranchingRates:
    """Optical repolarization rate and its dark/bright branching.

    gamma_d + gamma_b = gamma, alpha_p = gamma_d / gamma.
    Rates are in 1/us.
    """

    gamma: float
    gamma_d: float
    gamma_b: float
    alpha_p: float

    def __post_init__(self) -> None:
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if abs(self.gamma_d + self.gamma_b - self.gamma) > 1e-12 * self.gamma:
            raise ValueError("gamma_d + gamma_b must equal gamma")
        if not -1e-12 <= self.alpha_p <= 1 + 1e-12:
            raise ValueError("alpha_p must lie in [0, 1]")


def dark_bright_basis(cfg: LambdaConfig) -> LambdaBasis:
    """Build the dark/bright decomposition for a drive configuration.

    dark   = (omega_2 e^{-i psi} |up> - omega_1 |down>) / N
    bright = (omega_1 |up> + omega_2 e^{+i psi} |down>) / N

    with N = sqrt(omega_1^2 + omega_2^2). The |down> coefficient of the dark
    state is pinned real and negative, which fixes the global phases. The
    bright phase is the conjugate of the dark one; that is what makes the
    pair orthonormal for every psi and the bright-branch coupling to |->
    real.

    The excited spinor is -sin(theta/2) e^{-i phi} |up> + cos(theta/2) |down>.

    Raises
    ------
    ValueError
        If both Rabi frequencies vanish (already rejected by LambdaConfig).
    """
    o1, o2 = cfg.omega_1, cfg.omega_2
    norm = math.hypot(o1, o2)
    phase = np.exp(-1j * cfg.psi)
    dark = np.array([o2 * phase, -o1], dtype=complex) / norm
    bright = np.array([o1, o2 * np.conj(phase)], dtype=complex) / norm
    half = cfg.theta / 2.0
    excited = np.array(
        [-math.sin(half) * np.exp(-1j * cfg.phi), math.cos(half)], dtype=complex
    )
    return LambdaBasis(dark=dark, bright=bright, excited=excited)


def polarization_efficiency(cfg: LambdaConfig) -> float:
    """Probability alpha_p that a decay from |-> lands in the dark state.

    Closed form (written with the Rabi pair rather than the ratio r =
    omega_1/omega_2, so the omega_2 = 0 limit needs no special casing):

        alpha_p = [o2^2 sin^2(theta/2) + o1^2 cos^2(theta/2)
                   + o1 o2 sin(theta) cos(phi - psi)] / (o1^2 + o2^2)

    which equals |<-|D>|^2 for the spinors of :func:`dark_bright_basis`.
    """
    o1, o2 = cfg.omega_1, cfg.omega_2
    half = cfg.theta / 2.0
    s2, c2 = math.sin(half) ** 2, math.cos(half) ** 2
    cross = o1 * o2 * math.sin(cfg.theta) * math.cos(cfg.phi - cfg.psi)
    return (o2 * o2 * s2 + o1 * o1 * c2 + cross) / (o1 * o1 + o2 * o2)


def branching_rates(gamma: float, cfg: LambdaConfig) -> BranchingRates:
    """Split an optical polarization rate into dark/bright decay channels."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    ap = polarization_efficiency(cfg)
    return BranchingRates(gamma=gamma, gamma_d=gamma * ap, gamma_b=gamma * (1.0 - ap), alpha_p=ap)


def dark_precession_overlap(t: float, cfg: LambdaConfig) -> float:
    """Survival probability |<D(0)|D(t)>|^2 of a freely precessing dark state.

    Off two-photon resonance the dark state rotates into the bright state at
    the two-photon detuning:

        |<D(0)|D(t)>|^2 = 1 - sin^2(2 beta) sin^2(pi delta_r t)

    with tan(beta) = omega_1/omega_2. The overlap returns to one whenever
    delta_r * t is an integer, which is the phase-locking condition behind
    the equally spaced dark resonances of a pulsed sequence.
    """
    o1, o2 = cfg.omega_1, cfg.omega_2
    sin_2beta = 2.0 * o1 * o2 / (o1 * o1 + o2 * o2)
    return 1.0 - sin_2beta**2 * math.sin(math.pi * cfg.delta_r * t) ** 2
