"""Stochastic pure-state noise: dephasing trajectories and imperfect GHZ
preparation.

Dephasing is modelled as a random phase on each ion's |up> amplitude drawn
fresh per trajectory: Gaussian, zero mean, variance ``2*gamma*t``. Averaged
over trajectories this reproduces exponential coherence decay exactly —
``<e^{i phi}> = e^{-gamma t}`` for one ion, and ``e^{-L gamma t}`` for the
relative coherence of an L-ion GHZ state under independent noise, because
the GHZ components accumulate the *sum* of the per-ion phases. In common
mode all ions share one draw, so the GHZ phase variance grows as L^2.

Preparation imperfection is modelled as small coherent admixtures of the
symmetric (fixed-excitation) states into the GHZ state; scanning the Ramsey
fringe of such a state produces a multi-harmonic signal with one component
per excitation number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import NormError
from .register import QubitRegister, excitation_counts

Mode = str  # "independent" | "common"


@dataclass(frozen=True)
class NoiseSpec:
    """Dephasing rate and correlation mode.

    ``gamma`` is the single-ion dephasing rate (1/s). ``independent`` draws
    one phase per ion; ``common`` draws a single phase shared by all ions
    (drive/clock frequency jitter rather than per-ion magnetic noise).
    Stream derivation for trials lives in :mod:`ionramsey.streams`; sampling
    here takes an explicit Generator.
    """

    gamma: float
    mode: Mode = "independent"

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.mode not in ("independent", "common"):
            raise ValueError(f"mode must be 'independent' or 'common', got {self.mode!r}")


def sample_dephasing_phases(
    spec: NoiseSpec, t: float, n_ions: int, rng: np.random.Generator
) -> np.ndarray:
    """One phase per ion for a single free-evolution interval of length t."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    sigma = np.sqrt(2.0 * spec.gamma * t)
    if sigma == 0.0:
        return np.zeros(n_ions)
    if spec.mode == "common":
        return np.full(n_ions, rng.normal(0.0, sigma))
    return rng.normal(0.0, sigma, size=n_ions)


def apply_phase_noise(reg: QubitRegister, phases: np.ndarray) -> QubitRegister:
    """Phase each basis state by the sum of its excited ions' phases."""
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (reg.n_ions,):
        raise ValueError(
            f"need one phase per ion: expected shape ({reg.n_ions},), got {phases.shape}"
        )
    idx = np.arange(reg.dim, dtype=np.int64)
    ion_bits = idx >> (1 if reg.has_bus else 0)
    total = np.zeros(reg.dim)
    for b in range(reg.n_ions):
        # Bit b (counting from the least significant ion bit) is ion L-b.
        total += ((ion_bits >> b) & 1) * phases[reg.n_ions - 1 - b]
    return QubitRegister(reg.n_ions, reg.has_bus, reg.amplitudes * np.exp(1j * total))


@dataclass(frozen=True)
class ImperfectionSpec:
    """Coherent admixtures of fixed-excitation symmetric states.

    ``epsilon`` maps excitation number p (1 <= p <= L-1) to a complex
    amplitude added, unnormalized, onto the symmetric p-excitation state.
    ``phase_jitter`` > 0 adds a uniform random phase in [-jitter, +jitter]
    to each admixture per call, modelling shot-to-shot preparation wobble;
    at the default 0 the perturbation is deterministic.
    """

    epsilon: dict[int, complex] = field(default_factory=dict)
    phase_jitter: float = 0.0

    def __post_init__(self) -> None:
        for p in self.epsilon:
            if p < 1:
                raise ValueError(f"admixture excitation number must be >= 1, got {p}")
        if self.phase_jitter < 0:
            raise ValueError("phase_jitter must be >= 0")


def symmetric_state(n_ions: int, p: int, has_bus: bool = False) -> np.ndarray:
    """Amplitudes of the normalized symmetric state with p ions excited."""
    if not 0 <= p <= n_ions:
        raise ValueError(f"excitation number {p} outside [0, {n_ions}]")
    counts = excitation_counts(n_ions, has_bus)
    amps = np.zeros(len(counts), dtype=np.complex128)
    if has_bus:
        bus_ground = (np.arange(len(counts)) & 1) == 0
        sel = (counts == p) & bus_ground
    else:
        sel = counts == p
    amps[sel] = 1.0 / np.sqrt(comb(n_ions, p))
    return amps


def perturb_ghz(
    reg: QubitRegister,
    spec: ImperfectionSpec,
    rng: np.random.Generator | None = None,
) -> QubitRegister:
    """Add the specified symmetric-state admixtures and renormalize."""
    amps = reg.amplitudes.copy()
    for p, eps in sorted(spec.epsilon.items()):
        if p > reg.n_ions - 1:
            raise ValueError(
                f"admixture excitation {p} is not an intermediate component "
                f"for {reg.n_ions} ions"
            )
        factor = complex(eps)
        if spec.phase_jitter > 0.0:
            if rng is None:
                raise ValueError("phase_jitter > 0 requires an rng")
            factor *= np.exp(1j * rng.uniform(-spec.phase_jitter, spec.phase_jitter))
        amps += factor * symmetric_state(reg.n_ions, p, reg.has_bus)
    norm = np.sqrt(np.sum(np.abs(amps) ** 2))
    if norm < 1e-12:
        raise NormError("perturbed state has zero norm; cannot renormalize")
    return QubitRegister(reg.n_ions, reg.has_bus, amps / norm)
