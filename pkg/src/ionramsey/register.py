"""Dense state-vector register for a chain of two-level ions plus an
optional bus qubit.

Conventions (fixed; everything downstream relies on them):

* Basis index bits: ion 1 is the most significant bit, ion L the least
  significant ion bit, and the bus qubit (if present) the very least
  significant bit. Bit value 0 = |dn> (ground), 1 = |up>.
* Single-qubit rotations use
  ``R(theta, phi) = exp[-i(theta/2)(cos(phi) sx + sin(phi) sy)]``,
  whose matrix in the (|dn>, |up>) basis is
  ``[[cos(t/2), -i e^{-i phi} sin(t/2)], [-i e^{i phi} sin(t/2), cos(t/2)]]``.
  The inverse of ``R(theta, phi)`` is ``R(theta, phi + pi)``.
* In the frame rotating at the drive frequency, a basis state with ``p``
  ions excited acquires phase ``exp(+i p delta_omega t)`` under free
  evolution with detuning ``delta_omega`` (drive minus atomic frequency).
  The bus qubit never accumulates detuning phase.
* Spin eigenvalues are +-1/2, so the parity operator (product of the
  single-ion spins) has range +-(1/2)**L; a 2**L-normalized variant in
  [-1, 1] is exposed for readability. The bus is excluded from all
  observables.

Registers are values: every operation returns a new register and leaves its
input untouched, so Monte Carlo trials can share prepared states freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, NormError

MAX_IONS = 24
NORM_TOL = 1e-12


@dataclass
class QubitRegister:
    """State vector over ``n_ions`` ions and, optionally, one bus qubit."""

    n_ions: int
    has_bus: bool
    amplitudes: np.ndarray

    @property
    def n_qubits(self) -> int:
        return self.n_ions + (1 if self.has_bus else 0)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def copy(self) -> "QubitRegister":
        return QubitRegister(self.n_ions, self.has_bus, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))


@dataclass(frozen=True)
class PulseSpec:
    """Resonant pulse: rotation angle ``theta``, phase ``phi``, target ions.

    ``targets`` are 1-based ion indices; the bus cannot be pulsed.
    """

    theta: float
    phi: float
    targets: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        targets = tuple(sorted(set(int(i) for i in self.targets)))
        object.__setattr__(self, "targets", targets)
        if not targets:
            raise ValueError("pulse needs at least one target ion")
        if targets[0] < 1:
            raise ValueError(f"ion indices are 1-based, got {targets[0]}")


def pi_half_pulse(n_ions: int, phi: float = 0.0) -> PulseSpec:
    """A pi/2 pulse addressing all ions, the workhorse of Ramsey sequences."""
    return PulseSpec(theta=np.pi / 2, phi=phi, targets=tuple(range(1, n_ions + 1)))


def new_register(n_ions: int, has_bus: bool = False) -> QubitRegister:
    """All ions (and bus) in |dn>: amplitude 1 on basis index 0."""
    if not 1 <= n_ions <= MAX_IONS:
        raise CapacityError(
            f"n_ions must be in [1, {MAX_IONS}] for dense simulation, got {n_ions}"
        )
    n_qubits = n_ions + (1 if has_bus else 0)
    amplitudes = np.zeros(1 << n_qubits, dtype=np.complex128)
    amplitudes[0] = 1.0
    return QubitRegister(n_ions=n_ions, has_bus=has_bus, amplitudes=amplitudes)


def rotation_matrix(theta: float, phi: float) -> np.ndarray:
    """2x2 matrix of R(theta, phi) in the (|dn>, |up>) basis."""
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    return np.array(
        [
            [c, -1j * np.exp(-1j * phi) * s],
            [-1j * np.exp(1j * phi) * s, c],
        ],
        dtype=np.complex128,
    )


def _qubit_axis(reg: QubitRegister, ion: int) -> int:
    """Tensor axis of an ion once amplitudes are reshaped to [2]*n_qubits.

    Ion 1 is the most significant bit and therefore the first axis.
    """
    if not 1 <= ion <= reg.n_ions:
        raise ValueError(f"ion index {ion} out of range [1, {reg.n_ions}]")
    return ion - 1


def _bus_axis(reg: QubitRegister) -> int:
    if not reg.has_bus:
        raise ValueError("register has no bus qubit")
    return reg.n_qubits - 1


def apply_matrix_on_axis(
    amplitudes: np.ndarray, mat: np.ndarray, axis: int, n_qubits: int
) -> np.ndarray:
    """Apply a 2x2 matrix on one tensor axis of a flat amplitude vector."""
    psi = amplitudes.reshape([2] * n_qubits)
    psi = np.tensordot(mat, psi, axes=([1], [axis]))
    psi = np.moveaxis(psi, 0, axis)
    return np.ascontiguousarray(psi).reshape(-1)


def apply_rotation(reg: QubitRegister, pulse: PulseSpec) -> QubitRegister:
    """Apply R(theta, phi) to every target ion; non-targets untouched."""
    if pulse.targets[-1] > reg.n_ions:
        raise ValueError(
            f"pulse targets ion {pulse.targets[-1]} but register has {reg.n_ions}"
        )
    mat = rotation_matrix(pulse.theta, pulse.phi)
    amps = reg.amplitudes
    for ion in pulse.targets:
        amps = apply_matrix_on_axis(amps, mat, _qubit_axis(reg, ion), reg.n_qubits)
    return QubitRegister(reg.n_ions, reg.has_bus, amps)


def excitation_counts(n_ions: int, has_bus: bool) -> np.ndarray:
    """Number of excited *ions* for each basis index (bus bit ignored)."""
    n_qubits = n_ions + (1 if has_bus else 0)
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    ion_bits = idx >> (1 if has_bus else 0)
    counts = np.zeros_like(idx)
    for b in range(n_ions):
        counts += (ion_bits >> b) & 1
    return counts


def free_evolve(reg: QubitRegister, delta_omega: float, t: float) -> QubitRegister:
    """Accumulate detuning phase exp(+i p delta_omega t) on p-excitation states."""
    if t < 0:
        raise ValueError(f"evolution time must be >= 0, got {t}")
    p = excitation_counts(reg.n_ions, reg.has_bus)
    phases = np.exp(1j * p * delta_omega * t)
    return QubitRegister(reg.n_ions, reg.has_bus, reg.amplitudes * phases)


def _probabilities(reg: QubitRegister) -> np.ndarray:
    return np.abs(reg.amplitudes) ** 2


def expect_jz(reg: QubitRegister) -> float:
    """<Jz> with Jz eigenvalue (n_up - n_dn)/2 per basis state."""
    p = excitation_counts(reg.n_ions, reg.has_bus)
    jz = p - reg.n_ions / 2.0
    return float(np.dot(_probabilities(reg), jz))


def expect_parity(reg: QubitRegister) -> float:
    """<product of single-ion spins>, range +-(1/2)**n_ions."""
    p = excitation_counts(reg.n_ions, reg.has_bus)
    n_down = reg.n_ions - p
    signs = np.where(n_down % 2 == 0, 1.0, -1.0)
    return float(np.dot(_probabilities(reg), signs)) * 0.5**reg.n_ions


def expect_parity_normalized(reg: QubitRegister) -> float:
    """2**n_ions times :func:`expect_parity`; a fringe signal in [-1, 1]."""
    return expect_parity(reg) * 2.0**reg.n_ions


def expect_sz_ion(reg: QubitRegister, ion: int) -> float:
    """<Sz> of a single ion (marginal), in [-1/2, 1/2]."""
    axis = _qubit_axis(reg, ion)
    psi = _probabilities(reg).reshape([2] * reg.n_qubits)
    p_up = float(np.sum(np.take(psi, 1, axis=axis)))
    return p_up - 0.5


def prob_down_ion(reg: QubitRegister, ion: int) -> float:
    """Marginal probability that a projective measurement finds the ion |dn>."""
    return 0.5 - expect_sz_ion(reg, ion)


def bus_purity(reg: QubitRegister) -> float:
    """Purity of the reduced bus state; 1.0 iff bus is unentangled."""
    axis = _bus_axis(reg)
    psi = np.moveaxis(reg.amplitudes.reshape([2] * reg.n_qubits), axis, -1)
    a = psi.reshape(-1, 2)
    rho = a.conj().T @ a
    return float(np.real(np.trace(rho @ rho)))


def check_norm(reg: QubitRegister, tol: float = NORM_TOL) -> None:
    """Raise NormError if the state norm drifted beyond ``tol``."""
    norm_sq = float(np.sum(np.abs(reg.amplitudes) ** 2))
    if abs(norm_sq - 1.0) > tol:
        raise NormError(f"state norm^2 = {norm_sq!r} deviates from 1 beyond {tol}")


@dataclass
class MeasurementSample:
    """Outcomes of projective z-basis measurements on every ion.

    Per shot this records the raw basis index, the count of ions found
    |dn> (``n_down``), the sign of the spin-product parity
    (``parity_sign``, +1 when ``n_down`` is even), and the measured spin
    of ion 1 (``sz_ion1``, +-1/2). The bus bit, if present, is ignored by
    all derived quantities.
    """

    n_ions: int
    indices: np.ndarray
    n_down: np.ndarray
    parity_sign: np.ndarray
    sz_ion1: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)


def sample_measurement(
    reg: QubitRegister, rng: np.random.Generator, shots: int = 1
) -> MeasurementSample:
    """Born-rule sampling of all-ion z measurements; register unchanged."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    probs = _probabilities(reg)
    probs = probs / probs.sum()
    indices = rng.choice(reg.dim, size=shots, p=probs)
    p = excitation_counts(reg.n_ions, reg.has_bus)[indices]
    n_down = reg.n_ions - p
    parity_sign = np.where(n_down % 2 == 0, 1, -1).astype(np.int64)
    ion1_bit = (indices >> (reg.n_qubits - 1)) & 1
    sz_ion1 = ion1_bit - 0.5
    return MeasurementSample(
        n_ions=reg.n_ions,
        indices=indices.astype(np.int64),
        n_down=n_down.astype(np.int64),
        parity_sign=parity_sign,
        sz_ion1=sz_ion1,
    )
