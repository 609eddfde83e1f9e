"""Register-level checks against dense-matrix oracles.

Every structured operation (rotations on selected qubits, free evolution,
observables) is compared to an explicit 2^n x 2^n matrix built with np.kron,
which only relies on the documented axis convention: ion 1 is the most
significant bit, the bus (when present) is the least significant, and bit
value 0 means the ion is in the lower state.
"""

import numpy as np
import pytest

from ionramsey import (
    CapacityError,
    MAX_IONS,
    PulseSpec,
    QubitRegister,
    apply_rotation,
    expect_jz,
    expect_parity,
    expect_parity_normalized,
    free_evolve,
    new_register,
    sample_measurement,
    stream,
)
from ionramsey.register import (
    bus_purity,
    excitation_counts,
    expect_sz_ion,
    pi_half_pulse,
    prob_down_ion,
    rotation_matrix,
)

I2 = np.eye(2, dtype=complex)
SZ = 0.5 * np.diag([-1.0, 1.0]).astype(complex)  # bit 0 = down = -1/2


def kron_chain(mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def embed_on_ions(single_qubit, n_ions, targets, has_bus=False):
    """Dense operator applying `single_qubit` on each target ion (oracle)."""
    mats = [single_qubit if i in targets else I2 for i in range(1, n_ions + 1)]
    if has_bus:
        mats.append(I2)
    return kron_chain(mats)


def random_state(dim, rng):
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return amps / np.linalg.norm(amps)


class TestRegisterBasics:
    def test_new_register_is_ground_state(self):
        reg = new_register(3)
        assert reg.dim == 8
        np.testing.assert_allclose(reg.amplitudes[0], 1.0)
        np.testing.assert_allclose(np.linalg.norm(reg.amplitudes), 1.0)

    def test_bus_adds_one_qubit(self):
        assert new_register(3, has_bus=True).dim == 16

    @pytest.mark.parametrize("n", [0, -1, MAX_IONS + 1])
    def test_capacity_limits(self, n):
        with pytest.raises(CapacityError):
            new_register(n)

    def test_excitation_counts_matches_popcount(self):
        # Oracle: count set bits among the ion bits of each basis index.
        for has_bus in (False, True):
            reg = new_register(3, has_bus=has_bus)
            counts = excitation_counts(reg.n_ions, reg.has_bus)
            shift = 1 if has_bus else 0
            expected = [bin(i >> shift).count("1") for i in range(reg.dim)]
            np.testing.assert_array_equal(counts, expected)


class TestRotations:
    def test_rotation_matrix_is_unitary(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            theta, phi = rng.uniform(-4 * np.pi, 4 * np.pi, size=2)
            u = rotation_matrix(theta, phi)
            np.testing.assert_allclose(u @ u.conj().T, I2, atol=1e-12)

    def test_pi_pulse_inverts_population(self):
        reg = new_register(1)
        reg = apply_rotation(reg, PulseSpec(np.pi, 0.3, (1,)))
        assert abs(reg.amplitudes[1]) == pytest.approx(1.0, abs=1e-12)

    def test_rotation_inverse_identity(self):
        rng = np.random.default_rng(5)
        reg = new_register(2)
        reg = QubitRegister(2, False, random_state(4, rng))
        theta, phi = 1.1, -0.7
        out = apply_rotation(reg, PulseSpec(theta, phi, (1, 2)))
        out = apply_rotation(out, PulseSpec(theta, phi + np.pi, (1, 2)))
        np.testing.assert_allclose(out.amplitudes, reg.amplitudes, atol=1e-12)

    @pytest.mark.parametrize("has_bus", [False, True])
    @pytest.mark.parametrize("targets", [(1,), (2,), (3,), (1, 3), (1, 2, 3)])
    def test_matches_dense_kron_oracle(self, targets, has_bus):
        rng = np.random.default_rng(hash((targets, has_bus)) % 2**32)
        theta, phi = rng.uniform(0, 2 * np.pi, size=2)
        n_ions = 3
        dim = 2 ** (n_ions + has_bus)
        amps = random_state(dim, rng)
        reg = QubitRegister(n_ions, has_bus, amps.copy())
        got = apply_rotation(reg, PulseSpec(theta, phi, targets))
        dense = embed_on_ions(rotation_matrix(theta, phi), n_ions, targets, has_bus)
        np.testing.assert_allclose(got.amplitudes, dense @ amps, atol=1e-12)

    def test_pulse_spec_normalizes_targets(self):
        spec = PulseSpec(0.5, 0.0, (3, 1, 3))
        assert spec.targets == (1, 3)
        with pytest.raises(ValueError):
            PulseSpec(0.5, 0.0, ())
        with pytest.raises(ValueError):
            PulseSpec(0.5, 0.0, (0,))

    def test_pi_half_pulse_helper(self):
        spec = pi_half_pulse(4, 0.25)
        assert spec.theta == pytest.approx(np.pi / 2)
        assert spec.targets == (1, 2, 3, 4)


class TestFreeEvolution:
    def test_matches_diagonal_oracle(self):
        rng = np.random.default_rng(7)
        for has_bus in (False, True):
            n_ions, dw, t = 3, 0.37, 1.9
            dim = 2 ** (n_ions + has_bus)
            amps = random_state(dim, rng)
            reg = QubitRegister(n_ions, has_bus, amps.copy())
            got = free_evolve(reg, dw, t)
            shift = 1 if has_bus else 0
            phases = np.array(
                [np.exp(1j * bin(i >> shift).count("1") * dw * t) for i in range(dim)]
            )
            np.testing.assert_allclose(got.amplitudes, phases * amps, atol=1e-12)

    def test_composition_of_intervals(self):
        # Evolving t1 then t2 must equal evolving t1+t2 exactly.
        rng = np.random.default_rng(8)
        amps = random_state(16, rng)
        reg = QubitRegister(4, False, amps)
        a = free_evolve(free_evolve(reg, 0.81, 0.4), 0.81, 1.13)
        b = free_evolve(reg, 0.81, 1.53)
        np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-12)

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            free_evolve(new_register(1), 0.1, -1.0)


class TestObservables:
    def _dense_expectations(self, n_ions, amps):
        """Oracle: dense J_z and parity-product matrices."""
        jz = np.zeros((2**n_ions,) * 2, dtype=complex)
        for i in range(1, n_ions + 1):
            jz += embed_on_ions(SZ, n_ions, (i,))
        par = kron_chain([SZ] * n_ions)
        ev = lambda m: float(np.real(amps.conj() @ m @ amps))
        return ev(jz), ev(par)

    @pytest.mark.parametrize("n_ions", [1, 2, 3, 4])
    def test_jz_and_parity_match_dense(self, n_ions):
        rng = np.random.default_rng(100 + n_ions)
        amps = random_state(2**n_ions, rng)
        reg = QubitRegister(n_ions, False, amps)
        jz_o, par_o = self._dense_expectations(n_ions, amps)
        assert expect_jz(reg) == pytest.approx(jz_o, abs=1e-12)
        assert expect_parity(reg) == pytest.approx(par_o, abs=1e-12)
        assert expect_parity_normalized(reg) == pytest.approx(
            2**n_ions * par_o, abs=1e-12
        )

    def test_parity_range(self):
        reg = new_register(3)  # all down: parity (-1/2)^3
        assert expect_parity(reg) == pytest.approx(-0.125)
        assert expect_parity_normalized(reg) == pytest.approx(-1.0)

    def test_single_ion_marginals(self):
        rng = np.random.default_rng(21)
        amps = random_state(8, rng)
        reg = QubitRegister(3, False, amps)
        sz1 = embed_on_ions(SZ, 3, (1,))
        want = float(np.real(amps.conj() @ sz1 @ amps))
        assert expect_sz_ion(reg, 1) == pytest.approx(want, abs=1e-12)
        assert prob_down_ion(reg, 1) == pytest.approx(0.5 - want, abs=1e-12)

    def test_bus_purity_product_vs_entangled(self):
        reg = new_register(2, has_bus=True)
        assert bus_purity(reg) == pytest.approx(1.0, abs=1e-12)
        # Entangle ion 1 with the bus: purity drops to 1/2.
        amps = np.zeros(8, dtype=complex)
        amps[0b000] = 1 / np.sqrt(2)  # ion1 down, bus 0
        amps[0b101] = 1 / np.sqrt(2)  # ion1 up,   bus 1
        ent = QubitRegister(2, True, amps)
        assert bus_purity(ent) == pytest.approx(0.5, abs=1e-12)


class TestSampling:
    def test_sample_distribution_chi2(self):
        # Oracle: exact Born probabilities; Pearson chi^2 at a fixed seed
        # should sit well inside the 99.9% quantile.
        rng = np.random.default_rng(4)
        amps = random_state(8, rng)
        reg = QubitRegister(3, False, amps)
        probs = np.abs(amps) ** 2
        n = 200_000
        sample = sample_measurement(reg, stream(123, 9), n)
        counts = np.bincount(sample.indices, minlength=8)
        chi2 = float(np.sum((counts - n * probs) ** 2 / (n * probs)))
        # 7 dof: 99.9% quantile is 24.3
        assert chi2 < 24.3

    def test_derived_quantities_match_indices(self):
        reg, _ = _half_fringe_register()
        s = sample_measurement(reg, stream(5, 1), 1000)
        n_qubits = reg.n_qubits
        for idx, nd, par, sz in zip(
            s.indices[:50], s.n_down[:50], s.parity_sign[:50], s.sz_ion1[:50]
        ):
            ups = bin(int(idx)).count("1")
            assert nd == reg.n_ions - ups
            assert par == (-1) ** nd
            bit1 = (int(idx) >> (n_qubits - 1)) & 1
            assert sz == pytest.approx(0.5 if bit1 else -0.5)

    def test_projection_noise_variance_binomial(self):
        # Independent half-fringe ions: L_down is Binomial(L, 1/2).
        reg, n_ions = _half_fringe_register()
        n = 100_000
        s = sample_measurement(reg, stream(77, 0), n)
        var = float(np.var(s.n_down, ddof=1))
        # Oracle: exact moments of the sampled distribution give the
        # standard error of the sample variance.
        probs = np.abs(reg.amplitudes) ** 2
        nd = reg.n_ions - np.array([bin(i).count("1") for i in range(reg.dim)])
        mu = float(np.sum(probs * nd))
        m2 = float(np.sum(probs * (nd - mu) ** 2))
        m4 = float(np.sum(probs * (nd - mu) ** 4))
        sd_var = np.sqrt((m4 - m2**2) / n)
        assert m2 == pytest.approx(n_ions / 4, abs=1e-9)
        assert abs(var - m2) < 4 * sd_var


def _half_fringe_register():
    n_ions = 4
    reg = new_register(n_ions)
    reg = apply_rotation(reg, pi_half_pulse(n_ions, 0.0))
    return reg, n_ions
