import math

import numpy as np
import pytest

from spincoh import (CONST, FieldVector, Spin1Density, Spin1State, eigenframe,
                     evolve, evolve_density, hamiltonian, larmor_frequency,
                     named_state, propagate_piecewise, purity_parameter,
                     survival_probability)
from spincoh.spin1 import FX, FY, FZ, eigenvectors_batch, survival_curve_batch

MG = 1e-7  # tesla


def random_state(rng):
    amps = rng.normal(size=3) + 1j * rng.normal(size=3)
    return Spin1State.normalized(amps)


def random_field(rng, scale=5 * MG):
    return FieldVector(*(rng.normal(size=3) * scale))


class TestEigenframe:
    def test_field_along_z_gives_canonical_basis(self):
        frame = eigenframe(FieldVector(0, 0, 1 * MG))
        assert np.allclose(frame.matrix, np.eye(3), atol=1e-15)

    def test_larmor_frequency_at_5p5_mg(self):
        frame = eigenframe(FieldVector(0, 0, 5.5 * MG))
        assert abs(frame.omega_l) / (2 * math.pi) == pytest.approx(3.85e3, rel=2e-3)
        assert frame.omega_l < 0  # gF < 0
        assert frame.omega_l == larmor_frequency(FieldVector(0, 0, 5.5 * MG))

    def test_field_along_x_phi_zero(self):
        frame = eigenframe(FieldVector(1 * MG, 0, 0))
        phi0 = frame.states[1].amplitudes
        expected = np.array([-1, 0, 1]) / math.sqrt(2)
        # equal up to a global phase
        phase = phi0[np.argmax(np.abs(expected))] / expected[np.argmax(np.abs(expected))]
        assert np.allclose(phi0, phase * expected, atol=1e-12)

    def test_zero_field_convention(self):
        frame = eigenframe(FieldVector(0, 0, 0))
        assert frame.omega_l == 0.0
        assert np.allclose(frame.matrix, np.eye(3), atol=1e-15)

    def test_named_accessors_match_eigenvalue_order(self):
        frame = eigenframe(FieldVector(0, 0, 2 * MG))
        assert np.allclose(frame.phi_plus.amplitudes, [1, 0, 0], atol=1e-15)
        assert np.allclose(frame.phi_zero.amplitudes, [0, 1, 0], atol=1e-15)
        assert np.allclose(frame.phi_minus.amplitudes, [0, 0, 1], atol=1e-15)

    def test_eigen_residual_random_fields(self):
        # H Phi_k = k hbar omega_L Phi_k to 1e-12 * ||H||
        rng = np.random.default_rng(2)
        for _ in range(200):
            field = random_field(rng)
            frame = eigenframe(field)
            h = hamiltonian(field)
            h_norm = np.linalg.norm(h)
            for k, state in zip((1, 0, -1), frame.states):
                resid = h @ state.amplitudes - k * CONST.hbar * frame.omega_l * state.amplitudes
                assert np.linalg.norm(resid) <= 1e-12 * h_norm + 1e-60

    def test_orthonormal_triple(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            v = eigenframe(random_field(rng)).matrix
            assert np.max(np.abs(v.conj().T @ v - np.eye(3))) < 1e-12

    def test_frame_consistency_spin_projection(self):
        # <Phi_k| F.n |Phi_k> = k (F in units of hbar) for arbitrary directions
        rng = np.random.default_rng(4)
        for _ in range(100):
            field = random_field(rng)
            n = field.as_array() / field.magnitude
            f_n = n[0] * FX + n[1] * FY + n[2] * FZ
            frame = eigenframe(field)
            for k, state in zip((1, 0, -1), frame.states):
                proj = np.real(state.amplitudes.conj() @ f_n @ state.amplitudes)
                assert abs(proj - k) < 1e-12


class TestEvolve:
    def test_zero_field_identity(self):
        rng = np.random.default_rng(5)
        s = random_state(rng)
        out = evolve(s, FieldVector(0, 0, 0), 123e-6)
        assert np.allclose(out.amplitudes, s.amplitudes, atol=1e-15)

    def test_eigenstate_populations_static(self):
        s = Spin1State.basis(+1)
        out = evolve(s, FieldVector(0, 0, 5.5 * MG), 37e-6)
        assert np.allclose(out.populations(), s.populations(), atol=1e-15)

    def test_superposition_oscillates_at_twice_larmor(self):
        field = FieldVector(0, 0, 5.5 * MG)
        omega = abs(larmor_frequency(field))
        s = named_state("x+")
        ts = np.linspace(0, 200e-6, 41)
        p = np.array([survival_probability(s, s, field, t) for t in ts])
        assert np.allclose(p, np.cos(omega * ts) ** 2, atol=1e-12)

    def test_unitarity_1e4_random(self):
        rng = np.random.default_rng(6)
        fields = rng.normal(size=(10000, 3)) * 5 * MG
        times = rng.uniform(0, 500e-6, size=10000)
        v, omega = eigenvectors_batch(fields)
        s = random_state(rng)
        coeff = np.einsum("nik,i->nk", v.conj(), s.amplitudes)
        phases = np.exp(-1j * omega[:, None] * times[:, None] * np.array([1.0, 0.0, -1.0]))
        out = np.einsum("nik,nk->ni", v, phases * coeff)
        norms = np.linalg.norm(out, axis=1)
        assert np.max(np.abs(norms - 1.0)) < 1e-12

    def test_composition(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            s = random_state(rng)
            field = random_field(rng)
            t1, t2 = rng.uniform(0, 300e-6, size=2)
            once = evolve(s, field, t1 + t2)
            twice = evolve(evolve(s, field, t1), field, t2)
            assert np.allclose(once.amplitudes, twice.amplitudes, atol=1e-12)

    def test_matches_matrix_exponential_oracle(self):
        # independent check of the closed-form propagator, including the
        # eigenvalue sign and ordering conventions
        from scipy.linalg import expm

        rng = np.random.default_rng(14)
        for _ in range(50):
            s = random_state(rng)
            field = random_field(rng)
            t = rng.uniform(0, 400e-6)
            u = expm(-1j * hamiltonian(field) * t / CONST.hbar)
            expected = u @ s.amplitudes
            out = evolve(s, field, t).amplitudes
            assert np.max(np.abs(out - expected)) < 1e-12


class TestSurvivalProbability:
    def test_same_state_t0(self):
        rng = np.random.default_rng(8)
        s = random_state(rng)
        assert survival_probability(s, s, random_field(rng), 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_eigenstates_never_mix(self):
        field = FieldVector(0, 0, 3 * MG)
        for t in (0.0, 17e-6, 133e-6):
            p = survival_probability(Spin1State.basis(+1), Spin1State.basis(-1), field, t)
            assert p < 1e-24

    def test_conjugate_superposition_sin_squared(self):
        field = FieldVector(0, 0, 5.5 * MG)
        omega = abs(larmor_frequency(field))
        plus, minus = named_state("x+"), named_state("x-")
        for t in np.linspace(0, 150e-6, 16):
            p = survival_probability(plus, minus, field, t)
            assert p == pytest.approx(math.sin(omega * t) ** 2, abs=1e-12)

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(9)
        init, analysis = random_state(rng), random_state(rng)
        fields = rng.normal(size=(20, 3)) * 3 * MG
        times = np.linspace(0, 100e-6, 7)
        batch = survival_curve_batch(init, analysis, fields, times)
        for i in range(20):
            for j, t in enumerate(times):
                p = survival_probability(init, analysis, FieldVector(*fields[i]), t)
                assert batch[i, j] == pytest.approx(p, abs=1e-12)


class TestEvolveDensity:
    def test_maximally_mixed_invariant(self):
        rho = Spin1Density.maximally_mixed()
        out = evolve_density(rho, FieldVector(2 * MG, -1 * MG, 3 * MG), 77e-6)
        assert np.allclose(out.matrix, rho.matrix, atol=1e-14)

    def test_pure_state_consistency(self):
        rng = np.random.default_rng(10)
        s = random_state(rng)
        field = random_field(rng)
        t = 123e-6
        via_density = evolve_density(s.density(), field, t)
        via_state = evolve(s, field, t).density()
        assert np.allclose(via_density.matrix, via_state.matrix, atol=1e-12)

    def test_purity_invariant_under_evolution(self):
        rng = np.random.default_rng(11)
        # random mixed state from a convex mix of projectors
        states = [random_state(rng) for _ in range(3)]
        weights = np.array([0.5, 0.3, 0.2])
        rho = Spin1Density(sum(w * s.density().matrix for w, s in zip(weights, states)))
        before = purity_parameter(rho).r
        after = purity_parameter(evolve_density(rho, random_field(rng), 55e-6)).r
        assert after == pytest.approx(before, abs=1e-12)

    def test_spectrum_preserved(self):
        rng = np.random.default_rng(12)
        rho = Spin1Density(np.diag([0.6, 0.3, 0.1]))
        out = evolve_density(rho, random_field(rng), 99e-6)
        assert np.allclose(np.sort(np.linalg.eigvalsh(out.matrix)),
                           [0.1, 0.3, 0.6], atol=1e-12)


class TestPropagatePiecewise:
    def test_constant_samples_equal_single_evolve(self):
        rng = np.random.default_rng(13)
        s = random_state(rng)
        field = FieldVector(1 * MG, 0.5 * MG, 4 * MG)
        dt = 1e-6
        n = 200
        stepped = propagate_piecewise(s, [field] * n, dt)
        direct = evolve(s, field, n * dt)
        assert np.abs(stepped.amplitudes - direct.amplitudes).max() < 1e-10

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            propagate_piecewise(Spin1State.basis(+1), [FieldVector(0, 0, MG)], 0.0)

    def test_warns_on_coarse_step(self):
        field = FieldVector(0, 0, 1e-4)  # 1 G: omega_L ~ 2pi * 70 kHz
        with pytest.warns(UserWarning, match="omega_L"):
            propagate_piecewise(Spin1State.basis(+1), [field] * 3, 1e-3)

    def test_follows_mean_field_with_bounded_deviation(self):
        # sinusoidal z modulation far above the Larmor frequency: the state
        # tracks the mean-field trajectory
        b_mean, db = 5.715 * MG, 1 * MG
        f_mod = 50e3
        dt = 1.0 / (f_mod * 40)
        n = int(round(200e-6 / dt))
        mids = (np.arange(n) + 0.5) * dt
        fields = [FieldVector(0, 0, b_mean + db * math.sin(2 * math.pi * f_mod * t))
                  for t in mids]
        s = named_state("x+")
        traj = propagate_piecewise(s, fields, dt, keep_trajectory=True)
        dev = []
        for i, state in enumerate(traj):
            ref = evolve(s, FieldVector(0, 0, b_mean), i * dt)
            dev.append(1.0 - abs(np.vdot(ref.amplitudes, state.amplitudes)) ** 2)
        assert max(dev) < 5e-3  # small vs the O(1) population swing


def test_state_validation():
    with pytest.raises(ValueError):
        Spin1State([1.0, 0.5, 0.0])  # not normalized
    with pytest.raises(ValueError):
        Spin1Density(np.diag([0.9, 0.2, -0.1]))  # negative eigenvalue
    with pytest.raises(ValueError):
        named_state("bogus")
