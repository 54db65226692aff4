import numpy as np
import pytest

from spincoh import (FieldVector, PauliExpectations, Spin1Density, Spin1State,
                     evolve_density, expectations_from_density,
                     expectations_from_records, named_state, purity_parameter,
                     reconstruct_density, simulate_measurement)
from spincoh.tomography import BASES, MeasurementRecord, born_probabilities

MG = 1e-7


def random_eq17_density(rng):
    """Random density of the reconstructible family: qubit block plus
    uncorrelated |1,0> population."""
    e = rng.normal(size=3)
    e *= rng.uniform(0, 1) / max(np.linalg.norm(e), 1e-12)
    p_sub = rng.uniform(0.2, 1.0)
    exp = PauliExpectations(ex=e[0], ey=e[1], ez=e[2], p_sub=p_sub)
    return reconstruct_density(exp).rho, exp


def measure_all(rho, shots, seed):
    return [simulate_measurement(rho, basis, shots, seed) for basis in BASES]


class TestSimulateMeasurement:
    def test_m0_state_always_outside(self):
        rho = named_state("m0").density()
        for basis in BASES:
            rec = simulate_measurement(rho, basis, 500, seed=1)
            assert rec.count_outside == rec.shots == 500

    def test_sigma_x_eigenstate_all_plus(self):
        rho = named_state("x+").density()
        rec = simulate_measurement(rho, "sigma_x", 2000, seed=2)
        assert rec.count_plus == 2000

    def test_maximally_mixed_thirds(self):
        rho = Spin1Density.maximally_mixed()
        shots = 30000
        for basis in BASES:
            rec = simulate_measurement(rho, basis, shots, seed=3)
            sigma = np.sqrt(shots * (1 / 3) * (2 / 3))
            for count in (rec.count_plus, rec.count_minus, rec.count_outside):
                assert abs(count - shots / 3) < 3 * sigma

    def test_deterministic_in_seed(self):
        rho = named_state("y-").density()
        a = simulate_measurement(rho, "sigma_z", 1000, seed=4)
        b = simulate_measurement(rho, "sigma_z", 1000, seed=4)
        assert (a.count_plus, a.count_minus) == (b.count_plus, b.count_minus)

    def test_born_probabilities_sum_to_one(self):
        rng = np.random.default_rng(5)
        rho, _ = random_eq17_density(rng)
        for basis in BASES:
            assert born_probabilities(rho, basis).sum() == pytest.approx(1.0, abs=1e-14)

    def test_record_validation(self):
        with pytest.raises(ValueError):
            MeasurementRecord(basis="sigma_z", shots=10, count_plus=5,
                              count_minus=4, count_outside=2)
        with pytest.raises(ValueError):
            simulate_measurement(Spin1Density.maximally_mixed(), "sigma_z", 0, 1)


class TestExpectations:
    def test_perfect_sigma_z_record(self):
        records = [
            MeasurementRecord("sigma_x", 100, 50, 50, 0),
            MeasurementRecord("sigma_y", 100, 50, 50, 0),
            MeasurementRecord("sigma_z", 100, 100, 0, 0),
        ]
        exp = expectations_from_records(records)
        assert exp.ez == 1.0 and exp.p_sub == 1.0

    def test_maximally_mixed_large_shots(self):
        rho = Spin1Density.maximally_mixed()
        exp = expectations_from_records(measure_all(rho, 100000, seed=6))
        assert abs(exp.ex) < 0.02 and abs(exp.ey) < 0.02 and abs(exp.ez) < 0.02
        assert exp.p_sub == pytest.approx(2 / 3, abs=0.01)

    def test_y_state_sign_convention(self):
        # (|1,-1> + i|1,+1>)/sqrt2 is the sigma_y = -1 eigenstate here
        exp = expectations_from_density(named_state("y-").density())
        assert exp.ey == pytest.approx(-1.0, abs=1e-12)
        exp = expectations_from_density(named_state("y+").density())
        assert exp.ey == pytest.approx(+1.0, abs=1e-12)
        # finite-shot record agrees with the sign
        rec = expectations_from_records(measure_all(named_state("y-").density(),
                                                    4000, seed=7))
        assert rec.ey == pytest.approx(-1.0, abs=1e-9)

    def test_zero_subspace_counts_error(self):
        records = [
            MeasurementRecord("sigma_x", 10, 0, 0, 10),
            MeasurementRecord("sigma_y", 10, 5, 5, 0),
            MeasurementRecord("sigma_z", 10, 5, 5, 0),
        ]
        with pytest.raises(ValueError, match="subspace"):
            expectations_from_records(records)

    def test_absolute_reading_exposed(self):
        exp = PauliExpectations(ex=0.5, ey=0.0, ez=-0.5, p_sub=0.8)
        assert exp.absolute() == pytest.approx((0.4, 0.0, -0.4))


class TestReconstruction:
    def test_pole_state(self):
        exp = PauliExpectations(ex=0, ey=0, ez=1, p_sub=1.0)
        rec = reconstruct_density(exp)
        assert not rec.repaired
        assert np.allclose(rec.rho.matrix, named_state("m+1").density().matrix,
                           atol=1e-14)

    def test_maximally_mixed_from_expectations(self):
        exp = PauliExpectations(ex=0, ey=0, ez=0, p_sub=2 / 3)
        rec = reconstruct_density(exp)
        assert np.allclose(rec.rho.matrix, np.eye(3) / 3, atol=1e-14)

    def test_round_trip_exact_to_1e12(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            rho, exp = random_eq17_density(rng)
            back = reconstruct_density(expectations_from_density(rho))
            assert np.max(np.abs(back.rho.matrix - rho.matrix)) < 1e-12

    def test_psd_repair_flagged(self):
        exp = PauliExpectations(ex=0.8, ey=0.8, ez=0.8, p_sub=0.9)  # |e| > 1
        rec = reconstruct_density(exp)
        assert rec.repaired
        assert np.linalg.eigvalsh(rec.rho.matrix).min() >= -1e-12
        assert np.trace(rec.rho.matrix).real == pytest.approx(1.0, abs=1e-12)

    def test_error_scales_as_inverse_sqrt_shots(self):
        rng = np.random.default_rng(9)
        shot_levels = [100, 1000, 10000, 100000]
        errors = []
        for shots in shot_levels:
            errs = []
            for rep in range(25):
                rho, _ = random_eq17_density(rng)
                recon = reconstruct_density(expectations_from_records(
                    measure_all(rho, shots, seed=1000 * shots + rep)))
                errs.append(np.linalg.norm(recon.rho.matrix - rho.matrix))
            errors.append(np.mean(errs))
        slope = np.polyfit(np.log10(shot_levels), np.log10(errors), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.1)


class TestPurity:
    def test_reference_values(self):
        rng = np.random.default_rng(10)
        amps = rng.normal(size=3) + 1j * rng.normal(size=3)
        pure = Spin1State.normalized(amps).density()
        assert purity_parameter(pure).r == pytest.approx(1.0, abs=1e-12)
        assert purity_parameter(Spin1Density.maximally_mixed()).r == pytest.approx(0.0, abs=1e-12)
        half = Spin1Density(np.diag([0.5, 0.0, 0.5]))
        report = purity_parameter(half)
        assert report.trace_rho_sq == pytest.approx(0.5, abs=1e-14)
        assert report.r == pytest.approx(0.5, abs=1e-12)

    def test_invariant_under_unitary_evolution(self):
        rng = np.random.default_rng(11)
        rho, _ = random_eq17_density(rng)
        before = purity_parameter(rho).r
        evolved = evolve_density(rho, FieldVector(2 * MG, 1 * MG, -3 * MG), 170e-6)
        assert purity_parameter(evolved).r == pytest.approx(before, abs=1e-12)

    def test_lower_bound_under_completions(self):
        # restoring |1,0> coherences can only raise trace(rho^2)
        rng = np.random.default_rng(12)
        for _ in range(50):
            rho, _ = random_eq17_density(rng)
            base = purity_parameter(rho).r
            m = rho.matrix.copy()
            for _ in range(20):
                c1 = (rng.normal() + 1j * rng.normal()) * 0.05
                c2 = (rng.normal() + 1j * rng.normal()) * 0.05
                candidate = m.copy()
                candidate[0, 1], candidate[1, 0] = c1, np.conj(c1)
                candidate[2, 1], candidate[1, 2] = c2, np.conj(c2)
                if np.linalg.eigvalsh(candidate).min() >= 0:
                    completed = Spin1Density(candidate)
                    assert purity_parameter(completed).r >= base - 1e-12
                    break
