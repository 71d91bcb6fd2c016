import itertools
import json
import math

import numpy as np
import pytest
from scipy.stats import chisquare

from mqdimer.circuits import pure_ground_circuit, run_pure_experiment, run_thermal_experiment, thermal_full_circuit
from mqdimer.gates import embed_gate, run_circuit
from mqdimer.measurement import (
    NoiseModel,
    ShotHistogram,
    apply_depolarizing,
    estimate_pure_from_frequencies,
    estimate_pure_from_histogram,
    estimate_pure_intensities,
    estimate_thermal_from_frequencies,
    estimate_thermal_intensities,
    exact_frequencies,
    marginal_probabilities,
    run_noisy_circuit,
    sample,
)
from mqdimer.model import analytic_intensities_pure, analytic_intensities_thermal, thermal_density
from mqdimer.state import DensityMatrix, density_from_pure, ground_state, maximally_mixed

from conftest import random_density, random_state

PAULIS = [
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]

TAU_GRID = np.linspace(0, 2 * math.pi, 17)


def twirl_depolarize(rho, n, acted, p):
    """(1-p) rho + p/4^k sum over Pauli strings on the acted qubits of P rho P."""
    k = len(acted)
    out = np.zeros_like(rho)
    for combo in itertools.product(range(4), repeat=k):
        op = np.ones((1, 1), dtype=complex)
        for q in range(1, n + 1):
            op = np.kron(op, PAULIS[combo[acted.index(q)]] if q in acted else np.eye(2))
        out += op @ rho @ op.conj().T
    return (1 - p) * rho + p * out / 4**k


def oracle_noisy(circuit, p):
    n = circuit.n_qubits
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho[0, 0] = 1
    for g in circuit.gates:
        u = embed_gate(g, n)
        rho = twirl_depolarize(u @ rho @ u.conj().T, n, list(g.qubits), p)
    return rho


class TestMarginals:
    def test_order_follows_subset(self):
        psi = run_circuit(thermal_full_circuit(2.12, 0.4))
        fwd = marginal_probabilities(psi, [2, 3]).reshape(2, 2)
        rev = marginal_probabilities(psi, [3, 2]).reshape(2, 2)
        np.testing.assert_allclose(fwd, rev.T, atol=1e-15)

    def test_pure_and_mixed_agree(self, rng):
        psi = random_state(rng, 4)
        np.testing.assert_allclose(
            marginal_probabilities(psi, [4, 1]),
            marginal_probabilities(density_from_pure(psi), [4, 1]),
            atol=1e-14,
        )

    def test_empty_subset(self):
        with pytest.raises(ValueError):
            marginal_probabilities(ground_state(2), [])


class TestSample:
    def test_ground_state(self):
        hist = sample(ground_state(2), [1, 2], 1000, seed=3)
        assert hist.counts == {"00": 1000, "01": 0, "10": 0, "11": 0}

    def test_pure_half_pi(self):
        shots = 200_000
        hist = sample(run_pure_experiment(math.pi / 2), [1, 2], shots, seed=11)
        f = hist.frequencies()
        assert f["01"] == f["10"] == 0
        assert abs(f["00"] - 0.5) < 5 * math.sqrt(0.25 / shots)

    def test_thermal_tau_zero(self):
        shots = 200_000
        hist = sample(run_thermal_experiment(2.12, 0.0), [2, 3], shots, seed=5)
        f = hist.frequencies()
        expected = thermal_density(2.12).diagonal()
        for key, p in zip(["00", "01", "10", "11"], expected):
            assert abs(f[key] - p) < 5 * math.sqrt(p * (1 - p) / shots)

    def test_goodness_of_fit(self, rng):
        psi = random_state(rng, 3)
        probs = marginal_probabilities(psi, [1, 2, 3])
        hist = sample(psi, [1, 2, 3], 50_000, seed=99)
        observed = np.array(list(hist.counts.values()))
        assert chisquare(observed, probs * 50_000).pvalue > 1e-4

    def test_deterministic(self):
        psi = run_thermal_experiment(2.12, 1.0)
        assert sample(psi, [2, 3], 4096, seed=42) == sample(psi, [2, 3], 4096, seed=42)
        assert sample(psi, [2, 3], 4096, seed=42) != sample(psi, [2, 3], 4096, seed=43)

    def test_from_density_matrix(self):
        hist = sample(maximally_mixed(2), [1, 2], 40_000, seed=0)
        for n in hist.counts.values():
            assert abs(n / 40_000 - 0.25) < 0.01

    @pytest.mark.parametrize("subset", [[], [0], [3], [1, 1]])
    def test_bad_subset(self, subset):
        with pytest.raises((ValueError, IndexError)):
            sample(ground_state(2), subset, 10, seed=0)

    def test_bad_shots(self):
        with pytest.raises(ValueError):
            sample(ground_state(2), [1], 0, seed=0)


class TestHistogram:
    def test_counts_must_sum(self):
        with pytest.raises(ValueError):
            ShotHistogram({"00": 3}, shots=4, seed=0)

    def test_unknown_key(self):
        with pytest.raises(ValueError):
            ShotHistogram({"000": 4}, shots=4, seed=0, subset=(2, 3))

    def test_json_schema(self):
        hist = sample(run_thermal_experiment(2.12, 0.5), [2, 3], 100, seed=7)
        data = json.loads(hist.to_json())
        assert set(data) == {"shots", "seed", "subset", "counts"}
        assert data["subset"] == [2, 3] and data["shots"] == 100 and data["seed"] == 7
        assert set(data["counts"]) == {"00", "01", "10", "11"}
        assert ShotHistogram.from_json(hist.to_json()) == hist

    def test_external_ingest(self, tmp_path):
        path = tmp_path / "device.json"
        path.write_text(json.dumps({"shots": 10, "seed": None, "subset": [2, 3], "counts": {"00": 7, "11": 3}}))
        hist = ShotHistogram.load(path)
        assert hist.counts["01"] == 0
        rec = estimate_thermal_intensities(hist, 0.0, 2.12)
        assert rec.j0 == pytest.approx(0.4)

    def test_missing_field(self):
        with pytest.raises(ValueError):
            ShotHistogram.from_json('{"shots": 1, "counts": {"00": 1}}')


class TestPureEstimator:
    @pytest.mark.parametrize(
        "a1,a2,j0,j2", [(1, 0, 1, 0), (0.5, 0.5, 0, 0.5), (0.25, 0.75, 0.25, 0.375)]
    )
    def test_examples(self, a1, a2, j0, j2):
        rec = estimate_pure_intensities(a1, a2)
        assert rec.j0 == pytest.approx(j0, abs=1e-15)
        assert rec.j_plus2 == rec.j_minus2 == pytest.approx(j2, abs=1e-15)

    def test_two_thirds_pi_matches_analytic(self):
        a = analytic_intensities_pure(2 * math.pi / 3)
        rec = estimate_pure_intensities(0.25, 0.75)
        assert (rec.j0, rec.j2) == pytest.approx((a.j0, a.j2), abs=1e-15)

    @pytest.mark.parametrize("a1,a2", [(-0.1, 0.5), (0.7, 0.4), (0.5, -1e-3)])
    def test_out_of_range(self, a1, a2):
        with pytest.raises(ValueError):
            estimate_pure_intensities(a1, a2)

    def test_histogram_subset_checked(self):
        hist = sample(ground_state(3), [1, 2, 3], 10, seed=0)
        with pytest.raises(ValueError):
            estimate_pure_from_histogram(hist)


class TestThermalEstimator:
    def exact(self, beta, tau):
        return estimate_thermal_from_frequencies(
            exact_frequencies(run_thermal_experiment(beta, tau), [2, 3]), tau, beta, "exact-circuit"
        )

    def test_tau_zero(self):
        rec = self.exact(2.12, 0.0)
        assert rec.j0 == pytest.approx(0.785663859026943650, abs=1e-14)
        assert rec.j2 == pytest.approx(0.0, abs=1e-14)

    def test_half_pi(self):
        rec = self.exact(2.12, math.pi / 2)
        assert rec.j0 == pytest.approx(0.0, abs=1e-15)
        assert rec.j2 == pytest.approx(0.5 * math.tanh(1.06), abs=1e-15)

    def test_quarter_pi(self):
        assert self.exact(2.12, math.pi / 4).j0 == pytest.approx(0.392831929513471825, abs=1e-14)

    def test_wrong_subset(self):
        hist = sample(run_thermal_experiment(2.12, 0.1), [1, 2], 10, seed=0)
        with pytest.raises(ValueError):
            estimate_thermal_intensities(hist, 0.1, 2.12)


def test_estimator_consistency():
    for tau in TAU_GRID:
        pure = estimate_pure_from_frequencies(exact_frequencies(run_pure_experiment(tau), [1, 2]), tau)
        ref = analytic_intensities_pure(tau)
        assert abs(pure.j0 - ref.j0) < 1e-12 and abs(pure.j2 - ref.j2) < 1e-12
        for beta in (0.5, 2.12, 5.0):
            freqs = exact_frequencies(run_thermal_experiment(beta, tau), [2, 3])
            rec = estimate_thermal_from_frequencies(freqs, tau, beta)
            ref = analytic_intensities_thermal(beta, tau)
            assert abs(rec.j0 - ref.j0) < 1e-12 and abs(rec.j2 - ref.j2) < 1e-12


# The plug-in (2 a1 - 1)^2 has bias 4 a1 (1 - a1) / shots, which dominates the
# standard error of a 200-run mean near a1 = 1/2; those taus are left out of the
# pure-state mean check below.
@pytest.mark.parametrize("tau", [0.0, math.pi / 6, math.pi / 3, 2 * math.pi / 3, 7 * math.pi / 6])
def test_statistical_soundness_pure(tau):
    shots, reps = 4096, 200
    psi = run_pure_experiment(tau)
    ref = analytic_intensities_pure(tau)
    recs = [estimate_pure_from_histogram(sample(psi, [1, 2], shots, seed=s), tau) for s in range(reps)]
    for attr in ("j0", "j2"):
        vals = np.array([getattr(r, attr) for r in recs])
        sd = vals.std(ddof=1)
        assert sd <= 2 / math.sqrt(shots)
        assert abs(vals.mean() - getattr(ref, attr)) <= 3 * sd / math.sqrt(reps) + 1e-15


@pytest.mark.parametrize("tau", [0.0, math.pi / 4, math.pi / 2, 2.0, math.pi])
def test_statistical_soundness_thermal(tau):
    shots, reps, beta = 4096, 200, 2.12
    psi = run_thermal_experiment(beta, tau)
    ref = analytic_intensities_thermal(beta, tau)
    recs = [estimate_thermal_intensities(sample(psi, [2, 3], shots, seed=s), tau, beta) for s in range(reps)]
    for attr in ("j0", "j2"):
        vals = np.array([getattr(r, attr) for r in recs])
        sd = vals.std(ddof=1)
        assert sd <= 2 / math.sqrt(shots)
        assert abs(vals.mean() - getattr(ref, attr)) <= 3 * sd / math.sqrt(reps) + 1e-15


class TestDepolarizing:
    def test_zero_probability(self, rng):
        rho = random_density(rng, 3)
        assert apply_depolarizing(rho, [1, 3], 0.0) is rho

    def test_full_on_all_qubits(self, rng):
        rho = random_density(rng, 3)
        np.testing.assert_allclose(apply_depolarizing(rho, [1, 2, 3], 1.0).elements, np.eye(8) / 8, atol=1e-15)

    @pytest.mark.parametrize("acted", [[1], [3], [2, 3], [3, 1], [1, 2, 3]])
    def test_matches_pauli_twirl(self, rng, acted):
        rho = random_density(rng, 3)
        got = apply_depolarizing(rho, acted, 0.3)
        np.testing.assert_allclose(got.elements, twirl_depolarize(rho.elements, 3, acted, 0.3), atol=1e-14)
        got.validate()

    def test_keeps_rest_marginal(self, rng):
        from mqdimer.state import partial_trace

        rho = random_density(rng, 3)
        out = apply_depolarizing(rho, [2], 0.7)
        np.testing.assert_allclose(partial_trace(out, [1, 3]).elements, partial_trace(rho, [1, 3]).elements, atol=1e-14)

    @pytest.mark.parametrize("p", [-0.1, 1.5, math.nan])
    def test_invalid_p(self, p):
        with pytest.raises(ValueError):
            apply_depolarizing(maximally_mixed(1), [1], p)
        with pytest.raises(ValueError):
            NoiseModel(p)


class TestNoisyPipeline:
    def test_noiseless_matches_statevector(self):
        for tau in (0.3, 2.0):
            circ = thermal_full_circuit(2.12, tau)
            np.testing.assert_allclose(
                run_noisy_circuit(circ).elements,
                density_from_pure(run_circuit(circ)).elements,
                atol=1e-14,
            )

    def test_matches_oracle(self):
        for circ in (pure_ground_circuit(1.1), thermal_full_circuit(2.12, 0.7)):
            np.testing.assert_allclose(
                run_noisy_circuit(circ, NoiseModel(0.05)).elements, oracle_noisy(circ, 0.05), atol=1e-13
            )

    def test_pure_half_pi_deviation_is_order_p(self):
        p, tau = 0.02, math.pi / 2
        rho = oracle_noisy(pure_ground_circuit(tau), p)
        freqs = np.real(np.diag(rho))
        expected = estimate_pure_intensities(freqs[0], freqs[3]).j0
        got = estimate_pure_from_frequencies(
            exact_frequencies(run_noisy_circuit(pure_ground_circuit(tau), NoiseModel(p)), [1, 2])
        ).j0
        assert got == pytest.approx(expected, abs=1e-14)
        assert 0 < got < p

    def test_noise_monotonicity(self):
        for tau in TAU_GRID:
            defects_pure, defects_thermal = [], []
            for p in (0.0, 0.01, 0.05):
                noise = NoiseModel(p)
                f = exact_frequencies(run_noisy_circuit(pure_ground_circuit(tau), noise), [1, 2])
                defects_pure.append(abs(estimate_pure_from_frequencies(f).total - 1.0))
                f = exact_frequencies(run_noisy_circuit(thermal_full_circuit(2.12, tau), noise), [2, 3])
                rec = estimate_thermal_from_frequencies(f, tau, 2.12)
                defects_thermal.append(abs(rec.total - math.tanh(1.06)))
            for defects in (defects_pure, defects_thermal):
                assert all(b >= a - 1e-15 for a, b in zip(defects, defects[1:]))
            # J2 is reconstructed from the conservation law, so the thermal defect is zero
            assert max(defects_thermal) < 1e-15

    def test_pure_tau_zero_closed_form(self):
        # after Rx(0) and depolarizing q1: P(q1=0) = 1 - p/2; after CX and the
        # two-qubit channel: a1 = (1-p)(1-p/2) + p/4
        p = 0.02
        a1 = (1 - p) * (1 - p / 2) + p / 4
        f = exact_frequencies(run_noisy_circuit(pure_ground_circuit(0.0), NoiseModel(p)), [1, 2])
        assert f["00"] == pytest.approx(a1, abs=1e-15)
        assert 1 - estimate_pure_from_frequencies(f).j0 == pytest.approx(1 - (2 * a1 - 1) ** 2, abs=1e-14)
        assert 1 - (2 * a1 - 1) ** 2 > 0.096

    def test_trace_and_positivity(self):
        rho = run_noisy_circuit(thermal_full_circuit(2.12, 1.0), NoiseModel(0.1))
        rho.validate()
        assert np.trace(rho.elements).real == pytest.approx(1.0, abs=1e-12)
