"""Tests for the assembled dense coding protocol."""

import json

import numpy as np
import pytest

from src.coding import MessageIndex
from src.config import INCONCLUSIVE, RESIDUAL
from src.protocol import (
    AnalysisReport,
    DenseCodingProtocol,
    ProtocolConfig,
    SimulationStats,
    TrialRecord,
    analyze,
    run_trial,
    simulate,
)
from src.states import SchmidtState


def within_four_sigma(stats, expected):
    return abs(stats.success_rate - expected) <= 4 * max(stats.stderr, 1e-12)


class TestProtocolConfig:
    """Test configuration validation."""

    def test_D_from_spectrum(self):
        """Test that D is the spectrum length."""
        config = ProtocolConfig(d=2, spectrum=(0.5, 0.3, 0.2))
        assert config.D == 3
        assert config.to_dict()["D"] == 3

    def test_d_larger_than_D(self):
        """Test that d > D is rejected."""
        with pytest.raises(ValueError, match="2 <= d <= D"):
            ProtocolConfig(d=3, spectrum=(0.5, 0.5))

    def test_invalid_spectrum(self):
        """Test that a spectrum with a bad sum is rejected."""
        with pytest.raises(ValueError, match="sums to"):
            ProtocolConfig(d=2, spectrum=(0.5, 0.4))

    def test_seed_range(self):
        """Test the 64-bit seed range."""
        with pytest.raises(ValueError, match="64-bit"):
            ProtocolConfig(d=2, spectrum=(0.5, 0.5), seed=2**64)

    def test_unknown_scheme(self):
        """Test that the scheme must be registered."""
        with pytest.raises(ValueError, match="Unsupported scheme"):
            ProtocolConfig(d=2, spectrum=(0.5, 0.5), scheme="bell")

    def test_resource_dimension_cap(self):
        """Test that spectra longer than MAX_DIMENSION are rejected before validation."""
        with pytest.raises(ValueError, match="exceeds"):
            ProtocolConfig(d=2, spectrum=(1.0 / 13,) * 13)

    def test_key_ignores_trials_and_seed(self):
        """Test that the cache key only holds measurement-defining fields."""
        a = ProtocolConfig(d=2, spectrum=(0.8, 0.2), trials=10, seed=1)
        b = ProtocolConfig(d=2, spectrum=(0.8, 0.2), trials=99, seed=7)
        assert a.key == b.key


class TestAnalyze:
    """Test analytic reports."""

    def test_partially_entangled_qubits(self):
        """Test (0.8, 0.2): bound = achievable = 0.4."""
        report = analyze(ProtocolConfig(d=2, spectrum=(0.8, 0.2)))
        assert report.paper_bound == pytest.approx(0.4, abs=1e-12)
        assert report.achievable_gamma == pytest.approx(0.4, abs=1e-12)
        assert report.entropy_ebits == pytest.approx(0.7219, abs=1e-4)
        assert report.residual_probability == pytest.approx(0.0, abs=1e-15)
        assert report.linearly_independent
        assert report.simulation is None

    def test_embedded_maximally_entangled(self):
        """Test d=2, D=4 uniform: bound = achievable = 1/2."""
        report = analyze(ProtocolConfig(d=2, spectrum=SchmidtState.uniform(4).spectrum))
        assert report.paper_bound == pytest.approx(0.5, abs=1e-12)
        assert report.achievable_gamma == pytest.approx(0.5, abs=1e-12)
        assert report.residual_probability == pytest.approx(0.5)
        assert report.per_subspace_gamma == pytest.approx((1.0, 1.0))

    def test_square_maximally_entangled(self):
        """Test d = D = 3 uniform: everything is 1."""
        report = analyze(ProtocolConfig(d=3, spectrum=SchmidtState.uniform(3).spectrum))
        assert report.paper_bound == pytest.approx(1.0, abs=1e-12)
        assert report.achievable_gamma == pytest.approx(1.0, abs=1e-12)
        assert report.entropy_ebits == pytest.approx(np.log2(3), abs=1e-12)
        assert report.gram_spectrum == pytest.approx((1.0,) * 9, abs=1e-12)

    def test_achievable_is_d_min_head(self):
        """Test achievable = d * min_{k<d} p_k for a non-uniform embedded resource."""
        report = analyze(ProtocolConfig(d=2, spectrum=(0.5, 0.3, 0.2)))
        assert report.achievable_gamma == pytest.approx(0.6, abs=1e-12)
        assert report.residual_probability == pytest.approx(0.2)

    def test_optimized_not_below_achievable(self):
        """Test the informational non-uniform optimum."""
        report = analyze(ProtocolConfig(d=3, spectrum=(0.5, 0.3, 0.2)))
        assert report.optimized_gamma >= report.achievable_gamma - 1e-9

    def test_pauli_scheme_matches_weyl(self):
        """Test that the Pauli encoding reaches the same rate as Weyl d=2."""
        weyl = analyze(ProtocolConfig(d=2, spectrum=(0.7, 0.3)))
        pauli = analyze(ProtocolConfig(d=2, spectrum=(0.7, 0.3), scheme="pauli"))
        assert pauli.achievable_gamma == pytest.approx(weyl.achievable_gamma, abs=1e-12)

    def test_keeps_outcome_tables_not_measurements(self):
        """Test that a built protocol holds no stage-two POVMs, only sampling tables."""
        protocol = DenseCodingProtocol(ProtocolConfig(d=3, spectrum=(0.4, 0.3, 0.2, 0.1)))
        assert not hasattr(protocol, "subspace_povms")
        assert protocol.stage1_cdf.shape == (9, 4)
        assert protocol.stage2_cdf.shape == (9, 3, 4)
        assert protocol.analyze().achievable_gamma == pytest.approx(0.6, abs=1e-12)

    def test_json_key_order(self):
        """Test that the report serializes with the stable leading keys."""
        report = analyze(ProtocolConfig(d=2, spectrum=(0.8, 0.2)))
        keys = list(json.loads(json.dumps(report.to_dict())).keys())
        assert keys[:6] == [
            "config", "entropy_ebits", "gram_spectrum", "paper_bound", "achievable_gamma", "simulation",
        ]
        assert isinstance(report, AnalysisReport)


class TestRunTrial:
    """Test single encode/decode rounds."""

    def test_maximally_entangled_always_correct(self):
        """Test ell = 1: every trial is conclusive and correct."""
        config = ProtocolConfig(d=2, spectrum=(0.5, 0.5))
        rng = np.random.default_rng(0)
        for index in range(4):
            message = MessageIndex.from_flat(index, 2)
            for _ in range(25):
                record = run_trial(config, message, rng)
                assert record.conclusive
                assert record.correct
                assert record.stage1 == message.m

    def test_product_state_never_conclusive(self):
        """Test ell = 0: the subspace states coincide, so stage two never concludes."""
        protocol = DenseCodingProtocol(ProtocolConfig(d=2, spectrum=(1.0, 0.0)))
        rng = np.random.default_rng(1)
        records = [protocol.run_trial(MessageIndex(m, n), rng) for m in range(2) for n in range(2) for _ in range(20)]
        assert all(record.outcome == INCONCLUSIVE for record in records)
        assert protocol.achievable_gamma == 0.0

    def test_residual_outcome(self):
        """Test that a residual click is reported and inconclusive."""
        protocol = DenseCodingProtocol(ProtocolConfig(d=2, spectrum=SchmidtState.uniform(4).spectrum))
        rng = np.random.default_rng(2)
        records = [protocol.run_trial(MessageIndex(0, 1), rng) for _ in range(200)]
        residual = [r for r in records if r.stage1 == RESIDUAL]
        assert residual
        assert all(r.outcome == INCONCLUSIVE for r in residual)
        assert all(r.correct for r in records if r.conclusive)

    def test_trial_record(self):
        """Test the record helpers."""
        record = TrialRecord(sent=MessageIndex(1, 0), stage1=1, outcome=MessageIndex(1, 0))
        assert record.conclusive and record.correct


class TestSimulate:
    """Test seeded Monte Carlo runs."""

    def test_matches_analytic_rate(self):
        """Test (0.8, 0.2) over 1e5 trials lands within 4 sigma of 0.4."""
        stats = simulate(ProtocolConfig(d=2, spectrum=(0.8, 0.2), trials=100_000, seed=7))
        assert within_four_sigma(stats, 0.4)
        assert stats.misdecoded == 0
        assert stats.residual == 0

    def test_embedded_rate(self):
        """Test d=2, D=3 maximally entangled lands within 4 sigma of 2/3."""
        stats = simulate(ProtocolConfig(d=2, spectrum=SchmidtState.uniform(3).spectrum, trials=100_000, seed=3))
        assert within_four_sigma(stats, 2 / 3)
        assert stats.misdecoded == 0

    def test_stage1_frequencies(self):
        """Test subspace and residual frequencies against the head and tail weights."""
        trials = 100_000
        stats = simulate(ProtocolConfig(d=2, spectrum=(0.5, 0.3, 0.2), trials=trials, seed=5))
        expected = [0.4, 0.4]
        for count, p in zip(stats.stage1_counts, expected):
            sigma = np.sqrt(p * (1 - p) / trials)
            assert abs(count / trials - p) <= 4 * sigma
        sigma = np.sqrt(0.2 * 0.8 / trials)
        assert abs(stats.residual / trials - 0.2) <= 4 * sigma

    def test_reproducible(self):
        """Test identical stats for identical (config, seed)."""
        config = ProtocolConfig(d=3, spectrum=(0.5, 0.3, 0.2), trials=25_000, seed=42)
        assert simulate(config) == simulate(config)

    def test_independent_of_workers(self):
        """Test that the worker count does not change the result."""
        serial = ProtocolConfig(d=2, spectrum=(0.6, 0.4), trials=35_000, seed=9, workers=1)
        parallel = ProtocolConfig(d=2, spectrum=(0.6, 0.4), trials=35_000, seed=9, workers=4)
        assert simulate(serial) == simulate(parallel)

    def test_seed_changes_result(self):
        """Test that different seeds give different tallies."""
        a = simulate(ProtocolConfig(d=2, spectrum=(0.6, 0.4), trials=20_000, seed=1))
        b = simulate(ProtocolConfig(d=2, spectrum=(0.6, 0.4), trials=20_000, seed=2))
        assert a.per_message != b.per_message

    def test_per_message_totals(self):
        """Test that per-message tallies add up."""
        stats = simulate(ProtocolConfig(d=2, spectrum=(0.7, 0.3), trials=12_345, seed=0))
        assert sum(t for _, t in stats.per_message) == 12_345
        assert sum(c for c, _ in stats.per_message) == stats.conclusive
        assert len(stats.per_message) == 4

    def test_maximally_entangled_rate_is_one(self):
        """Test that a maximally entangled qubit pair decodes every trial."""
        stats = simulate(ProtocolConfig(d=2, spectrum=(0.5, 0.5), trials=1000, seed=1))
        assert stats.success_rate == 1.0

    def test_zero_trials_rejected(self):
        """Test that simulate needs at least one trial."""
        with pytest.raises(ValueError, match="at least one trial"):
            simulate(ProtocolConfig(d=2, spectrum=(0.5, 0.5), trials=0))


class TestSimulationStats:
    """Test the stats record."""

    def test_rate_and_stderr(self):
        """Test success_rate = conclusive/trials and the binomial stderr."""
        stats = SimulationStats(
            trials=100, conclusive=40, per_message=((40, 100),), stage1_counts=(100,),
            residual=0, misdecoded=0, seed=0,
        )
        assert stats.success_rate == 0.4
        assert stats.stderr == pytest.approx(np.sqrt(0.4 * 0.6 / 100))
        assert stats.to_dict()["success_rate"] == 0.4

    def test_conclusive_bounded_by_trials(self):
        """Test that conclusive > trials is rejected."""
        with pytest.raises(ValueError):
            SimulationStats(
                trials=1, conclusive=2, per_message=(), stage1_counts=(), residual=0, misdecoded=0, seed=0,
            )
