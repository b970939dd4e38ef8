import numpy as np
import pytest

from polyscope import (
    ALNSpec,
    Ensemble,
    FrequencyGrid,
    InsufficientDataError,
    InvalidParameterError,
    Link,
    WelchConfig,
    analytic_spectra,
    check_identifiability,
    coherence_distance,
    coherence_function,
    generate_polytree_aln,
    run_recovery,
    simulate,
    spectral_matrix,
)

from oracles import path_transfer_spectra


def chain_spec(taps_a=(0.9, 0.4), taps_b=(0.7, -0.5)):
    return ALNSpec(["X1", "X2", "X3"],
                   [Link(0, 1, np.array(taps_a)),
                    Link(1, 2, np.array(taps_b))],
                   np.ones(3))


def collider_spec():
    return ALNSpec(["X1", "X2", "X3"],
                   [Link(0, 2, np.array([0.9, 0.4])),
                    Link(1, 2, np.array([-0.8, 0.3]))],
                   np.ones(3))


class TestLink:
    def test_support(self):
        assert Link(0, 1, np.array([1.0, 0.5])).support == 1
        assert Link(0, 1, np.array([1.0, 0.5]), delay=1).support == 2

    def test_rejects_empty_or_zero_taps(self):
        with pytest.raises(InvalidParameterError):
            Link(0, 1, np.array([]))
        with pytest.raises(InvalidParameterError):
            Link(0, 1, np.zeros(3))

    def test_rejects_long_delay(self):
        with pytest.raises(InvalidParameterError):
            Link(0, 1, np.array([1.0]), delay=2)


class TestALNSpec:
    def test_rejects_duplicate_labels(self):
        with pytest.raises(InvalidParameterError):
            ALNSpec(["a", "a"], [Link(0, 1, np.array([1.0]))], np.ones(2))

    def test_rejects_wrong_variance_count(self):
        with pytest.raises(InvalidParameterError):
            ALNSpec(["a", "b"], [Link(0, 1, np.array([1.0]))], np.ones(3))

    def test_rejects_negative_variance(self):
        with pytest.raises(InvalidParameterError):
            ALNSpec(["a", "b"], [Link(0, 1, np.array([1.0]))],
                    np.array([1.0, -0.5]))

    def test_skeleton_must_be_tree(self):
        links = [Link(0, 1, np.array([1.0])), Link(1, 2, np.array([1.0])),
                 Link(2, 0, np.array([1.0]))]
        with pytest.raises(InvalidParameterError):
            ALNSpec(["a", "b", "c"], links, np.ones(3))

    def test_topological_order_respects_links(self):
        spec = collider_spec()
        order = spec.topological_order()
        assert order.index(2) > order.index(0)
        assert order.index(2) > order.index(1)
        assert sorted(order) == [0, 1, 2]

    def test_parents_of(self):
        spec = collider_spec()
        assert {l.source for l in spec.parents_of(2)} == {0, 1}
        assert spec.parents_of(0) == []

    def test_json_roundtrip(self):
        spec = ALNSpec(["a", "b"],
                       [Link(0, 1, np.array([0.3, -0.2]), delay=1)],
                       np.array([1.5, 0.5]),
                       noise_shaping=[np.array([1.0, 0.9]), None],
                       seed=42)
        back = ALNSpec.from_json(spec.to_json())
        assert back.labels == spec.labels
        assert back.seed == 42
        np.testing.assert_array_equal(back.noise_variances,
                                      spec.noise_variances)
        np.testing.assert_array_equal(back.links[0].taps, spec.links[0].taps)
        assert back.links[0].delay == 1
        np.testing.assert_array_equal(back.noise_shaping[0],
                                      spec.noise_shaping[0])
        assert back.noise_shaping[1] is None
        assert back.to_json() == spec.to_json()


class TestGeneratePolytree:
    def test_deterministic(self):
        a = generate_polytree_aln(8, seed=3)
        b = generate_polytree_aln(8, seed=3)
        assert a.to_json() == b.to_json()

    def test_seeds_differ(self):
        a = generate_polytree_aln(8, seed=3)
        b = generate_polytree_aln(8, seed=4)
        assert a.to_json() != b.to_json()

    def test_structure(self):
        for seed in range(5):
            spec = generate_polytree_aln(9, seed=seed)
            assert spec.labels == [f"X{i}" for i in range(1, 10)]
            assert len(spec.links) == 8
            spec.to_polytree()          # tree shape validated inside
            assert np.all(spec.noise_variances >= 0.5)
            assert np.all(spec.noise_variances <= 2.0)
            for link in spec.links:
                assert 1 <= link.taps.size <= 4
                assert np.max(np.abs(link.taps)) >= 0.2
                assert link.delay in (0, 1)

    def test_too_small(self):
        with pytest.raises(InvalidParameterError):
            generate_polytree_aln(1, seed=0)


class TestSimulate:
    def test_too_short_raises(self):
        with pytest.raises(InsufficientDataError):
            simulate(chain_spec(), length=512, seed=0)

    def test_deterministic(self):
        spec = generate_polytree_aln(4, seed=7)
        a = simulate(spec, 2048, seed=1).ensemble.values()
        b = simulate(spec, 2048, seed=1).ensemble.values()
        np.testing.assert_array_equal(a, b)
        c = simulate(spec, 2048, seed=2).ensemble.values()
        assert not np.array_equal(a, c)

    def test_burn_in_covers_path_support(self):
        spec = chain_spec()             # two links of support 1 each
        result = simulate(spec, 1024, seed=0)
        assert result.burn_in == 4 * 2 + 16
        assert result.ensemble.length == 1024

    def test_child_is_exact_fir_of_parent(self):
        # with a noiseless child the link identity holds sample by sample
        taps = np.array([0.5, -0.25, 0.125])
        spec = ALNSpec(["p", "c"], [Link(0, 1, taps, delay=1)],
                       np.array([1.0, 0.0]))
        sim = simulate(spec, 4096, seed=9)
        parent, child = sim.ensemble.values()
        conv = np.convolve(parent, taps)
        support = spec.links[0].support          # = 3
        np.testing.assert_allclose(child[support:],
                                   conv[support - 1:4096 - 1],
                                   rtol=0, atol=1e-12)

    def test_raw_samples_not_demeaned(self):
        spec = chain_spec()
        ens = simulate(spec, 2048, seed=3).ensemble
        # raw Gaussian sample paths almost surely have non-zero sample mean
        assert np.max(np.abs(ens.values().mean(axis=1))) > 1e-12


class TestAnalyticSpectra:
    def test_matches_path_product_oracle(self):
        grid = FrequencyGrid(128)
        for seed in range(5):
            spec = generate_polytree_aln(6, seed=seed)
            S = analytic_spectra(spec, grid)
            ref = path_transfer_spectra(spec, grid)
            np.testing.assert_allclose(S.values, ref, atol=1e-10)

    def test_oracle_agrees_with_noise_shaping(self):
        grid = FrequencyGrid(128)
        spec = ALNSpec(["a", "b"], [Link(0, 1, np.array([0.8]))],
                       np.array([1.0, 0.3]),
                       noise_shaping=[np.array([1.0, 0.5]), None])
        S = analytic_spectra(spec, grid)
        np.testing.assert_allclose(S.values,
                                   path_transfer_spectra(spec, grid),
                                   atol=1e-12)
        shaped = np.abs(grid.response_from_taps(np.array([1.0, 0.5]))) ** 2
        np.testing.assert_allclose(np.real(S.values[0, 0]), shaped,
                                   atol=1e-12)

    def test_positive_semidefinite(self):
        grid = FrequencyGrid(64)
        spec = generate_polytree_aln(5, seed=11)
        S = analytic_spectra(spec, grid)
        eigs = np.linalg.eigvalsh(S.values.transpose(2, 0, 1))
        assert np.min(eigs) >= -1e-10

    def test_root_spectrum_is_its_noise(self):
        grid = FrequencyGrid(64)
        S = analytic_spectra(collider_spec(), grid)
        np.testing.assert_allclose(np.real(S.values[0, 0]), 1.0, atol=1e-12)

    def test_welch_estimate_approaches_analytic(self):
        spec = chain_spec()
        grid = FrequencyGrid(256)
        S_true = analytic_spectra(spec, grid)
        sim = simulate(spec, 2 ** 16, seed=21)
        cfg = WelchConfig(grid_size=256, segment_length=256)
        S_hat = spectral_matrix(sim.ensemble, cfg)
        for i in range(3):
            rel = np.abs(np.real(S_hat.values[i, i]) -
                         np.real(S_true.values[i, i])) \
                / np.real(S_true.values[i, i])
            assert float(np.mean(rel)) < 0.15


class TestCoherenceStructure:
    def test_multiplicative_along_chain(self):
        grid = FrequencyGrid(256)
        S = analytic_spectra(chain_spec(), grid)
        c12 = coherence_function(S, 0, 1).values
        c23 = coherence_function(S, 1, 2).values
        c13 = coherence_function(S, 0, 2).values
        np.testing.assert_allclose(c13, c12 * c23, atol=1e-10)

    def test_coparents_exactly_independent(self):
        grid = FrequencyGrid(256)
        S = analytic_spectra(collider_spec(), grid)
        np.testing.assert_allclose(coherence_function(S, 0, 1).values, 0.0,
                                   atol=1e-14)
        assert coherence_distance(S, 0, 1) == pytest.approx(1.0, abs=1e-12)


class TestIdentifiability:
    def test_generated_networks_pass(self):
        for seed in range(5):
            spec = generate_polytree_aln(6, seed=seed)
            report = check_identifiability(spec, FrequencyGrid(256))
            assert report.passed
            assert report.violations == []

    def test_dead_noise_fails_every_tuple_naming_it(self):
        spec = ALNSpec(["X1", "X2", "X3"],
                       [Link(0, 1, np.array([0.9])),
                        Link(1, 2, np.array([0.7]))],
                       np.array([1.0, 1.0, 0.0]))
        report = check_identifiability(spec, FrequencyGrid(128))
        assert not report.passed
        assert all(k == 2 for (_, _, k) in report.violations)
        assert (0, 0, 2) in report.violations
        assert len(report.worst_offenders(2)) == 2

    def test_collider_coparents_exempt(self):
        report = check_identifiability(collider_spec(), FrequencyGrid(128))
        assert report.passed
        assert report.exempt_pairs == 1


class TestRunRecovery:
    def test_analytic_chain_every_pipeline(self):
        spec = chain_spec()
        for pipeline in ("mst-coherence", "polytree-causal", "miso-blanket"):
            report = run_recovery(spec, mode="analytic", pipeline=pipeline,
                                  cfg=WelchConfig(grid_size=256))
            assert report.precision == 1.0
            assert report.recall == 1.0
            assert report.recovered_edges == [(0, 1), (1, 2)]
            if pipeline == "polytree-causal":
                assert report.direction_accuracy == 1.0
            else:
                assert report.direction_accuracy is None

    def test_simulated_recovery_deterministic_and_exact(self):
        spec = generate_polytree_aln(5, seed=2)
        kwargs = dict(mode="simulated", pipeline="mst-coherence",
                      length=2 ** 15, seed=6,
                      cfg=WelchConfig(grid_size=512, segment_length=512))
        first = run_recovery(spec, **kwargs)
        second = run_recovery(spec, **kwargs)
        assert first.to_json() == second.to_json()
        assert first.precision == 1.0 and first.recall == 1.0

    def test_simulated_needs_seed(self):
        with pytest.raises(InvalidParameterError):
            run_recovery(chain_spec(), mode="simulated")

    def test_unknown_mode_and_pipeline(self):
        with pytest.raises(InvalidParameterError):
            run_recovery(chain_spec(), mode="exact")
        with pytest.raises(InvalidParameterError):
            run_recovery(chain_spec(), pipeline="mst")

    def test_report_json_fields(self):
        report = run_recovery(chain_spec(), pipeline="polytree-causal",
                              cfg=WelchConfig(grid_size=256))
        import json
        payload = json.loads(report.to_json())
        assert payload["mode"] == "analytic"
        assert payload["true_edges"] == [[0, 1], [1, 2]]
        assert payload["tie_count"] == 0
