"""End-to-end acceptance gate.

One test per advertised guarantee, each printing a single summary line with
the measured values next to the asserted bound.  Run with ``pytest -v`` to
get one pass/fail line per criterion.
"""

import json
import time

import numpy as np

from polyscope import (
    FrequencyGrid,
    WelchConfig,
    analytic_spectra,
    causal_distance_matrix,
    correlation_distance_matrix,
    distance_matrix,
    Ensemble,
    generate_polytree_aln,
    markov_blanket,
    matching_pursuit,
    minimum_spanning_tree,
    noncausal_wiener,
    orthogonal_least_squares,
    run_recovery,
    sparse_exhaustive,
    spectral_factorize,
    spectral_matrix,
    Spectrum,
    TimeSeries,
)
from polyscope import cli
from polyscope.cli import _draw_identifiable

from oracles import (
    make_two_sparse_instance,
    min_tree_bruteforce,
    random_psd_matrix,
    rooting_spectral_factor,
)


def _report(num: int, text: str) -> None:
    print(f"[criterion {num:02d}] {text}")


def test_criterion_01_analytic_mst_exact_recovery():
    # 200 random identifiable networks, n in 4..16, exact undirected
    # recovery from analytic spectra, zero tolerance, under 2 minutes.
    grid = FrequencyGrid(1024)
    cfg = WelchConfig()
    start = time.perf_counter()
    exact = 0
    for trial in range(200):
        spec, _ = _draw_identifiable(101, trial, 4, 16, grid)
        rep = run_recovery(spec, mode="analytic", pipeline="mst-coherence",
                           cfg=cfg)
        if rep.precision == 1.0 and rep.recall == 1.0:
            exact += 1
    elapsed = time.perf_counter() - start
    _report(1, f"{exact}/200 trials exact (need 200), "
               f"elapsed {elapsed:.1f}s (budget 120s)")
    assert exact == 200
    assert elapsed < 120.0


def test_criterion_02_simulated_recovery_rates():
    # 50 simulated records, n = 8, length 2^17, Welch defaults: mean
    # precision and recall at least 0.95, under 10 minutes.
    grid = FrequencyGrid(1024)
    cfg = WelchConfig()
    start = time.perf_counter()
    precisions, recalls = [], []
    for trial in range(50):
        spec, sim_seed = _draw_identifiable(202, trial, 8, 8, grid)
        rep = run_recovery(spec, mode="simulated", pipeline="mst-coherence",
                           length=2 ** 17, seed=sim_seed, cfg=cfg)
        precisions.append(rep.precision)
        recalls.append(rep.recall)
    elapsed = time.perf_counter() - start
    mean_p = float(np.mean(precisions))
    mean_r = float(np.mean(recalls))
    _report(2, f"mean precision {mean_p:.4f}, mean recall {mean_r:.4f} "
               f"(need >= 0.95), elapsed {elapsed:.1f}s (budget 600s)")
    assert mean_p >= 0.95
    assert mean_r >= 0.95
    assert elapsed < 600.0


def test_criterion_03_blanket_zeros():
    # filters outside the Markov blanket vanish relative to the blanket,
    # for every target of 50 random networks with n <= 10.
    grid = FrequencyGrid(256)
    worst = 0.0
    checked = 0
    for s in range(50):
        n = 4 + s % 7                       # 4..10
        spec = generate_polytree_aln(n, seed=3000 + s)
        S = analytic_spectra(spec, grid)
        tree = spec.to_polytree()
        for j in range(n):
            inputs = [i for i in range(n) if i != j]
            sol = noncausal_wiener(S, j, inputs)
            blanket = markov_blanket(tree, j)
            rms = {i: sol.filters[i].rms() for i in inputs}
            inside = max(rms[i] for i in blanket)
            outside = [rms[i] for i in inputs if i not in blanket]
            if not outside:
                continue
            ratio = max(outside) / inside
            worst = max(worst, ratio)
            checked += 1
            assert ratio <= 1e-6
    _report(3, f"{checked} target solves, worst off-blanket/in-blanket "
               f"RMS ratio {worst:.2e} (need <= 1e-6)")
    assert checked > 0


def test_criterion_04_pseudo_metric_properties():
    # 500 triples from random rational spectra: symmetry and zero diagonal
    # exact, triangle inequality within 1e-8, range within [0, 1 + 1e-9].
    rng = np.random.default_rng(404)
    grid = FrequencyGrid(256)
    triples = 0
    worst_breach = -np.inf
    for _ in range(50):
        S = random_psd_matrix(rng, 5, grid)
        D = distance_matrix(S).values
        assert np.array_equal(D, D.T)
        assert np.all(np.diag(D) == 0.0)
        assert np.all(D >= 0.0)
        assert np.all(D <= 1.0 + 1e-9)
        for i in range(5):
            for j in range(i + 1, 5):
                for k in range(j + 1, 5):
                    triples += 1
                    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                        breach = D[a, b] - D[a, c] - D[c, b]
                        worst_breach = max(worst_breach, breach)
                        assert breach <= 1e-8
    _report(4, f"{triples} triples (need 500), worst triangle breach "
               f"{worst_breach:.2e} (tolerance 1e-8)")
    assert triples == 500


def test_criterion_05_causal_dominance():
    # one-sided modelling distance never beats the unconstrained one.
    grid = FrequencyGrid(256)
    worst = np.inf
    for s in range(50):
        n = 4 + s % 5                       # 4..8
        spec = generate_polytree_aln(n, seed=5000 + s)
        S = analytic_spectra(spec, grid)
        D = distance_matrix(S).values
        DC = causal_distance_matrix(S).values
        margin = float(np.min(DC - D))      # D is symmetric
        worst = min(worst, margin)
        assert np.all(DC >= D - 1e-6)
    _report(5, f"50 specs, worst causal-minus-coherence margin "
               f"{worst:.2e} (need >= -1e-6)")


def _random_min_phase_taps(rng, order):
    roots = []
    remaining = order
    while remaining > 0:
        if remaining >= 2 and rng.random() < 0.5:
            radius = rng.uniform(0.1, 0.7)
            theta = rng.uniform(0.05, np.pi - 0.05)
            roots.append(radius * np.exp(1j * theta))
            roots.append(radius * np.exp(-1j * theta))
            remaining -= 2
        else:
            sign = 1.0 if rng.random() < 0.5 else -1.0
            roots.append(sign * rng.uniform(0.1, 0.7))
            remaining -= 1
    return np.real(np.poly(roots)) * rng.uniform(0.5, 2.0)


def test_criterion_06_spectral_factorization():
    # cepstral factor vs its own spectrum (round trip) and vs an
    # independent polynomial-rooting oracle, 100 random MA spectra.
    rng = np.random.default_rng(606)
    grid = FrequencyGrid(512)
    worst_round = 0.0
    worst_tap = 0.0
    for s in range(100):
        order = 1 + s % 6                   # 1..6
        taps = _random_min_phase_taps(rng, order)
        phi = np.abs(grid.response_from_taps(taps)) ** 2
        F = spectral_factorize(Spectrum(grid, phi))
        round_err = float(np.max(np.abs(np.abs(F.response) ** 2 - phi) / phi))
        oracle = rooting_spectral_factor(phi, grid, order)
        tap_err = float(np.max(np.abs(F.impulse[:order + 1] - oracle)))
        worst_round = max(worst_round, round_err)
        worst_tap = max(worst_tap, tap_err)
        assert round_err <= 1e-6
        assert tap_err <= 1e-6
    _report(6, f"100 spectra, worst round-trip rel error {worst_round:.2e}, "
               f"worst per-tap oracle error {worst_tap:.2e} (need <= 1e-6)")


def test_criterion_07_mst_bruteforce_equivalence():
    # Kruskal equals exhaustive spanning-tree enumeration, 100 matrices.
    from polyscope import DistanceMatrix
    rng = np.random.default_rng(707)
    hits = 0
    for t in range(100):
        n = 2 + t % 5                       # 2..6
        vals = rng.uniform(0.05, 1.0, size=(n, n))
        vals = 0.5 * (vals + vals.T)
        np.fill_diagonal(vals, 0.0)
        W = DistanceMatrix([f"N{i}" for i in range(n)], vals, "noncausal")
        tree = minimum_spanning_tree(W)
        optima = min_tree_bruteforce(vals)
        assert frozenset(tree.edges) in optima
        hits += 1
    _report(7, f"{hits}/100 matrices matched the brute-force optimum")
    assert hits == 100


def test_criterion_08_sparse_solver_oracle():
    # solver ordering on every correlated instance, and perfect support
    # recovery by OLS on well-separated 2-sparse constructions.
    ordered = 0
    for seed in range(50):
        S, target, _ = make_two_sparse_instance(seed, correlated=True)
        exh = sparse_exhaustive(S, target, max_inputs=2)
        ols = orthogonal_least_squares(S, target, max_inputs=2, min_gain=0.0)
        mp = matching_pursuit(S, target, max_inputs=2, min_gain=0.0)
        assert exh.cost <= ols.cost + 1e-10
        assert ols.cost <= mp.cost + 1e-10
        ordered += 1

    recovered = 0
    for seed in range(50):
        S, target, truth = make_two_sparse_instance(seed, correlated=False)
        model = orthogonal_least_squares(S, target, max_inputs=2)
        if model.support == truth:
            recovered += 1
    _report(8, f"{ordered}/50 instances kept exhaustive <= OLS <= refit-MP; "
               f"{recovered}/50 supports recovered (need 50)")
    assert recovered == 50


def test_criterion_09_delay_sensitivity():
    # a pure three-sample delay: nearly invisible to the coherence
    # distance, maximal for the zero-lag correlation distance.
    rng = np.random.default_rng(909)
    w = rng.standard_normal(2 ** 16 + 3)
    ens = Ensemble([TimeSeries("x", w[3:]), TimeSeries("y", w[:-3])])
    cfg = WelchConfig(grid_size=256, segment_length=256)
    d_coh = distance_matrix(spectral_matrix(ens, cfg)).values[0, 1]
    d_corr = correlation_distance_matrix(ens).values[0, 1]
    _report(9, f"coherence distance {d_coh:.4f} (need <= 0.1), "
               f"correlation distance {d_corr:.4f} (need >= 1.0)")
    assert d_coh <= 0.1
    assert d_corr >= 1.0


def _run_twice_and_diff(argv, out_dir):
    first = cli.main(argv + ["--out", str(out_dir)])
    snapshot = {p.name: p.read_bytes() for p in out_dir.iterdir()}
    second = cli.main(argv + ["--out", str(out_dir)])
    assert first == second == 0
    after = {p.name: p.read_bytes() for p in out_dir.iterdir()}
    assert set(snapshot) == set(after)
    for name in snapshot:
        if name == "manifest.json":
            a = json.loads(snapshot[name].decode("utf-8"))
            b = json.loads(after[name].decode("utf-8"))
            a.pop("volatile")
            b.pop("volatile")
            assert a == b
        else:
            assert snapshot[name] == after[name], name
    return len(snapshot)


def test_criterion_10_subcommand_determinism(tmp_path):
    # identical config + input + seed reproduce every artifact byte for
    # byte; only the isolated volatile manifest block may differ.
    from test_cli import write_chain_csv
    data = write_chain_csv(tmp_path / "chain.csv")
    counts = {}
    counts["analyze"] = _run_twice_and_diff(
        ["analyze", "--input", str(data), "--grid-size", "128"],
        tmp_path / "analyze")
    counts["simulate"] = _run_twice_and_diff(
        ["simulate", "--nodes", "3", "--length", "2048", "--seed", "4"],
        tmp_path / "simulate")
    counts["validate"] = _run_twice_and_diff(
        ["validate", "--trials", "2", "--nodes", "4-5",
         "--grid-size", "128", "--seed", "7"],
        tmp_path / "validate")
    counts["sparse"] = _run_twice_and_diff(
        ["sparse", "--input", str(data), "--grid-size", "128",
         "--budget", "2"],
        tmp_path / "sparse")
    counts["compare"] = _run_twice_and_diff(
        ["compare", "--input", str(data), "--grid-size", "128"],
        tmp_path / "compare")
    _report(10, "all 5 subcommands byte-reproducible "
                f"({sum(counts.values())} files compared)")
