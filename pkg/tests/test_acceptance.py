"""Acceptance criteria 1-9, each checked at its stated tolerance.

Every criterion records one PASS/FAIL line in ``REPORT``; ``conftest.py``
prints them at the end of the pytest run, and running this file directly
prints them too. Criteria that fail do so on the merits: the reasons are
analysed in the decisions ledger, not hidden by loosened tolerances.
"""
import math
import sys

import numpy as np
import pytest

from sectormusic.array_model import ArrayGeometry, beamwidth_deg, delta_separation, steering_matrix
from sectormusic.beamspace import array_gain, build_weighting
from sectormusic.dpss import compute_bank, fractional_energy, sinc_kernel
from sectormusic.harness import (
    REFERENCE_THRESHOLDS,
    build_figure_sweep,
    build_table,
    reference_rows,
    resolution_probability,
    row_config,
    theoretical_threshold,
)
from sectormusic.music import (
    angle_grid,
    default_step_deg,
    eig_hermitian,
    evaluate_grid,
    find_peaks,
    null_spectrum,
    resolved,
)
from sectormusic.signal_sim import (
    Scenario,
    beamspace_covariance,
    generate_snapshots,
    sample_covariance,
    true_covariance,
)
from sectormusic.theory import (
    EXPANSION_VALIDITY_DELTA,
    TwoSourceModel,
    expected_null_at_midpoint,
    expected_null_at_sources,
    manifold_cosine,
    manifold_cosine_expansion,
    projection_approximations,
    theoretical_eigenvalues,
    threshold_beamspace,
    to_db,
)

B = 0.0781
REPORT = {}
WORKERS = 4


def record(number, ok, detail):
    REPORT[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(REPORT[number])
    return ok


def reference(N, ad, K):
    return REFERENCE_THRESHOLDS[(N, ad)][K]


# 1 ----------------------------------------------------------------------

def test_criterion_1_theory_tables():
    rows = []
    for N, n, b, ad, K in reference_rows():
        g = ArrayGeometry(N)
        al = np.radians([-ad / 2, ad / 2])
        W = build_weighting(g, compute_bank(N, b, n), 0.0)
        tau = to_db(threshold_beamspace(n, K, delta_separation(g, *al), array_gain(W, g)[0]))
        rows.append((N, ad, K, tau, tau - reference(N, ad, K)[0]))
    errs = np.array([r[4] for r in rows])
    bad = [f"N={N} {ad}deg K={K}: {e:+.2f}" for N, ad, K, _, e in rows if abs(e) > 0.5]
    ok = record(1, not bad, f"{np.sum(np.abs(errs) <= 0.5)}/24 rows within 0.5 dB "
                f"(max |err| {np.abs(errs).max():.3f} dB)")
    assert ok, "rows outside 0.5 dB: " + "; ".join(bad)


# 2 ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def simulated_table():
    return build_table(reference_rows(), simulate=True, workers=WORKERS)


@pytest.mark.slow
def test_criterion_2_simulated_tables(simulated_table):
    hits, lines = 0, []
    for e in simulated_table:
        ref = reference(e["N"], e["alpha_d_deg"], e["K"])[1]
        sim = e["tau_sim_db"]
        hit = sim is not None and abs(sim - ref) <= 3
        hits += hit
        lines.append(f"N={e['N']} {e['alpha_d_deg']}deg K={e['K']}: ours {sim} reference {ref} "
                     f"({e['sim_status']})")
    ok = record(2, hits >= 20, f"{hits}/24 rows within 3 dB of the simulated column (need 20)")
    assert ok, "\n".join(lines)


@pytest.mark.slow
def test_theory_simulation_gap_invariant(simulated_table):
    """Our sim-theory gap is at most the published gap plus 3 dB."""
    bad = []
    for e in simulated_table:
        th_p, sim_p = reference(e["N"], e["alpha_d_deg"], e["K"])
        sim = e["tau_sim_db"]
        if sim is None or abs(sim - e["tau_theory_db"]) > abs(sim_p - th_p) + 3:
            bad.append(f"N={e['N']} {e['alpha_d_deg']}deg K={e['K']}")
    print(f"gap invariant: {24 - len(bad)}/24 rows hold")
    assert not bad, ", ".join(bad)


# 3 ----------------------------------------------------------------------

def test_criterion_3_threshold_identity():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(3, 11))
        K = int(10 ** rng.uniform(2, 4))
        dl = rng.uniform(0.05, EXPANSION_VALIDITY_DELTA)
        g = rng.uniform(0.5, 1.0)
        m = TwoSourceModel(n, K, dl, g, threshold_beamspace(n, K, dl, g))
        src, mid = expected_null_at_sources(m), expected_null_at_midpoint(m)
        worst = max(worst, abs(src - mid) / abs(mid))
    ok = record(3, worst <= 1e-9, f"max relative mismatch {worst:.3g} (tolerance 1e-9)")
    assert ok


# 4 ----------------------------------------------------------------------

def test_criterion_4_unitary_equivalence():
    rng = np.random.default_rng(4)
    worst, mismatches = 0.0, 0
    for i in range(50):
        N = int(rng.integers(3, 17))
        g = ArrayGeometry(N)
        al = np.sort(rng.uniform(-0.6, 0.6, 2))
        s = Scenario.from_asnr(g, al, rng.uniform(0, 40), num_snapshots=int(rng.integers(5, 500)),
                               seed=i)
        W = build_weighting(g, compute_bank(N, rng.uniform(0.02, 0.45), N), rng.uniform(-0.5, 0.5))
        X = generate_snapshots(s)
        c_el = sample_covariance(X)
        c_bs = sample_covariance(W.H @ X, "beamspace")
        worst = max(worst, np.abs(W.matrix @ c_bs.matrix @ W.H - c_el.matrix).max()
                    / np.abs(c_el.matrix).max())
        e_el, e_bs = eig_hermitian(c_el), eig_hermitian(c_bs)
        worst = max(worst, np.abs(e_el.eigenvalues - e_bs.eigenvalues).max() / e_el.eigenvalues[0])
        angles = angle_grid(np.degrees(al.mean()), 2 * beamwidth_deg(g), default_step_deg(g))
        g_el = evaluate_grid(e_el, g, 2, angles)
        g_bs = evaluate_grid(e_bs, g, 2, angles, W)
        worst = max(worst, np.abs(g_el.null_values - g_bs.null_values).max())
        p_el, p_bs = find_peaks(g_el), find_peaks(g_bs)
        same_peaks = sorted(a for a, _ in p_el) == sorted(a for a, _ in p_bs)
        same_dec = resolved(p_el, *al, g) == resolved(p_bs, *al, g)
        mismatches += not (same_peaks and same_dec)
    ok = record(4, worst <= 1e-10 and mismatches == 0,
                f"max deviation {worst:.2e}, peak/decision mismatches {mismatches}/50")
    assert ok


# 5 ----------------------------------------------------------------------

def test_criterion_5_noiseless_exactness():
    worst_d, worst_steps = 0.0, 0.0
    for N, ad in REFERENCE_THRESHOLDS:
        g = ArrayGeometry(N)
        al = np.radians([-ad / 2, ad / 2])
        step = default_step_deg(g)
        for W in (None, build_weighting(g, compute_bank(N, B, 3))):
            cov = true_covariance(Scenario.from_asnr(g, al, 20.0))
            man = steering_matrix(g, al)
            if W is not None:
                cov = beamspace_covariance(cov, W)
                man = W.H @ man
            eig = eig_hermitian(cov)
            worst_d = max(worst_d, null_spectrum(eig, man, 2).max())
            grid = evaluate_grid(eig, g, 2, angle_grid(0.0, 2 * beamwidth_deg(g), step), W)
            top = sorted(a for a, _ in find_peaks(grid)[:2])
            worst_steps = max(worst_steps, np.abs(np.subtract(top, [-ad / 2, ad / 2])).max() / step)
    ok = record(5, worst_d <= 1e-8 and worst_steps <= 1,
                f"max D at DOAs {worst_d:.1e}, max peak offset {worst_steps:.2f} grid steps")
    assert ok


# 6 ----------------------------------------------------------------------

def test_criterion_6_approximation_quality():
    # (a) against the large-N limit sin(sqrt3 d)/(sqrt3 d); the finite-N
    # exact value differs from it by O(d^2/N^2), see test_theory
    d = np.linspace(0.05, 0.3, 11)
    x = np.sqrt(3) * d
    err = np.abs(manifold_cosine_expansion(d) - np.sin(x) / x)
    slope = np.polyfit(np.log(d), np.log(err), 1)[0]
    c = err / d ** 6
    N = 1 << 16
    finite = np.array([abs(manifold_cosine(ArrayGeometry(N), 0.0, math.asin(2 * dl * math.sqrt(3) / (N * math.pi))))
                       for dl in d])
    c_finite = np.abs(manifold_cosine_expansion(d) - finite) / d ** 6
    ok_a = abs(slope - 6) < 0.1 and c.max() / c.min() < 1.1 and np.allclose(c_finite, c, rtol=0.05)

    # (b) eigenvalues against the solver, element space
    worst_b = 0.0
    g8 = ArrayGeometry(8)
    for ad in (0.8, 2.0, 4.0, 13.0):
        al = np.radians([-ad / 2, ad / 2])
        for snr in (0.0, 20.0, 40.0):
            s = Scenario.from_asnr(g8, al, snr)
            lam = eig_hermitian(true_covariance(s)).eigenvalues[:2]
            th = theoretical_eigenvalues(8, s.power, s.power, abs(manifold_cosine(g8, *al)))
            worst_b = max(worst_b, np.max(np.abs(np.subtract(th, lam)) / lam))
    ok_b = worst_b <= 1e-8

    # (c) projections, N=8 table separations inside the expansion range
    worst_c = 0.0
    W = build_weighting(g8, compute_bank(8, B, 3))
    for ad in (0.8, 2.0, 4.0):
        al = np.radians([-ad / 2, ad / 2])
        eig = eig_hermitian(beamspace_covariance(true_covariance(Scenario.from_asnr(g8, al, 20.0)), W))
        man = W.H @ steering_matrix(g8, np.array([al[1], 0.0]))
        man = man / np.linalg.norm(man, axis=0)
        proj = np.abs(eig.eigenvectors[:, :2].conj().T @ man) ** 2
        exact = [proj[0, 0], proj[1, 0], proj[0, 1], proj[1, 1]]
        approx = projection_approximations(delta_separation(g8, *al))
        worst_c = max(worst_c, np.max(np.abs(np.subtract(exact, approx))))
    ok_c = worst_c <= 5e-3

    ok = record(6, ok_a and ok_b and ok_c,
                f"(a) slope {slope:.3f}, c {c.min():.5f}..{c.max():.5f}; (b) {worst_b:.1e}; "
                f"(c) {worst_c:.1e}")
    assert ok


# 7 ----------------------------------------------------------------------

def test_criterion_7_dpss_correctness():
    problems = []
    for N in range(3, 41):
        for b in (0.02, B, 0.2, 0.35):
            n = min(N, 4)
            bank = compute_bank(N, b, n)
            V, lam = bank.sequences, bank.concentrations
            C = sinc_kernel(N, b)
            if np.abs(V.T @ V - np.eye(n)).max() > 1e-10:
                problems.append(f"orthonormality N={N} B={b}")
            if np.max(np.linalg.norm(C @ V - V * lam, axis=0)) > 1e-9 * np.linalg.norm(C, 2):
                problems.append(f"residual N={N} B={b}")
            if any(abs(fractional_energy(V[:, k], b) - lam[k]) > 1e-10 for k in range(n)):
                problems.append(f"rayleigh N={N} B={b}")
            if abs(np.trace(C) - 2 * b * N) > 1e-12:
                problems.append(f"trace N={N} B={b}")
            if N <= 12:
                for k in range(n):
                    v = V[np.abs(V[:, k]) > 1e-12, k]
                    if np.count_nonzero(np.diff(np.sign(v))) != k:
                        problems.append(f"sign changes N={N} B={b} k={k}")
    ok = record(7, not problems, f"{len(problems)} violations over N=3..40, four bandwidths")
    assert ok, problems[:5]


# 8 ----------------------------------------------------------------------

def test_criterion_8_figure_shapes():
    dims, Ks = (3, 4, 5), (100, 1000, 10000)
    bw_fracs = np.arange(0.0125, 1.0001, 0.0125)
    curves = {}
    for N in (8, 16):
        grid = bw_fracs * beamwidth_deg(ArrayGeometry(N))
        for r in build_figure_sweep(N, dims, B, Ks, grid):
            curves.setdefault(r["curve_id"], []).append(r["tau_n_db"])
    curves = {k: np.array(v) for k, v in curves.items()}
    monotone = all(np.all(np.diff(v) < 0) for v in curves.values())
    ordered = all(np.all(curves[f"N{N}_n{n}_K100"] > curves[f"N{N}_n{n}_K1000"])
                  and np.all(curves[f"N{N}_n{n}_K1000"] > curves[f"N{N}_n{n}_K10000"])
                  for N in (8, 16) for n in dims)
    gap = max(np.abs(curves[f"N8_n{n}_K{K}"] - curves[f"N16_n{n}_K{K}"]).max()
              for n in dims for K in Ks)
    ok = record(8, monotone and ordered and gap <= 1.5,
                f"monotone {monotone}, K-ordered {ordered}, max N=8/N=16 gap {gap:.2f} dB")
    assert ok


# 9 ----------------------------------------------------------------------

def test_criterion_9_probability_at_threshold():
    probs = {}
    for N, ad in REFERENCE_THRESHOLDS:
        cfg = row_config(N, 3, B, ad, 1000)
        probs[(N, ad)] = resolution_probability(cfg, theoretical_threshold(cfg)["tau_db"])
    table1 = {k: v for k, v in probs.items() if k[0] == 8}
    inside = sum(0.2 <= p <= 0.7 for p in table1.values())
    detail = ", ".join(f"{ad}deg {p:.2f}" for (_, ad), p in table1.items())
    extra = ", ".join(f"{ad}deg {p:.2f}" for (N, ad), p in probs.items() if N == 16)
    ok = record(9, inside == 4, f"N=8 K=1000 settings: {detail} ({inside}/4 in [0.2, 0.7]); "
                f"N=16 for reference: {extra}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
