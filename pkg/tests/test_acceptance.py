"""Acceptance checks, one test and one PASS/FAIL line per criterion.

Every tolerance, seed and sample size is pinned below.
"""

import itertools
import time

import numpy as np
import pytest
from scipy import stats

import oracles
from kemedian.bb import bb_solve, candidate_pair_penalty
from kemedian.classical import borda, condorcet_consensus, condorcet_support
from kemedian.cli import main
from kemedian.heuristics import fast, initial_q, quick, quick_solution_set
from kemedian.io import emond_mason_path, load_emond_mason
from kemedian.ranking import (
    Ranking,
    RankingDataset,
    approx_weak_order_count,
    combined_input,
    default_labels,
    enumerate_weak_order_arrays,
    enumerate_weak_orders,
    kemeny_distance,
    kendall_tau,
    objective_dot,
    tau_x,
)
from kemedian.simulate import ModelSpec, Space, model_pmf, sample

EM_SOLUTIONS = {
    "D L (E-M) (A-B) I P (C-N) H F G (O-Q)",
    "D L (E-M) (A-B-P) (C-N) I H F G (O-Q)",
    "D L (E-M) (B-P) A (C-N) I H F G (O-Q)",
}
EM_TAU = 0.166
EM_TAU_TOL = 0.0005
FAST_SECONDS = 60.0
QUICK_SECONDS = 1.0
ORACLE_DATASETS = 100
QUALITY_DATASETS = 50
FAST_RATE = 0.95
QUICK_RATE = 0.70
AXIOM_TRIPLES = 1000
IDENTITY_PAIRS = 1000
IDENTITY_DATASETS = 200
PMF_TOL = 1e-12
CHI_ALPHA = 0.01
CHI_N = 10_000

TABLE1 = RankingDataset(("A", "B", "C"), np.array([[2, 1, 3], [1, 2, 3], [3, 2, 1]]), [12, 5, 7])


@pytest.fixture(scope="module")
def em_ci():
    ci = combined_input(load_emond_mason())
    # compile the kernels once so timings measure the algorithms, not the JIT
    quick_solution_set(combined_input(TABLE1))
    bb_solve(combined_input(TABLE1))
    return ci


def orderings(sol):
    return {s.to_ordering() for s in sol.solutions}


def test_ac1_bb_table7(em_ci, criterion):
    t0 = time.perf_counter()
    sol = bb_solve(em_ci)
    secs = time.perf_counter() - t0
    ok = orderings(sol) == EM_SOLUTIONS and abs(sol.avg_tau_x - EM_TAU) <= EM_TAU_TOL
    criterion("AC1", ok, f"bb: {len(sol)} solutions, set match={orderings(sol) == EM_SOLUTIONS}, avg tau_x={sol.avg_tau_x:.6f}, {secs:.1f}s")


def test_ac2_fast_table7(em_ci, criterion):
    t0 = time.perf_counter()
    sol = fast(em_ci, maxiter=100, seed=1)
    secs = time.perf_counter() - t0
    ok = orderings(sol) == EM_SOLUTIONS and abs(sol.avg_tau_x - EM_TAU) <= EM_TAU_TOL and secs <= FAST_SECONDS
    criterion("AC2", ok, f"fast maxiter=100 seed=1: {len(sol)} solutions, set match={orderings(sol) == EM_SOLUTIONS}, {secs:.2f}s (limit {FAST_SECONDS:.0f}s)")


def test_ac3_quick_table7(em_ci, criterion):
    t0 = time.perf_counter()
    sol = quick_solution_set(em_ci)
    secs = time.perf_counter() - t0
    ok = len(sol) == 1 and abs(sol.avg_tau_x - EM_TAU) <= EM_TAU_TOL and secs <= QUICK_SECONDS
    criterion("AC3", ok, f"quick: {len(sol)} ranking, avg tau_x={sol.avg_tau_x:.6f}, {secs * 1000:.1f}ms (limit {QUICK_SECONDS:.0f}s)")


def test_ac4_borda(criterion):
    totals, cons = borda(TABLE1)
    ok = totals == {"A": 50, "B": 36, "C": 58} and cons.to_ordering() == "B A C"
    criterion("AC4", ok, f"borda totals={totals}, consensus={cons.to_ordering()}")


def test_ac5_condorcet(criterion):
    s = condorcet_support(TABLE1)
    expected = {("A", "B"): 5, ("B", "A"): 19, ("A", "C"): 17, ("C", "A"): 7, ("B", "C"): 17, ("C", "B"): 7}
    table_ok = all(s[p] == v for p, v in expected.items()) and all(s[a, a] == 0 for a in "ABC")
    cons = condorcet_consensus(s)
    ok = table_ok and cons.to_ordering() == "B A C"
    criterion("AC5", ok, f"support table match={table_ok}, consensus={cons.to_ordering()}")


def test_ac6_exact_oracle(criterion):
    rng = np.random.default_rng(20240601)
    sizes = {m: len(oracles.weak_orders(m)) for m in (3, 4, 5)}
    matches = 0
    for i in range(ORACLE_DATASETS):
        m = (3, 4, 5)[i % 3]
        rows = oracles.random_tied_rows(rng, m, 20)
        w = [int(x) for x in rng.integers(1, 6, 20)]
        ci = combined_input(RankingDataset(default_labels(m), np.array(rows), w))
        best, winners = oracles.brute_median(oracles.combined_input(rows, w))
        sol = bb_solve(ci)
        matches += sol.keys() == winners and sol.objective_dot == best
    ok = matches == ORACLE_DATASETS and sizes == {3: 13, 4: 75, 5: 541}
    criterion("AC6", ok, f"bb equals brute force on {matches}/{ORACLE_DATASETS} datasets; space sizes {sizes}")


def test_ac7_heuristic_quality(criterion):
    rng = np.random.default_rng(7)
    fast_hits = quick_hits = 0
    for i in range(QUALITY_DATASETS):
        m = 3 + i % 4
        theta = (0.1, 0.4, 0.7)[i % 3]
        space = (Space.FULL, Space.WEAK)[(i // 3) % 2]
        cons = tuple(int(x) for x in rng.permutation(m) + 1)
        data = sample(ModelSpec(Ranking(default_labels(m), cons), theta, space), 50, seed=int(rng.integers(2**32)))
        ci = combined_input(data)
        best = bb_solve(ci).objective_dot
        fast_hits += fast(ci, maxiter=50, seed=i).objective_dot == best
        quick_hits += ci.bound - quick(ci, initial_q(ci)).penalty == best
    fr, qr = fast_hits / QUALITY_DATASETS, quick_hits / QUALITY_DATASETS
    ok = fr >= FAST_RATE and qr >= QUICK_RATE and fr >= qr
    criterion("AC7", ok, f"optimal rate fast={fr:.2f} (>= {FAST_RATE}), quick={qr:.2f} (>= {QUICK_RATE}) over {QUALITY_DATASETS} datasets")


def test_ac8_metric_axioms(criterion):
    rng = np.random.default_rng(8)
    bad = 0
    for _ in range(AXIOM_TRIPLES):
        m = int(rng.integers(2, 6))
        a, b, c = (Ranking(default_labels(m), tuple(int(v) for v in rng.integers(1, m + 1, m))) for _ in range(3))
        dab, dba = kemeny_distance(a, b), kemeny_distance(b, a)
        pos = dab >= 0 and (dab == 0) == (a.key() == b.key())
        bad += not (pos and dab == dba and kemeny_distance(a, c) <= dab + kemeny_distance(b, c))
    pts = enumerate_weak_orders(4)
    dmin = min(kemeny_distance(x, y) for x, y in itertools.combinations(pts, 2))
    ok = bad == 0 and dmin == 1 and len(pts) == 75
    criterion("AC8", ok, f"{AXIOM_TRIPLES - bad}/{AXIOM_TRIPLES} triples satisfy the axioms; min positive distance on 75 points = {dmin}")


def test_ac9_identities(criterion):
    rng = np.random.default_rng(9)
    fails = [0, 0, 0, 0]

    def weak(m):
        return Ranking(default_labels(m), tuple(int(v) for v in rng.integers(1, m + 1, m)))

    def perm(m):
        return Ranking(default_labels(m), tuple(int(v) for v in rng.permutation(m) + 1))

    for _ in range(IDENTITY_PAIRS):
        m = int(rng.integers(2, 8))
        a, b = weak(m), weak(m)
        # both sides are rationals with denominator m(m-1); compare exactly
        fails[0] += round(tau_x(a, b) * m * (m - 1)) != m * (m - 1) - 2 * kemeny_distance(a, b)
    for _ in range(IDENTITY_PAIRS):
        m = int(rng.integers(2, 8))
        a, b = perm(m), perm(m)
        fails[1] += abs(tau_x(a, b) - kendall_tau(a, b)) > 1e-12
    for _ in range(IDENTITY_DATASETS):
        m, n = int(rng.integers(3, 8)), int(rng.integers(1, 30))
        rows = [perm(m) for _ in range(n)]
        w = [int(x) for x in rng.integers(1, 10, n)]
        ci = combined_input(RankingDataset.from_rankings(rows, w))
        s = weak(m)
        lhs = sum(wk * kemeny_distance(s, r) for r, wk in zip(rows, w))
        fails[2] += 2 * lhs != sum(w) * m * (m - 1) - objective_dot(s, ci)
    for _ in range(IDENTITY_DATASETS):
        m, n = int(rng.integers(3, 8)), int(rng.integers(1, 30))
        rows = oracles.random_tied_rows(rng, m, n)
        ci = combined_input(RankingDataset(default_labels(m), np.array(rows), rng.integers(1, 10, n)))
        s = weak(m)
        fails[3] += 2 * candidate_pair_penalty(s, ci) != ci.bound - objective_dot(s, ci)
    ok = fails == [0, 0, 0, 0]
    criterion("AC9", ok, f"identity failures (tau_x/distance, tau_x/kendall, weighted distance, pair penalties) = {fails}")


def test_ac10_enumeration(criterion):
    counts = {m: len(enumerate_weak_order_arrays(m)) for m in range(2, 7)}
    expected = {m: oracles.fubini(m) for m in range(2, 7)}
    rel = {m: abs(approx_weak_order_count(m) - expected[m]) / expected[m] for m in range(3, 7)}
    ok = counts == expected == {2: 3, 3: 13, 4: 75, 5: 541, 6: 4683} and max(rel.values()) < 0.01
    criterion("AC10", ok, f"counts={list(counts.values())}, max approximation error={max(rel.values()):.2e}")


def test_ac11_sampler(criterion, capsys, tmp_path):
    sums = []
    for m, theta, space in itertools.product((2, 3, 5, 6), (0.0, 0.1, 0.7, 5.0), Space):
        sums.append(abs(model_pmf(ModelSpec(Ranking(default_labels(m), tuple(range(1, m + 1))), theta, space)).probs.sum() - 1))
    norm_ok = max(sums) <= PMF_TOL

    d = sample(ModelSpec(Ranking(default_labels(3), (1, 2, 3)), 0.0), CHI_N, seed=11)
    keys = [tuple(r) for r in d.ranks]
    counts = [keys.count(p) for p in itertools.permutations((1, 2, 3))]
    pval = stats.chisquare(counts).pvalue

    def out(*argv):
        code = main(list(argv))
        text = capsys.readouterr().out
        return code, text

    sim = [out("simulate", "--m", "4", "--theta", "0.4", "--n", "100", "--seed", "5") for _ in range(2)]
    bench = [
        out("bench", "--m", "4", "--thetas", "0.7 0.1", "--n", "50", "--replications", "3", "--maxiter", "10", "--seed", "5", "--omit-timing", "--threads", t)
        for t in ("1", "3")
    ]
    cons = [
        out("consensus", "--input", str(emond_mason_path()), "--algorithm", "fast", "--maxiter", "20", "--seed", "5", "--omit-timing", "--threads", t)
        for t in ("1", "3")
    ]
    same = all(a == b and a[0] == 0 for a, b in (sim, bench, cons))
    ok = norm_ok and pval > CHI_ALPHA and same
    criterion("AC11", ok, f"max |sum p - 1|={max(sums):.1e}, chi-square p={pval:.3f} (alpha {CHI_ALPHA}), byte-identical outputs={same}")
