"""Acceptance criteria 1-9; each test records one PASS/FAIL line (see the terminal summary)."""

import io
import os
import random
import subprocess
import sys
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

import micro
from acceptance_log import record
from fairalloc import algorithms
from fairalloc.algorithms import Trace, back_and_forth_crr, rr_squared
from fairalloc.cli import corpus_text, main
from fairalloc.errors import InvariantViolation
from fairalloc.fairness import envy_graph, is_ef1, is_fef1, positive_feasible_envy, social_welfare
from fairalloc.generators import (
    SETTINGS,
    random_bipartite,
    random_bo_instance,
    random_bo_matroid,
    random_partition_instance,
    setting_instance,
)
from fairalloc.matching import is_matching, priority_matching, saturation_vector
from fairalloc.matroid import Matroid, PartitionMatroid, free_extend, is_base_orderable
from fairalloc.model import Allocation, Instance, check_feasible
from fairalloc.optimize import max_weight_swm
from fairalloc.oracle import FIXTURES, k4_matroid, mnw, run_all_fixtures, swm_oracle

N_PER_ALGORITHM = 1000
SEED = "acceptance"


# -- 1. fixtures -----------------------------------------------------------------


def test_criterion_1_fixtures():
    start = time.perf_counter()
    results = run_all_fixtures()
    elapsed = time.perf_counter() - start
    failed = [r.id for r in results if not r.passed]
    ok = len(results) == 9 and not failed and elapsed < 5
    record(1, ok, f"{len(results) - len(failed)}/{len(results)} fixtures reproduce in {elapsed:.2f}s (limit 5s)")
    assert ok, failed


# -- 2. soundness sweep (also feeds criteria 6 and 7) ---------------------------


class _Counter:
    """Wraps a module function, counting calls; verification asserts run inside it."""

    def __init__(self, module, name):
        self.module, self.name = module, name
        self.original = getattr(module, name)
        self.calls = 0

    def __call__(self, *args, **kwargs):
        self.calls += 1
        return self.original(*args, **kwargs)

    def __enter__(self):
        setattr(self.module, self.name, self)
        return self

    def __exit__(self, *exc):
        setattr(self.module, self.name, self.original)


@pytest.fixture(scope="module")
def sweep():
    """Every setting's seeded instances solved in verification mode, with traces."""
    out = {}
    for name in SETTINGS:
        algorithm, _ = SETTINGS[name]
        rng = random.Random(f"{SEED}:{name}")
        runs = []
        with _Counter(algorithms, "_check_ipm_state") as ipm_checks, _Counter(algorithms, "_next_sigma") as sigmas:
            start = time.perf_counter()
            for _ in range(N_PER_ALGORITHM):
                inst = setting_instance(name, rng)
                trace = Trace()
                try:
                    sol = algorithms.solve(inst, algorithm, verify=True)
                    trace = sol.trace
                    x, error = sol.allocation, None
                except InvariantViolation as e:
                    x, error = None, str(e)
                runs.append((inst, x, trace, error))
            elapsed = time.perf_counter() - start
        out[name] = {"runs": runs, "seconds": elapsed, "ipm_checks": ipm_checks.calls, "sigma_checks": sigmas.calls}
    return out


EF1_BACKED = ("iterated_swaps", "cut_and_choose_two_agents")


def _sound(name, inst, x):
    if x is None:
        return False
    report = check_feasible(x, inst)
    if not (report.feasible and report.complete):
        return False
    if name in EF1_BACKED:
        # one shared matroid: every bundle is independent for everyone, so EF1 and F-EF1 coincide
        return bool(is_ef1(x, inst)) and bool(is_fef1(x, inst))
    return bool(is_fef1(x, inst))


def test_criterion_2_soundness(sweep):
    lines, ok = [], True
    for name, data in sweep.items():
        failures = sum(not _sound(name, inst, x) for inst, x, _, _ in data["runs"])
        good = failures == 0 and len(data["runs"]) >= 1000 and data["seconds"] < 60
        ok &= good
        lines.append(f"{name} {len(data['runs'])} runs, {failures} failures, {data['seconds']:.1f}s")
    record(2, ok, "; ".join(lines))
    assert ok


# -- 3. exhaustive micro-verification --------------------------------------------


def _library_instance(cats, caps, V):
    rows = [[int(v) for v in V[i]] for i in (0, 1)]
    return Instance(rows, [PartitionMatroid(cats, caps[i]) for i in (0, 1)])


def _harness_owner(alg, cats, caps, V):
    return alg(V[None, :, :], cats, caps)[0].tolist()


def _library_route(rng):
    """Library allocations and verdicts against the harness, instance by instance."""
    checked = mismatches = failures = 0
    samples = []
    for m in (1, 2):
        P = micro.profiles(m)
        samples += [(cats, caps, P[k]) for cats, caps in micro.cases(m) for k in range(len(P))]
    for m in (3, 4, 5):
        cases = list(micro.cases(m))
        for _ in range(1500):
            cats, caps = rng.choice(cases)
            samples.append((cats, caps, np.array([[rng.randint(0, 2) for _ in range(m)] for _ in (0, 1)])))
    for cats, caps, V in samples:
        inst = _library_instance(cats, caps, V)
        for lib, harness in ((back_and_forth_crr, micro.back_and_forth), (rr_squared, micro.rr_squared)):
            x = lib(inst)
            owner = _harness_owner(harness, cats, caps, V)
            checked += 1
            mismatches += x.owners(inst.m) != owner
            failures += not is_fef1(x, inst)
    return checked, mismatches, failures


def _verdict_route(rng):
    """Harness F-EF1 test against the library's on arbitrary (often unfair) allocations."""
    disagreements = unfair = 0
    for _ in range(3000):
        m = rng.randint(1, 5)
        cats, caps = rng.choice(list(micro.cases(m)))
        V = np.array([[rng.randint(0, 2) for _ in range(m)] for _ in (0, 1)])
        inst = _library_instance(cats, caps, V)
        owners = [rng.randint(0, 1) for _ in range(m)]
        x = Allocation.from_owners(owners, 2)
        if not check_feasible(x, inst).feasible:
            continue
        lib = bool(is_fef1(x, inst))
        harness = bool(micro.fef1(V[None, :, :], np.array([owners]), cats, caps)[0])
        disagreements += lib != harness
        unfair += not lib
    return disagreements, unfair


def test_criterion_3_exhaustive():
    start = time.perf_counter()
    tables = micro.Tables()
    totals = {"back_and_forth_crr": [0, 0], "rr_squared": [0, 0], "same_order": [0, 0]}
    for m in range(1, 6):
        for name, (count, bad) in micro.sweep(m, tables).items():
            totals[name][0] += count
            totals[name][1] += bad
    rng = random.Random(f"{SEED}:micro")
    checked, mismatches, lib_failures = _library_route(rng)
    disagreements, unfair = _verdict_route(rng)
    elapsed = time.perf_counter() - start
    ok = (
        totals["back_and_forth_crr"][1] == 0
        and totals["rr_squared"][1] == 0
        and totals["back_and_forth_crr"][0] == totals["rr_squared"][0] == 101_849_103
        and totals["same_order"][1] > 0
        and mismatches == 0
        and lib_failures == 0
        and disagreements == 0
        and unfair > 0
    )
    record(
        3,
        ok,
        f"{totals['rr_squared'][0]} instances per algorithm, failures bf={totals['back_and_forth_crr'][1]} "
        f"rr2={totals['rr_squared'][1]} (control fails {totals['same_order'][1]}); library cross-check "
        f"{checked} runs, {mismatches} allocation mismatches, {lib_failures} F-EF1 failures; verdict "
        f"cross-check {disagreements} disagreements over {unfair} unfair allocations; {elapsed:.1f}s",
    )
    assert ok


# -- 4. oracle cross-checks ------------------------------------------------------


def _lexmax_saturation(adjacency, sigma):
    """Brute force via Hall's condition: the lexicographically largest matchable subset of the left side."""
    left = list(sigma)
    k = len(left)
    nbr = [0] * (1 << k)
    for s in range(1, 1 << k):
        low = (s & -s).bit_length() - 1
        mask = 0
        for v in adjacency.get(left[low], []):
            mask |= 1 << v
        nbr[s] = nbr[s & (s - 1)] | mask
    matchable = [True] * (1 << k)
    for s in range(1, 1 << k):
        ok = bin(nbr[s]).count("1") >= bin(s).count("1")
        t = s
        while ok and t:
            low = t & -t
            ok = matchable[s ^ low]
            t ^= low
        matchable[s] = ok
    vectors = [tuple((s >> p) & 1 for p in range(k)) for s in range(1 << k) if matchable[s]]
    return max(vectors) if vectors else ()


def test_criterion_4_oracles():
    rng = random.Random(f"{SEED}:swm")
    swm_bad = 0
    for t in range(500):
        n, m = rng.randint(1, 3), rng.randint(1, 8)
        if t % 2:
            inst = random_partition_instance(rng, n=n, m=m, n_categories=rng.randint(1, 3), max_value=5)
        else:
            inst = random_bo_instance(rng, n=n, m=m, max_value=5)
        x = max_weight_swm(inst)
        swm_bad += not check_feasible(x, inst).feasible or social_welfare(x, inst) != swm_oracle(inst)[0]
    rng = random.Random(f"{SEED}:matching")
    pm_bad = 0
    for _ in range(500):
        a, b = rng.randint(1, 8), rng.randint(1, 8)
        adj = random_bipartite(rng, a, b, p=rng.choice((0.15, 0.3, 0.5)))
        sigma = list(range(a))
        rng.shuffle(sigma)
        mu = priority_matching(adj, sigma)
        got = saturation_vector(mu, sigma)
        pm_bad += not is_matching(adj, mu) or got != _lexmax_saturation(adj, sigma)
    ok = swm_bad == 0 and pm_bad == 0
    record(4, ok, f"welfare: 500 instances, {swm_bad} mismatches; priority matching: 500 graphs, {pm_bad} mismatches")
    assert ok


# -- 5. maximum Nash welfare with identical valuations ---------------------------


def test_criterion_5_mnw_is_fef1():
    rng = random.Random(f"{SEED}:mnw")
    failures = allocations = 0
    for _ in range(300):
        n = rng.randint(2, 3)
        m = rng.randint(1, 7 if n == 2 else 6)
        inst = random_partition_instance(
            rng, n=n, m=m, n_categories=rng.randint(1, 3), max_value=4, identical_valuations=True
        )
        argmax, _ = mnw(inst)
        allocations += len(argmax)
        failures += sum(not is_fef1(x, inst) for x in argmax)
    ok = failures == 0
    record(5, ok, f"300 instances, {allocations} maximum Nash welfare allocations, {failures} not F-EF1")
    assert ok


# -- 6. iterated swaps dynamics --------------------------------------------------


def test_criterion_6_swap_dynamics(sweep):
    runs = sweep["iterated_swaps"]["runs"]
    bad = swaps = active = 0
    for inst, x, trace, error in runs:
        if error is not None:
            bad += 1
            continue
        w, phi = trace.welfare, trace.potential
        good = (
            inst.n == 3
            and inst.is_binary
            and all(a == w[0] for a in w)
            and all(b < a for a, b in zip(phi, phi[1:]))
            and trace.iterations <= inst.m
            and len(w) == len(phi) == trace.iterations + 1
        )
        bad += not good
        swaps += trace.iterations
        active += trace.iterations > 0
    ok = bad == 0 and len(runs) >= 1000
    record(6, ok, f"{len(runs)} verified runs ({active} with swaps, {swaps} swaps in total), {bad} violations")
    assert ok


# -- 7. mid-run invariants --------------------------------------------------------


def test_criterion_7_invariants(sweep):
    ok = True
    parts = []
    for name, key in (("iterated_priority_matching", "ipm_checks"), ("per_category_crr", "sigma_checks")):
        data = sweep[name]
        errors = sum(error is not None for _, _, _, error in data["runs"])
        final_bad = 0
        for inst, x, _, error in data["runs"]:
            if x is None:
                continue
            final_bad += not envy_graph(x, inst).is_acyclic()
            if name == "iterated_priority_matching":
                final_bad += max(max(row) for row in positive_feasible_envy(x, inst)) > 1
        good = errors == 0 and final_bad == 0 and data[key] > 0
        ok &= good
        parts.append(f"{name}: {len(data['runs'])} runs, {data[key]} mid-run checks, {errors + final_bad} violations")
    record(7, ok, "; ".join(parts))
    assert ok


# -- 8. free extension preserves base-orderability --------------------------------


def _fixture_matroids():
    out = []
    for fid, f in FIXTURES.items():
        inst = f.instance()
        for c in inst.constraints:
            if isinstance(c, Matroid) and len(c.ground_set) <= 8 and c not in out:
                out.append(c)
    return out


def test_criterion_8_free_extension():
    rng = random.Random(f"{SEED}:bo")
    matroids = _fixture_matroids() + [k4_matroid()]
    for kind in ("uniform", "partition", "laminar", "transversal"):
        matroids += [random_bo_matroid(rng, rng.randint(2, 7), kind) for _ in range(3)]
    bad = 0
    for mat in matroids:
        bad += is_base_orderable(free_extend(mat, 1)) != is_base_orderable(mat)
    k4 = k4_matroid()
    k4_ok = not is_base_orderable(k4) and not is_base_orderable(free_extend(k4, 1))
    ok = bad == 0 and k4_ok
    record(8, ok, f"{len(matroids)} matroids ({len(_fixture_matroids())} from fixtures), {bad} mismatches; "
                  f"K4 non-base-orderable raw and extended: {k4_ok}")
    assert ok


# -- 9. determinism ---------------------------------------------------------------


def _capture(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def _subprocess(argv, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    proc = subprocess.run([sys.executable, "-m", "fairalloc.cli", *argv], capture_output=True, env=env)
    return proc.stdout


def test_criterion_9_determinism(tmp_path):
    checks = []
    bench = ["bench", "--seed", "11", "--instances", "25", "--format", "json"]
    checks.append(_capture(bench) == _capture(bench))
    checks.append(_subprocess(bench, 1) == _subprocess(bench, 2) == _capture(bench)[1].encode())
    for fid in FIXTURES:
        path = tmp_path / f"{fid}.json"
        path.write_text(corpus_text(fid))
        argv = ["solve", str(path), "--format", "json"]
        first, second = _capture(argv), _capture(argv)
        checks.append(first == second)
    demo = ["demo", "--format", "json"]
    checks.append(_subprocess(demo, 3) == _subprocess(demo, 4))
    ok = all(checks)
    record(9, ok, f"{sum(checks)}/{len(checks)} repeated reports byte-identical (bench, solve on every fixture, demo)")
    assert ok
