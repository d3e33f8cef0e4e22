"""Acceptance battery: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.  Criterion 4's Weyl-constant window is expected to fail:
finite-level atomic refinements carry an O(#atoms) eigenvalue-counting
offset (about +0.4 per coupling at these energies), which puts the n in
[50, 100] window far outside the 2% band; the law itself is recovered at
higher indices (see test_asymptotics.py::TestWeylFit::
test_cantor_level5_asymptotic_window and notes/decisions.md).
"""
import math
import time

import numpy as np

from deltaprime import (CantorSpec, EndpointDescriptor, GalerkinOracle,
                        GapStructure, GreenKernel, PiecewisePotential,
                        ProblemSpec, SingularMeasure, classify_endpoint,
                        counting_function, deficiency_indices, eigenvalues,
                        evaluate_criteria, hs_distance, kappa_minus,
                        m_function, negative_count, spectral_function,
                        stretch_propagator, transfer_matrix, wronskian)
from deltaprime.propagate import StateVector, atom_jump, propagate
from deltaprime.spectrum import _eigenvalue_by_index

CANTOR1 = SingularMeasure(cantor_parts=(CantorSpec((0.0, 1.0), 1.0),))


def report(num, name, ok, detail=""):
    print(f"ACCEPTANCE {num:02d} ({name}): {'PASS' if ok else 'FAIL'}"
          f"{' — ' + detail if detail else ''}")
    return ok


def test_criterion_01_classical_baseline():
    t0 = time.perf_counter()
    data = eigenvalues(ProblemSpec((0.0, 1.0)), n_max=20, with_norming=False)
    worst = max(abs(lam / (math.pi * n) ** 2 - 1.0)
                for n, lam in zip(data.indices, data.eigenvalues))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 1.0
    assert report(1, "classical baseline", ok,
                  f"max rel err {worst:.2e}, {elapsed:.2f}s")


def test_criterion_02_delta_prime_bound_state():
    m = SingularMeasure.from_atoms([(0.0, -1.0)])
    p = ProblemSpec((-20.0, 20.0), measure=m)
    data = eigenvalues(p, window=(-30.0, -0.5), with_norming=False)
    lam = data.eigenvalues[0]
    oracle = GalerkinOracle(p, 2.0 ** -8).eigenvalues(1)[0]
    kappa = negative_count(p)
    ok = (abs(lam + 4.0) < 1e-6 and abs(oracle + 4.0) < 1e-3 and kappa == 1)
    assert report(2, "delta-prime bound state", ok,
                  f"shooting {lam:.9f}, oracle {oracle:.6f}, kappa {kappa}")


def test_criterion_03_kappa_equals_negative_support():
    """Random signed atomic measures on (0,1), q == 0.

    Weights are drawn in +-[0.02, 0.08] so that the truncated interval
    provably carries the full whole-line negative count (the Dirichlet
    return constraint removes a direction only when the negative weights
    sum to at least the interval length).
    """
    t0 = time.perf_counter()
    rng = np.random.default_rng(5110)
    failures = 0
    for _ in range(100):
        n = int(rng.integers(1, 7))
        xs = np.sort(rng.uniform(0.08, 0.92, n))
        while n > 1 and np.min(np.diff(xs)) < 0.03:
            xs = np.sort(rng.uniform(0.08, 0.92, n))
        betas = rng.uniform(0.02, 0.08, n) * rng.choice([-1.0, 1.0], n)
        m = SingularMeasure.from_atoms(zip(xs.tolist(), betas.tolist()))
        p = ProblemSpec((0.0, 1.0), measure=m)
        expected = int(np.sum(betas < 0))
        theorem = negative_count(p)
        inertia = GalerkinOracle(p, 2.0 ** -10).inertia(0.0)
        if not (theorem == kappa_minus(m) == expected == inertia):
            failures += 1
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 30.0
    assert report(3, "negative count theorem", ok,
                  f"{failures} failures, {elapsed:.1f}s")


def test_criterion_04_weyl_law_window():
    t0 = time.perf_counter()
    p = ProblemSpec((0.0, 1.0), measure=CANTOR1, level=5)
    negative_side_ok = all(counting_function(p, t) == 0
                           for t in (-1.0, -1e3, -1e6))
    ratios = {n: n / math.sqrt(_eigenvalue_by_index(p, n)) * math.pi
              for n in range(50, 101)}
    worst = max(abs(v - 1.0) for v in ratios.values())
    elapsed = time.perf_counter() - t0
    ok = negative_side_ok and worst < 0.02 and elapsed < 60.0
    report(4, "Weyl law window", ok,
           f"negative side {'ok' if negative_side_ok else 'BAD'}, "
           f"max |n/sqrt(lam)*pi - 1| = {worst:.3f} over n in [50,100], "
           f"{elapsed:.1f}s")
    assert negative_side_ok and elapsed < 60.0
    # Known-unattainable clause, asserted as specified: the level-5
    # realization's 32 couplings shift the counting function by ~13 at
    # these indices (see module docstring and notes/decisions.md).
    assert worst < 0.02, (
        "finite-level counting offset dominates the [50,100] window; "
        f"measured max deviation {worst:.3f}")


def test_criterion_05_norm_resolvent_convergence():
    t0 = time.perf_counter()
    problems = {lv: ProblemSpec((0.0, 1.0), measure=CANTOR1, level=lv)
                for lv in range(2, 9)}
    hs = {lv: hs_distance(problems[lv], problems[8], -1.0)
          for lv in range(2, 8)}
    hs_ok = all(hs[lv + 1] < hs[lv] for lv in range(2, 7))
    lam = {lv: eigenvalues(problems[lv], n_max=5,
                           with_norming=False).eigenvalues
           for lv in range(2, 9)}
    eig_ok = True
    for lv in range(2, 7):
        err_now = [abs(a - b) for a, b in zip(lam[lv], lam[8])]
        err_next = [abs(a - b) for a, b in zip(lam[lv + 1], lam[8])]
        if not all(e2 <= e1 for e1, e2 in zip(err_now, err_next)):
            eig_ok = False
    elapsed = time.perf_counter() - t0
    ok = hs_ok and eig_ok and elapsed < 120.0
    assert report(5, "norm-resolvent convergence", ok,
                  f"hs {['%.1e' % hs[lv] for lv in range(2, 8)]}, "
                  f"eig monotone {eig_ok}, {elapsed:.1f}s")


def test_criterion_06_m_asymptotics():
    m = SingularMeasure.from_atoms([(1.0, 1.0)])
    p = ProblemSpec((0.0, 50.0), bc_left="neumann", measure=m)
    devs = []
    for r in (1e4, 1e5, 1e6):
        devs.append(abs(math.sqrt(r) * m_function(p, -r) - 1.0))
    herglotz_ok = True
    rng = np.random.default_rng(99)
    for _ in range(40):
        z = complex(rng.uniform(-100.0, 100.0), rng.uniform(0.05, 100.0))
        if m_function(p, z).imag * z.imag <= 0.0:
            herglotz_ok = False
    ok = max(devs) < 0.05 and herglotz_ok
    assert report(6, "m-function asymptotics", ok,
                  f"|sqrt(r) m + ... - 1| = {['%.1e' % d for d in devs]}, "
                  f"herglotz {herglotz_ok}")


def test_criterion_07_spectral_function():
    t0 = time.perf_counter()
    p = ProblemSpec((0.0, 50.0), bc_left="neumann")
    t = 1.0e5
    rho = spectral_function(p, t)
    dev = abs(math.pi / 2.0 * rho / math.sqrt(t) - 1.0)
    elapsed = time.perf_counter() - t0
    ok = dev < 0.05 and elapsed < 60.0
    assert report(7, "spectral function growth", ok,
                  f"|(pi/2) rho/sqrt(t) - 1| = {dev:.2e}, {elapsed:.1f}s")


def test_criterion_08_classification():
    pairs = {
        "finite+finite": (EndpointDescriptor("left", 0.0),
                          EndpointDescriptor("right", 1.0), (2, 2)),
        "whole line": (EndpointDescriptor("left", -math.inf),
                       EndpointDescriptor("right", math.inf), (0, 0)),
        "half line": (EndpointDescriptor("left", 0.0),
                      EndpointDescriptor("right", math.inf), (1, 1)),
    }
    ok = True
    for name, (l, r, expect) in pairs.items():
        got = deficiency_indices(classify_endpoint(l), classify_endpoint(r))
        if got != expect:
            ok = False
    assert report(8, "endpoint classification", ok,
                  "three canonical descriptors exact")


def test_criterion_09_criteria_verdicts():
    def tile(lengths, hi=40.0, lo=0.5):
        total = sum(lengths)
        sep = (hi - lo - total) / (len(lengths) + 1)
        gaps, pos = [], lo + sep
        for d in lengths:
            gaps.append((pos, pos + d))
            pos += d + sep
        return GapStructure(tuple(gaps))

    k = 200
    shrinking = tile([1.0 / (j + 1) for j in range(k)])
    edges = np.linspace(0.0, 41.0, 400)
    qx = PiecewisePotential(tuple(edges[1:-1].tolist()),
                            tuple((0.5 * (edges[:-1] + edges[1:])).tolist()))
    r1 = evaluate_criteria(shrinking, qx, epsilon_grid=(0.5, 1.0))
    r2 = evaluate_criteria(tile([0.15] * 120), PiecewisePotential((), (1.0,)),
                           epsilon_grid=(0.5,))
    r3 = evaluate_criteria(shrinking, PiecewisePotential((), (0.0,)),
                           epsilon_grid=(0.5,))
    diverging = r3.necessary_seq[-1] > 100.0 * max(r3.necessary_seq[0], 1.0)
    ok = (r1.verdict == "discrete" and r2.verdict == "not_discrete"
          and r3.verdict == "inconclusive" and diverging)
    assert report(9, "discreteness criteria verdicts", ok,
                  f"{r1.verdict}/{r2.verdict}/{r3.verdict}, "
                  f"necessary-seq divergence {diverging}")


def test_criterion_10_structural_invariants():
    t0 = time.perf_counter()
    rng = np.random.default_rng(424242)
    det_ok = wronski_ok = green_ok = minmax_ok = scaling_ok = True
    for k in range(100):
        length = float(rng.uniform(0.5, 2.0))
        n = int(rng.integers(1, 7))
        xs = np.sort(rng.uniform(0.05 * length, 0.95 * length, n))
        while n > 1 and np.min(np.diff(xs)) < 0.02 * length:
            xs = np.sort(rng.uniform(0.05 * length, 0.95 * length, n))
        betas = rng.uniform(0.05, 0.5, n)
        signs = rng.choice([-1.0, 1.0], n)
        m_signed = SingularMeasure.from_atoms(
            zip(xs.tolist(), (betas * signs).tolist()))
        m_pos = SingularMeasure.from_atoms(zip(xs.tolist(), betas.tolist()))
        ncells = int(rng.integers(1, 5))
        bps = np.sort(rng.uniform(0.1 * length, 0.9 * length, ncells - 1))
        pot = PiecewisePotential(tuple(bps.tolist()),
                                 tuple(rng.uniform(-2.0, 2.0, ncells)))
        p = ProblemSpec((0.0, length), potential=pot, measure=m_signed)
        z = float(rng.uniform(-4.0, 60.0))

        # transfer-matrix factors and full products are unimodular
        M = transfer_matrix(p, z)
        if abs(M.det() - 1.0) > 1e-12:
            det_ok = False
        if abs(atom_jump(float(betas[0])).det() - 1.0) > 1e-12:
            det_ok = False
        if abs(stretch_propagator(length / 3.0, pot.values[0], z).det()
               - 1.0) > 1e-12:
            det_ok = False

        # Wronskian constancy of the two boundary solutions
        ws = []
        for x in np.linspace(0.0, length, 5):
            phi = propagate(p, z, StateVector(0.0, 1.0), x_from=0.0,
                            x_to=float(x)).state
            psi = propagate(p, z, StateVector(0.0, 1.0), from_left=False,
                            x_from=length, x_to=float(x)).state
            ws.append(wronskian(phi, psi))
        if max(abs(w - ws[0]) for w in ws) > 1e-10 * max(1.0, abs(ws[0])):
            wronski_ok = False

        # Green kernel symmetry off the spectrum
        if k < 30:
            kern = GreenKernel(p, -1.0 - float(rng.uniform(0.0, 3.0)))
            for _ in range(4):
                x, t = rng.uniform(0.01 * length, 0.99 * length, 2)
                gxt, gtx = kern(x, t), kern(t, x)
                if abs(gxt - gtx) > 1e-10 * max(1.0, abs(gxt)):
                    green_ok = False

        # min-max monotonicity in a positive coupling
        if k < 20:
            p_pos = ProblemSpec((0.0, length), measure=m_pos)
            j = int(rng.integers(0, n))
            bumped = list(m_pos.atoms)
            bumped[j] = (bumped[j][0], bumped[j][1] * 1.15)
            p_up = ProblemSpec((0.0, length),
                               measure=SingularMeasure(atoms=tuple(bumped)))
            lo = eigenvalues(p_pos, n_max=3, with_norming=False).eigenvalues
            up = eigenvalues(p_up, n_max=3, with_norming=False).eigenvalues
            if not all(b <= a + 1e-9 * max(1.0, abs(a))
                       for a, b in zip(lo, up)):
                minmax_ok = False

        # interval scaling law, exact for closed-form propagators
        if k < 20:
            s = float(rng.uniform(0.4, 2.5))
            base = eigenvalues(ProblemSpec((0.0, 1.0)), n_max=3,
                               with_norming=False).eigenvalues
            scaled = eigenvalues(ProblemSpec((0.0, s)), n_max=3,
                                 with_norming=False).eigenvalues
            for a, b in zip(base, scaled):
                if abs(b - a / s ** 2) > 1e-12 * max(1.0, abs(b)):
                    scaling_ok = False
    elapsed = time.perf_counter() - t0
    ok = (det_ok and wronski_ok and green_ok and minmax_ok and scaling_ok
          and elapsed < 60.0)
    assert report(10, "structural invariants", ok,
                  f"det {det_ok}, wronskian {wronski_ok}, green {green_ok}, "
                  f"minmax {minmax_ok}, scaling {scaling_ok}, {elapsed:.1f}s")
