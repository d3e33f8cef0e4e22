"""Shared helpers: random instance generators and independent oracles."""
import numpy as np
import pytest

from deltaprime import PiecewisePotential, ProblemSpec, SingularMeasure


def random_measure(rng, n_atoms=None, lo=0.0, hi=1.0, beta_lo=0.05,
                   beta_hi=0.5, signed=True, min_gap=0.02):
    """Random atomic measure with separated atoms inside (lo, hi)."""
    if n_atoms is None:
        n_atoms = int(rng.integers(1, 7))
    span = hi - lo
    while True:
        xs = np.sort(rng.uniform(lo + 0.05 * span, hi - 0.05 * span, n_atoms))
        if n_atoms == 1 or np.min(np.diff(xs)) >= min_gap * span:
            break
    betas = rng.uniform(beta_lo, beta_hi, n_atoms)
    if signed:
        betas *= rng.choice([-1.0, 1.0], n_atoms)
    return SingularMeasure.from_atoms(zip(xs.tolist(), betas.tolist()))


def random_problem(rng, signed=True, with_q=True):
    length = rng.uniform(0.5, 3.0)
    measure = random_measure(rng, lo=0.0, hi=length, signed=signed)
    if with_q and rng.random() < 0.7:
        ncells = int(rng.integers(2, 5))
        bps = np.sort(rng.uniform(0.1 * length, 0.9 * length, ncells - 1))
        vals = rng.uniform(-5.0, 5.0, ncells)
        pot = PiecewisePotential(tuple(bps.tolist()), tuple(vals.tolist()))
    else:
        pot = PiecewisePotential()
    return ProblemSpec((0.0, float(length)), potential=pot, measure=measure)


def rk4_state(q_val, z, length, u0, u1, steps=20000):
    """High-order ODE oracle for one stretch: u' = u1, u1' = (q - z) u."""
    h = length / steps
    u, v = complex(u0), complex(u1)
    w = q_val - z

    def f(y):
        return np.array([y[1], w * y[0]], dtype=complex)

    y = np.array([u, v], dtype=complex)
    for _ in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y[0], y[1]


def distribution_brute(measure, x, level):
    from deltaprime import realize
    return sum(w for (p, w) in realize(measure, level) if p < x)


def peak_variation_brute(measure, x, level, start=0.0, n=4001):
    """Dense-grid oracle for the peak variation of P on [start, x]."""
    from deltaprime import realize
    atoms = [(p, w) for (p, w) in realize(measure, level) if start <= p < x]

    def P(s):
        return (s - start) + sum(w for (p, w) in atoms if p < s)

    pts = set(np.linspace(start, x, n).tolist())
    for (p, _) in atoms:
        pts.add(p)
        pts.add(min(p + 1e-12, x))
    vals = [P(s) for s in sorted(pts)]
    best = 0.0
    lo = hi = vals[0]
    for v in vals:
        best = max(best, v - lo, hi - v)
        lo = min(lo, v)
        hi = max(hi, v)
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
