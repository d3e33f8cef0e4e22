"""Exact state propagation for (tau - z)u = 0 across cells and atoms.

The quasi-derivative state (u, u^[1]) evolves by closed-form 2x2 transfer
matrices: trig/hyperbolic flow on constant-potential stretches and the shear
u(x+) = u(x-) + beta*u^[1](x) at each measure atom (u^[1] is continuous
across atoms).  All matrices are unimodular.  Propagation renormalizes the
state beyond hyperbolic growth 1e100 and keeps the scale in log form, so
deep-z shooting never overflows; signs, zero counts and Weyl ratios are
scale-invariant.
"""
from __future__ import annotations

import bisect
import cmath
import functools
import math
from dataclasses import dataclass

from .errors import PropagationOverflowError
from .measures import SingularMeasure, realize

__all__ = [
    "PiecewisePotential",
    "ProblemSpec",
    "StateVector",
    "TransferMatrix",
    "atom_jump",
    "stretch_propagator",
    "propagate",
    "PropagationResult",
    "wronskian",
    "transfer_matrix",
    "transfer_matrix_with_dz",
    "cell_l2_integral",
]

RESCALE_LIMIT = 1e100
SERIES_THRESHOLD = 1e-8   # |w| L^2 below which the entire-series branch is used
EXP_SPLIT = 300.0         # hyperbolic phase beyond which factors are scaled


@dataclass(frozen=True)
class PiecewisePotential:
    """Piecewise-constant potential: values[i] on the i-th cell.

    breakpoints are the interior cut positions; values has one more entry.
    The first/last values extend to the ambient interval ends.
    """

    breakpoints: tuple[float, ...] = ()
    values: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        if len(self.values) != len(self.breakpoints) + 1:
            raise ValueError("need len(values) == len(breakpoints) + 1")
        if any(b >= c for b, c in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    def value(self, x: float) -> float:
        return self.values[bisect.bisect_right(self.breakpoints, x)]

    def integral(self, x0: float, x1: float) -> float:
        """Exact integral of q over [x0, x1]."""
        if x1 < x0:
            return -self.integral(x1, x0)
        cuts = [x0] + [b for b in self.breakpoints if x0 < b < x1] + [x1]
        return math.fsum(
            self.value(0.5 * (lo + hi)) * (hi - lo)
            for lo, hi in zip(cuts, cuts[1:]))

    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)


@dataclass(frozen=True)
class ProblemSpec:
    """A realized spectral problem on a finite interval.

    Half-line and whole-line operators enter as wide truncations with the
    boundary condition imposed at the artificial endpoint; the truncation
    width is chosen per experiment.
    """

    interval: tuple[float, float]
    bc_left: str = "dirichlet"
    bc_right: str = "dirichlet"
    potential: PiecewisePotential = PiecewisePotential()
    measure: SingularMeasure = SingularMeasure()
    level: int = 6

    def __post_init__(self):
        a, b = self.interval
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ValueError("interval must be finite with a < b")
        for bc in (self.bc_left, self.bc_right):
            if bc not in ("dirichlet", "neumann"):
                raise ValueError(f"unknown boundary condition {bc!r}")
        if self.level < 0:
            raise ValueError("level must be nonnegative")

    @property
    def a(self) -> float:
        return self.interval[0]

    @property
    def b(self) -> float:
        return self.interval[1]

    def left_init(self) -> "StateVector":
        return StateVector(0.0, 1.0) if self.bc_left == "dirichlet" \
            else StateVector(1.0, 0.0)

    def right_init(self) -> "StateVector":
        return StateVector(0.0, 1.0) if self.bc_right == "dirichlet" \
            else StateVector(1.0, 0.0)

    def is_nonnegative_measure(self) -> bool:
        return self.measure.is_nonnegative(self.level)


class RealizedProblem:
    """Cell/atom walk data for one ProblemSpec at its refinement level."""

    def __init__(self, problem: ProblemSpec):
        a, b = problem.interval
        atoms = realize(problem.measure, problem.level)
        for (x, _) in atoms:
            if not (a <= x < b):
                raise ValueError(
                    f"realized atom at {x} outside [{a}, {b}) "
                    "(left-endpoint realizations may touch a)")
        cuts = {a, b}
        cuts.update(x for (x, _) in atoms)
        cuts.update(p for p in problem.potential.breakpoints if a < p < b)
        self.nodes = sorted(cuts)
        self.qvals = [problem.potential.value(0.5 * (lo + hi))
                      for lo, hi in zip(self.nodes, self.nodes[1:])]
        self.atom_at = {x: w for (x, w) in atoms}
        self.atoms = atoms
        self.a, self.b = a, b


@functools.lru_cache(maxsize=128)
def realize_problem(problem: ProblemSpec) -> RealizedProblem:
    return RealizedProblem(problem)


@dataclass(frozen=True)
class StateVector:
    """Quasi-derivative state (u, u^[1]) with a log-scale factor.

    True values are u*exp(log_scale), u1*exp(log_scale).
    """

    u: complex | float
    u1: complex | float
    log_scale: float = 0.0

    def true_values(self):
        if self.log_scale > 700.0:
            raise PropagationOverflowError(
                "state magnitude exceeds double range; keep the log form")
        s = math.exp(self.log_scale)
        return self.u * s, self.u1 * s


@dataclass(frozen=True)
class TransferMatrix:
    """Unimodular 2x2 flow factor acting on column states (u, u^[1])."""

    a11: complex | float
    a12: complex | float
    a21: complex | float
    a22: complex | float
    log_scale: float = 0.0

    def det(self):
        """True determinant, including the extracted scale."""
        d = self.a11 * self.a22 - self.a12 * self.a21
        return d * math.exp(2.0 * self.log_scale)

    def apply(self, state: StateVector) -> StateVector:
        return StateVector(
            self.a11 * state.u + self.a12 * state.u1,
            self.a21 * state.u + self.a22 * state.u1,
            state.log_scale + self.log_scale)

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
            self.log_scale + other.log_scale)


def _cs(w, L):
    """Scaled stretch kernels: cos(oL) = C*e^ls, sin(oL)/o = S*e^ls, o=sqrt(w).

    Entire in w; the series branch avoids cancellation near w = 0 and the
    scaled branch avoids overflow for large hyperbolic phases.
    """
    if abs(w) * L * L < SERIES_THRESHOLD:
        wl2 = w * L * L
        C = 1.0 - wl2 / 2.0 * (1.0 - wl2 / 12.0)
        S = L * (1.0 - wl2 / 6.0 * (1.0 - wl2 / 20.0))
        return C, S, 0.0
    if isinstance(w, complex):
        om = cmath.sqrt(w)
        m = om * L
        mu = abs(m.imag)
        if mu <= EXP_SPLIT:
            return cmath.cos(m), cmath.sin(m) / om, 0.0
        ea = cmath.exp(1j * m - mu)
        eb = cmath.exp(-1j * m - mu)
        return (ea + eb) / 2.0, (ea - eb) / (2j * om), mu
    if w > 0.0:
        om = math.sqrt(w)
        return math.cos(om * L), math.sin(om * L) / om, 0.0
    k = math.sqrt(-w)
    t = k * L
    if abs(t) <= EXP_SPLIT:
        return math.cosh(t), math.sinh(t) / k, 0.0
    e2 = math.exp(-2.0 * abs(t))
    sgn = 1.0 if t > 0 else -1.0
    return (1.0 + e2) / 2.0, sgn * (1.0 - e2) / (2.0 * k), abs(t)


def atom_jump(beta: float) -> TransferMatrix:
    """Jump factor at an atom of weight beta: u += beta*u^[1]."""
    return TransferMatrix(1.0, beta, 0.0, 1.0)


def stretch_propagator(length: float, q_val: float, z) -> TransferMatrix:
    """Closed-form flow over a constant-q stretch, entire in z."""
    if length <= 0.0:
        raise ValueError("stretch length must be positive")
    w = z - q_val
    C, S, ls = _cs(w, length)
    return TransferMatrix(C, S, -w * S, C, ls)


def _stretch_entries_dz(length, q_val, z):
    """Stretch factor and its z-derivative (unscaled; moderate z only)."""
    w = z - q_val
    L = length
    C, S, ls = _cs(w, L)
    if ls != 0.0:
        raise PropagationOverflowError("z-derivative path requires moderate z")
    dC = -0.5 * L * S
    if abs(w) * L * L < 1e-5:
        dS = -L ** 3 / 6.0 + w * L ** 5 / 60.0
    else:
        dS = (L * C - S) / (2.0 * w)
    dB = -S - w * dS
    return (C, S, -w * S, C), (dC, dS, dB, dC)


def _rescale(u, u1, log_scale):
    m = max(abs(u), abs(u1))
    if m > RESCALE_LIMIT or (0.0 < m < 1.0 / RESCALE_LIMIT):
        return u / m, u1 / m, log_scale + math.log(m)
    if m == 0.0:
        raise PropagationOverflowError("state collapsed to zero")
    return u, u1, log_scale


def _count_stretch_zeros(u, u1, w, L, u_end):
    """Exact number of interior zeros of u on an open stretch (real data)."""
    if w > 0.0:
        om = math.sqrt(w)
        phi0 = math.atan2(om * u, u1)
        phi1 = phi0 + om * L
        hi = math.ceil(phi1 / math.pi) - 1
        lo = math.floor(phi0 / math.pi) + 1
        return hi - lo + 1 if hi >= lo else 0
    # hyperbolic/linear: at most one zero, present iff strict sign change
    return 1 if u * u_end < 0.0 else 0


@dataclass(frozen=True)
class PropagationResult:
    state: StateVector
    zero_count: int | None


def propagate(problem: ProblemSpec, z, init: StateVector | None = None,
              from_left: bool = True, x_from: float | None = None,
              x_to: float | None = None) -> PropagationResult:
    """Propagate a state across (part of) the interval.

    Atoms in [min(x), max(x)) are crossed; states carry left-limit values
    of u.  zero_count (exact interior sign changes of u, atoms included)
    is returned for real z on left-to-right runs and None otherwise.
    """
    real = realize_problem(problem)
    is_real = not isinstance(z, complex)
    if from_left:
        x0 = real.a if x_from is None else x_from
        x1 = real.b if x_to is None else x_to
        if x1 < x0:
            raise ValueError("x_to must be >= x_from for left-to-right runs")
        state = init if init is not None else problem.left_init()
        return _walk_right(real, z, state, x0, x1, count=is_real)
    x0 = real.b if x_from is None else x_from
    x1 = real.a if x_to is None else x_to
    if x1 > x0:
        raise ValueError("x_to must be <= x_from for right-to-left runs")
    state = init if init is not None else problem.right_init()
    return _walk_left(real, z, state, x0, x1)


def _apply_stretch(u, u1, ls, w, L):
    C, S, dls = _cs(w, L)
    return C * u + S * u1, -w * S * u + C * u1, ls + dls


def _walk_right(real, z, state, x0, x1, count):
    u, u1, ls = state.u, state.u1, state.log_scale
    zeros = 0 if count else None
    nodes, qvals = real.nodes, real.qvals
    i = bisect.bisect_right(nodes, x0) - 1
    i = min(max(i, 0), len(qvals) - 1) if qvals else 0
    pos = x0
    while pos < x1:
        # atom exactly at the current position is crossed first
        beta = real.atom_at.get(pos)
        if beta is not None:
            up = u + beta * u1
            if count and not isinstance(u, complex) and u * up < 0.0:
                zeros += 1
            u = up
            u, u1, ls = _rescale(u, u1, ls)
        cell_end = nodes[i + 1] if i + 1 < len(nodes) else x1
        seg_end = min(cell_end, x1)
        L = seg_end - pos
        if L > 0.0:
            w = z - qvals[i]
            if count and not isinstance(z, complex):
                nu, nu1, nls = _apply_stretch(u, u1, ls, w, L)
                zeros += _count_stretch_zeros(u, u1, w, L, nu)
                u, u1, ls = nu, nu1, nls
            else:
                u, u1, ls = _apply_stretch(u, u1, ls, w, L)
            u, u1, ls = _rescale(u, u1, ls)
        pos = seg_end
        if pos == cell_end:
            i += 1
    return PropagationResult(StateVector(u, u1, ls), zeros)


def _walk_left(real, z, state, x0, x1):
    u, u1, ls = state.u, state.u1, state.log_scale
    nodes, qvals = real.nodes, real.qvals
    i = bisect.bisect_left(nodes, x0)
    i = min(max(i - 1, 0), len(qvals) - 1) if qvals else 0
    pos = x0
    while pos > x1:
        cell_start = nodes[i] if i >= 0 else x1
        seg_start = max(cell_start, x1)
        L = pos - seg_start
        if L > 0.0:
            w = z - qvals[i]
            u, u1, ls = _apply_stretch(u, u1, ls, w, -L)
            u, u1, ls = _rescale(u, u1, ls)
        pos = seg_start
        beta = real.atom_at.get(pos)
        if beta is not None and pos >= x1:
            u = u - beta * u1          # inverse jump: recover the left limit
            u, u1, ls = _rescale(u, u1, ls)
        if pos == cell_start:
            i -= 1
    return PropagationResult(StateVector(u, u1, ls), None)


def cell_entry_states(problem: ProblemSpec, z, init: StateVector | None = None,
                      from_left: bool = True):
    """One full propagation, capturing the state entering every cell.

    Left-to-right: entry i is the state at nodes[i] *after* the atom there
    (the smooth value inside cell i).  Right-to-left: entry i is the
    left-limit state at nodes[i+1] as seen walking down from b.  Returns
    (nodes, qvals, entries, final_state).
    """
    real = realize_problem(problem)
    ncells = len(real.qvals)
    entries: list[StateVector | None] = [None] * ncells
    if from_left:
        state = init if init is not None else problem.left_init()
        u, u1, ls = state.u, state.u1, state.log_scale
        for i in range(ncells):
            beta = real.atom_at.get(real.nodes[i])
            if beta is not None:
                u = u + beta * u1
                u, u1, ls = _rescale(u, u1, ls)
            entries[i] = StateVector(u, u1, ls)
            w = z - real.qvals[i]
            u, u1, ls = _apply_stretch(u, u1, ls, w,
                                       real.nodes[i + 1] - real.nodes[i])
            u, u1, ls = _rescale(u, u1, ls)
        return real.nodes, real.qvals, entries, StateVector(u, u1, ls)
    state = init if init is not None else problem.right_init()
    u, u1, ls = state.u, state.u1, state.log_scale
    for i in range(ncells - 1, -1, -1):
        entries[i] = StateVector(u, u1, ls)
        w = z - real.qvals[i]
        u, u1, ls = _apply_stretch(u, u1, ls, w,
                                   -(real.nodes[i + 1] - real.nodes[i]))
        u, u1, ls = _rescale(u, u1, ls)
        beta = real.atom_at.get(real.nodes[i])
        if beta is not None:
            u = u - beta * u1
            u, u1, ls = _rescale(u, u1, ls)
    return real.nodes, real.qvals, entries, StateVector(u, u1, ls)


def wronskian(s1: StateVector, s2: StateVector):
    """Modified Wronskian u1*u2^[1] - u1^[1]*u2 at a common location."""
    raw = s1.u * s2.u1 - s1.u1 * s2.u
    total = s1.log_scale + s2.log_scale
    if total > 700.0:
        raise PropagationOverflowError("wronskian scale exceeds double range")
    return raw * math.exp(total)


def transfer_matrix(problem: ProblemSpec, z, x0: float | None = None,
                    x1: float | None = None) -> TransferMatrix:
    """Ordered product of all factors over [x0, x1] (left to right)."""
    real = realize_problem(problem)
    x0 = real.a if x0 is None else x0
    x1 = real.b if x1 is None else x1
    e1 = propagate(problem, z, StateVector(1.0, 0.0), x_from=x0, x_to=x1)
    e2 = propagate(problem, z, StateVector(0.0, 1.0), x_from=x0, x_to=x1)
    if e1.state.log_scale != e2.state.log_scale:
        u, u1 = e1.state.true_values()
        v, v1 = e2.state.true_values()
        return TransferMatrix(u, v, u1, v1)
    return TransferMatrix(e1.state.u, e2.state.u, e1.state.u1, e2.state.u1,
                          e1.state.log_scale)


def transfer_matrix_with_dz(problem: ProblemSpec, z):
    """Full-interval transfer matrix and its analytic z-derivative.

    Unscaled product (moderate z); used to certify that propagation is
    entire in z.
    """
    real = realize_problem(problem)
    M = (1.0, 0.0, 0.0, 1.0)
    dM = (0.0, 0.0, 0.0, 0.0)

    def comp(F, G):  # F @ G on entry 4-tuples
        return (F[0] * G[0] + F[1] * G[2], F[0] * G[1] + F[1] * G[3],
                F[2] * G[0] + F[3] * G[2], F[2] * G[1] + F[3] * G[3])

    def push(F, dF):
        nonlocal M, dM
        dM = tuple(a + b for a, b in zip(comp(dF, M), comp(F, dM)))
        M = comp(F, M)

    for i, (lo, hi) in enumerate(zip(real.nodes, real.nodes[1:])):
        beta = real.atom_at.get(lo)
        if beta is not None:
            push((1.0, beta, 0.0, 1.0), (0.0, 0.0, 0.0, 0.0))
        F, dF = _stretch_entries_dz(hi - lo, real.qvals[i], z)
        push(F, dF)
    return TransferMatrix(*M), dM


def cell_l2_integral(u, u1, w, L):
    """Exact integral of u(s)^2 over a stretch of length L (real data).

    u(s) = u*cos(om s) + u1*sin(om s)/om with om = sqrt(w); closed-form
    antiderivatives, series near w = 0.  Returns inf beyond double range.
    """
    C2, S2, ls2 = _cs(w, 2.0 * L)
    if ls2 != 0.0:
        return math.inf
    _, S1, _ = _cs(w, L)
    icc = L / 2.0 + S2 / 4.0
    ics = S1 * S1 / 2.0
    if abs(w) * L * L < 1e-6:
        iss = L ** 3 / 3.0 - w * L ** 5 / 15.0 + 2.0 * w * w * L ** 7 / 315.0
    else:
        iss = (L - S2 / 2.0) / (2.0 * w)
    return u * u * icc + 2.0 * u * u1 * ics + u1 * u1 * iss
