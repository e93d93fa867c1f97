"""Constrained L1 minimization and extraction of the candidate spline.

The discretized objective

    (2*pi/N) * sum_i | c + sum_k c_k psi_k(x_i) |

is minimized subject to sum_k c_k C_k = 1 and sum_k c_k = 0, where
psi_k is the smoothed Bernoulli kernel filtered by the weight and shifted
to the node.  The optimizer g = c + sum c_k psi_k changes sign at most 2m
times; its sign pattern supplies the knots of the candidate perfect
spline, and the Lagrange multipliers of the problem supply its amplitude
and offset.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .errors import (
    AllZero,
    DegenerateLP,
    InfeasibleTargets,
    NullMultiplier,
    StationarityResidual,
    TooManySignChanges,
)
from .kernels import SmoothingKernel, WeightFunction
from .spectral import TWO_PI, PeriodicFunction, SpectralGrid
from .spline import PerfectSpline

_ZERO_SAMPLE_TOL = 1e-7  # relative |g| below which a grid sample counts as a zero


@dataclass(frozen=True)
class MeanInterpolationProblem:
    """Order r, knot budget 2m, 2m+1 weighted nodes, targets, discretization."""

    r: int
    m: int
    nodes: tuple  # ((x_k, WeightFunction), ...)
    targets: np.ndarray
    smoothing: float = 1e-3
    grid_n: int = 2048
    bandwidth: int = 4096

    def __post_init__(self):
        nodes = tuple((float(x), w) for x, w in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        targets = np.asarray(self.targets, dtype=float)
        targets.flags.writeable = False
        object.__setattr__(self, "targets", targets)
        if self.r < 1 or self.m < 1:
            raise ValueError("r and m must be positive integers")
        if len(nodes) != 2 * self.m + 1:
            raise ValueError(f"expected {2 * self.m + 1} nodes, got {len(nodes)}")
        if targets.size != len(nodes):
            raise ValueError("one target per node required")
        if self.smoothing < 0:
            raise ValueError("smoothing must be >= 0")
        xs = np.array([x for x, _ in nodes])
        if np.any(np.diff(xs) <= 0):
            raise ValueError("nodes must be strictly increasing")
        lo = np.array([x - w.eps for x, w in nodes])
        hi = np.array([x + w.eps for x, w in nodes])
        if lo[0] < 0 or hi[-1] >= TWO_PI:
            raise ValueError("weight supports must lie inside [0, 2*pi)")
        if np.any(hi[:-1] >= lo[1:]):
            raise ValueError("weight supports must be pairwise disjoint")

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def grid(self) -> SpectralGrid:
        return SpectralGrid(self.grid_n)


@dataclass(frozen=True, eq=False)
class L1Solution:
    """Optimizer of the discretized problem and the integrand it defines."""

    c: float
    coeffs: np.ndarray  # c_1 .. c_{2m+1}
    g: PeriodicFunction
    objective: float


@dataclass(frozen=True)
class LagrangeCertificate:
    """Multipliers (eta, lambda, mu) on the unit sphere; eta, lambda != 0."""

    eta: float
    lam: float
    mu: float

    def __post_init__(self):
        norm = np.sqrt(self.eta ** 2 + self.lam ** 2 + self.mu ** 2)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError("certificate must lie on the unit sphere")
        if abs(self.eta) <= 1e-8 or abs(self.lam) <= 1e-8:
            raise NullMultiplier("eta and lambda must be nonzero")


def compute_targets(f: PeriodicFunction, nodes) -> np.ndarray:
    """Weighted local averages C_k = int phi_k(x - x_k) f(x) dx, exactly in
    the spectral representation (constant f gives C_k = f)."""
    js = np.arange(-f.bandwidth, f.bandwidth + 1)
    out = []
    for x_k, w in nodes:
        val = np.sum(f.coeffs * w.transfer(js) * np.exp(1j * js * x_k))
        out.append(float(np.real(val)))
    return np.array(out)


def assemble_basis(p: MeanInterpolationProblem) -> list[PeriodicFunction]:
    """Basis functions with psihat_k(j) = sech(eps j) (i j)^-r what_k(j) e^{-i j x_k}."""
    j_max = p.bandwidth
    js = np.arange(-j_max, j_max + 1)
    smoother = SmoothingKernel(p.smoothing).transfer(js)
    nz = js != 0
    bern = np.zeros(js.size, dtype=complex)
    bern[nz] = (1j * js[nz].astype(float)) ** (-float(p.r))
    basis = []
    for x_k, w in p.nodes:
        coeffs = smoother * bern * w.transfer(js) * np.exp(-1j * js * float(x_k))
        basis.append(PeriodicFunction(coeffs))
    return basis


def _design_matrix(p: MeanInterpolationProblem, basis) -> np.ndarray:
    """Grid samples [1, psi_1(x_i), ..., psi_K(x_i)], shape (N, K+1)."""
    cols = [np.ones(p.grid_n)]
    cols.extend(psi.sample(p.grid_n) for psi in basis)
    return np.column_stack(cols)


def _g_function(p: MeanInterpolationProblem, basis, c: float,
                coeffs: np.ndarray) -> PeriodicFunction:
    j_max = p.bandwidth
    total = np.zeros(2 * j_max + 1, dtype=complex)
    total[j_max] = c
    for ck, psi in zip(coeffs, basis):
        total += ck * psi.coeffs
    return PeriodicFunction(total)


def solve_l1(p: MeanInterpolationProblem, basis=None) -> L1Solution:
    """Solve the discretized constrained L1 problem exactly.

    Reformulated as an LP with split absolute values and solved by dual
    simplex; the returned vertex is then re-solved ("polished") from its
    active set so the equality constraints hold to machine precision.
    """
    targets = p.targets
    spread = np.max(targets) - np.min(targets)
    if spread <= 1e-12 * max(1.0, np.max(np.abs(targets))):
        raise InfeasibleTargets("all targets equal; take the constant spline")
    if basis is None:
        basis = assemble_basis(p)
    n, k = p.grid_n, p.node_count
    d = k + 1
    a = _design_matrix(p, basis)
    w = TWO_PI / n

    # variables [z (d), u (n)]: min w*sum(u) s.t. +-(A z) <= u, B z = b
    cost = np.concatenate([np.zeros(d), np.full(n, w)])
    a_sp = sp.csr_matrix(a)
    eye = sp.identity(n, format="csr")
    a_ub = sp.vstack([sp.hstack([a_sp, -eye]), sp.hstack([-a_sp, -eye])],
                     format="csr")
    b_ub = np.zeros(2 * n)
    b_mat = np.zeros((2, d))
    b_mat[0, 1:] = targets
    b_mat[1, 1:] = 1.0
    a_eq = sp.hstack([sp.csr_matrix(b_mat), sp.csr_matrix((2, n))], format="csr")
    b_eq = np.array([1.0, 0.0])
    bounds = [(None, None)] * d + [(0, None)] * n
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                  bounds=bounds, method="highs-ds")
    if not res.success:
        raise DegenerateLP(f"LP failed: {res.message}")
    z = res.x[:d]

    def objective(zv):
        return w * float(np.sum(np.abs(a @ zv)))

    obj = objective(z)
    # polish: a simplex vertex has g = 0 at exactly 2m grid points; solving
    # the square system {g(x_z) = 0, constraints} recovers it exactly
    g_grid = a @ z
    zeros = np.argsort(np.abs(g_grid))[: d - 2]
    square = np.vstack([a[zeros], b_mat])
    rhs = np.concatenate([np.zeros(d - 2), b_eq])
    try:
        z_pol = np.linalg.solve(square, rhs)
    except np.linalg.LinAlgError:
        z_pol = None
    if z_pol is not None and objective(z_pol) <= obj * (1 + 1e-9) + 1e-12:
        z = z_pol
        obj = objective(z)
    else:
        # fall back: least-norm correction of the equality constraints
        resid = b_mat @ z - b_eq
        z = z - b_mat.T @ np.linalg.solve(b_mat @ b_mat.T, resid)
        obj = objective(z)

    g = _g_function(p, basis, z[0], z[1:])
    return L1Solution(c=float(z[0]), coeffs=z[1:].copy(), g=g, objective=obj)


def recover_certificate(sol: L1Solution, p: MeanInterpolationProblem,
                        basis=None) -> LagrangeCertificate:
    """Recover (eta, lambda, mu) from the stationarity system.

    With eta fixed to 1, the discrete optimality conditions read

        I_k + (1/N) sum_z v_z psi_k(x_z) + lambda C_k + mu = 0
        (1/N) (sum_i sgn g(x_i) + sum_z v_z) = 0

    where I_k = (1/N) sum over non-zero samples of sgn g(x_i) psi_k(x_i)
    and v_z in [-1, 1] are the subgradient values at the grid points where
    the optimal g vanishes.  The 1/N scaling (rather than 2*pi/N against
    the assembled basis) keeps the multipliers in the normalization of the
    smoothed Bernoulli-weight convolution, so the spline amplitude is
    -(-1)^r eta / lambda directly.  The system is solved jointly for
    (lambda, mu, v); it is square when g has exactly 2m grid zeros.
    """
    if basis is None:
        basis = assemble_basis(p)
    n, k = p.grid_n, p.node_count
    psi_grid = np.column_stack([psi.sample(n) for psi in basis])
    g_grid = sol.g.sample(n)
    peak = np.max(np.abs(g_grid))
    if peak == 0.0:
        raise AllZero("optimal integrand vanishes identically")
    zero_mask = np.abs(g_grid) < _ZERO_SAMPLE_TOL * peak
    if np.count_nonzero(zero_mask) > 4 * p.m + 4:
        raise StationarityResidual(
            "optimal integrand vanishes on a large sample set; "
            "increase the smoothing parameter"
        )
    signs = np.where(zero_mask, 0.0, np.sign(g_grid))
    i_vec = (signs @ psi_grid) / n

    z_idx = np.nonzero(zero_mask)[0]
    rows = np.zeros((k + 1, 2 + z_idx.size))
    rhs = np.zeros(k + 1)
    rows[:k, 0] = p.targets
    rows[:k, 1] = 1.0
    rows[:k, 2:] = psi_grid[z_idx].T / n
    rhs[:k] = -i_vec
    rows[k, 2:] = 1.0 / n
    rhs[k] = -float(np.sum(signs)) / n
    solution, _, _, _ = np.linalg.lstsq(rows, rhs, rcond=None)
    resid = np.max(np.abs(rows @ solution - rhs))
    scale = max(np.max(np.abs(i_vec)), 1e-300)
    if resid > 1e-6 * scale:
        raise StationarityResidual(
            f"multiplier system residual {resid:.3e} exceeds 1e-6 * {scale:.3e}"
        )
    subgrad = solution[2:]
    if subgrad.size and np.max(np.abs(subgrad)) > 1.5:
        raise StationarityResidual(
            "subgradient values outside [-1, 1]: LP vertex is not stationary"
        )
    lam, mu = float(solution[0]), float(solution[1])
    norm = np.sqrt(1.0 + lam ** 2 + mu ** 2)
    if abs(lam / norm) < 1e-8:
        raise NullMultiplier("lambda vanished after normalization")
    return LagrangeCertificate(eta=1.0 / norm, lam=lam / norm, mu=mu / norm)


def sign_balance(sol: L1Solution, p: MeanInterpolationProblem) -> float:
    """Mean of sgn g over the grid (zero samples excluded).

    Stationarity in c makes the continuous integral vanish; on the grid the
    imbalance is bounded by the number of zero samples over N.
    """
    g_grid = sol.g.sample(p.grid_n)
    peak = np.max(np.abs(g_grid))
    signs = np.where(np.abs(g_grid) < _ZERO_SAMPLE_TOL * peak, 0.0,
                     np.sign(g_grid))
    return float(np.sum(signs)) / p.grid_n


def _bisect_root(g: PeriodicFunction, a: float, b: float, fa: float,
                 peak: float) -> float:
    target = 1e-13 * peak
    best_x, best_f = a, abs(fa)
    while b - a > 1e-14:
        mid = 0.5 * (a + b)
        fm = g.evaluate(mid)
        if abs(fm) < best_f:
            best_x, best_f = mid, abs(fm)
            if best_f <= target:
                break
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    return best_x if best_f <= abs(g.evaluate(0.5 * (a + b))) else 0.5 * (a + b)


def extract_knots(g: PeriodicFunction, grid: SpectralGrid | None = None,
                  zero_tol: float = 1e-9, max_changes: int | None = None
                  ) -> np.ndarray:
    """Localize the sign changes of g to machine precision.

    Consecutive accepted samples with opposite signs bracket a root, which
    is then bisected down to |g| <= 1e-13 * ||g|| or interval width 1e-14.
    """
    if grid is None:
        grid = SpectralGrid(max(4 * g.bandwidth + 4, 256))
    xs = grid.points
    vals = g.sample(grid.n)
    peak = np.max(np.abs(vals))
    if peak == 0.0:
        raise AllZero("integrand vanishes at every sample")
    keep = np.nonzero(np.abs(vals) >= zero_tol * peak)[0]
    if keep.size == 0:
        raise AllZero("integrand below tolerance at every sample")
    roots = []
    for a_pos in range(keep.size):
        i = keep[a_pos]
        i_next = keep[(a_pos + 1) % keep.size]
        if np.sign(vals[i]) == np.sign(vals[i_next]):
            continue
        a = xs[i]
        b = xs[i_next] if i_next > i else xs[i_next] + TWO_PI
        roots.append(_bisect_root(g, a, b, vals[i], peak) % TWO_PI)
    knots = np.sort(np.array(roots))
    if max_changes is not None and knots.size > max_changes:
        raise TooManySignChanges(
            f"{knots.size} sign changes exceed the budget of {max_changes}"
        )
    return knots


def build_candidate(knots: np.ndarray, cert: LagrangeCertificate,
                    g: PeriodicFunction, p: MeanInterpolationProblem
                    ) -> PerfectSpline:
    """Assemble the candidate spline s with s^(r) = -(-1)^r (eta/lambda) sgn g.

    The leading sign is the sign of g on the first knot interval; the
    amplitude carries the sign of -(-1)^r eta/lambda so the product
    xi * lead_sign * (-1)^i reproduces that derivative.  The mean-zero
    residual of LP-extracted knots scales with the grid spacing; the
    admission threshold reflects that (refinement tightens it afterwards).
    """
    knots = np.asarray(knots, dtype=float)
    if knots.size < 2 or knots.size % 2 != 0:
        raise DegenerateLP("candidate requires an even, positive knot count")
    mid = 0.5 * (knots[0] + knots[1])
    lead = 1 if g.evaluate(mid) > 0 else -1
    xi = -((-1.0) ** p.r) * cert.eta / cert.lam
    offset = -cert.mu / cert.lam
    tol = 4.0 * (p.node_count + 1) * TWO_PI / p.grid_n
    return PerfectSpline(r=p.r, knots=knots, lead_sign=lead, xi=xi,
                         offset=offset, mean_zero_tol=tol)
