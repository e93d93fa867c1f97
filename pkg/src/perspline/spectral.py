"""Band-limited 2*pi-periodic real functions held as Fourier coefficients.

A function is stored as the coefficient array c_j, |j| <= J, of

    f(x) = sum_j c_j exp(i j x),

with Hermitian symmetry c_{-j} = conj(c_j) enforced at construction so
evaluation is real.  The convolution convention is the plain periodic
integral (f * g)(x) = int_0^{2pi} f(x - t) g(t) dt, whose transfer rule is
(f * g)^hat(j) = 2*pi * fhat(j) * ghat(j).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllZero

TWO_PI = 2.0 * np.pi

# chunk sizes for direct (non-FFT) evaluation at scattered points
_X_CHUNK = 256
_J_CHUNK = 8192


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform grid x_i = 2*pi*i/N with trapezoid weight 2*pi/N."""

    n: int

    def __post_init__(self):
        if self.n < 4 or self.n % 2 != 0:
            raise ValueError("grid size must be an even integer >= 4")

    @property
    def points(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n) / self.n

    @property
    def weight(self) -> float:
        return TWO_PI / self.n


@dataclass(frozen=True, eq=False)
class PeriodicFunction:
    """Real trigonometric polynomial; coeffs[J + j] holds c_j."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 == 0:
            raise ValueError("coefficients must be a 1-d array of odd length")
        sym = 0.5 * (c + np.conj(c[::-1]))
        scale = 1.0 + np.sum(np.abs(c))
        if np.max(np.abs(c - sym)) > 1e-10 * scale:
            raise ValueError("coefficients are not Hermitian-symmetric")
        sym.flags.writeable = False
        object.__setattr__(self, "coeffs", sym)

    @property
    def bandwidth(self) -> int:
        return (self.coeffs.size - 1) // 2

    def coeff(self, j: int) -> complex:
        if abs(j) > self.bandwidth:
            return 0.0 + 0.0j
        return self.coeffs[self.bandwidth + j]

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(bandwidth: int = 0) -> "PeriodicFunction":
        return PeriodicFunction(np.zeros(2 * bandwidth + 1, dtype=complex))

    @staticmethod
    def constant(value: float) -> "PeriodicFunction":
        return PeriodicFunction(np.array([value], dtype=complex))

    @staticmethod
    def from_harmonics(terms) -> "PeriodicFunction":
        """Build from (frequency, cos amplitude, sin amplitude) triples."""
        terms = list(terms)
        bandwidth = max((int(j) for j, _, _ in terms), default=0)
        c = np.zeros(2 * bandwidth + 1, dtype=complex)
        for j, a, b in terms:
            j = int(j)
            if j < 0:
                raise ValueError("harmonic frequencies must be >= 0")
            if j == 0:
                c[bandwidth] += a
            else:
                c[bandwidth + j] += 0.5 * (a - 1j * b)
                c[bandwidth - j] += 0.5 * (a + 1j * b)
        return PeriodicFunction(c)

    @staticmethod
    def fit_from_samples(values: np.ndarray, bandwidth: int) -> "PeriodicFunction":
        """Least-squares-exact coefficients from uniform samples (N >= 2J+2)."""
        values = np.asarray(values, dtype=float)
        n = values.size
        if n < 2 * bandwidth + 2:
            raise ValueError("need at least 2*J + 2 samples")
        spec = np.fft.fft(values) / n
        c = np.empty(2 * bandwidth + 1, dtype=complex)
        c[bandwidth] = spec[0]
        for j in range(1, bandwidth + 1):
            c[bandwidth + j] = spec[j]
            c[bandwidth - j] = spec[-j]
        return PeriodicFunction(c)

    # -- evaluation ------------------------------------------------------

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """Evaluate at scalar or array x (radians, reduced mod 2*pi)."""
        scalar = np.isscalar(x)
        xs = np.atleast_1d(np.asarray(x, dtype=float)) % TWO_PI
        j_max = self.bandwidth
        out = np.full(xs.shape, float(np.real(self.coeffs[j_max])))
        for x0 in range(0, xs.size, _X_CHUNK):
            xc = xs[x0:x0 + _X_CHUNK]
            acc = np.zeros(xc.size)
            for j0 in range(1, j_max + 1, _J_CHUNK):
                jj = np.arange(j0, min(j0 + _J_CHUNK, j_max + 1))
                phase = np.exp(1j * np.outer(xc, jj))
                acc += 2.0 * np.real(phase @ self.coeffs[j_max + jj])
            out[x0:x0 + _X_CHUNK] += acc
        return float(out[0]) if scalar else out

    def sample(self, n: int) -> np.ndarray:
        """Exact values on the uniform n-point grid via coefficient folding."""
        j_max = self.bandwidth
        folded = np.zeros(n, dtype=complex)
        js = np.arange(-j_max, j_max + 1)
        np.add.at(folded, js % n, self.coeffs)
        return np.real(np.fft.ifft(folded) * n)

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "PeriodicFunction") -> "PeriodicFunction":
        j = max(self.bandwidth, other.bandwidth)
        c = np.zeros(2 * j + 1, dtype=complex)
        c[j - self.bandwidth:j + self.bandwidth + 1] += self.coeffs
        c[j - other.bandwidth:j + other.bandwidth + 1] += other.coeffs
        return PeriodicFunction(c)

    def __sub__(self, other: "PeriodicFunction") -> "PeriodicFunction":
        return self + (other * -1.0)

    def __mul__(self, scalar: float) -> "PeriodicFunction":
        return PeriodicFunction(self.coeffs * float(scalar))

    __rmul__ = __mul__


def evaluate(f: PeriodicFunction, x):
    return f.evaluate(x)


def convolve(f: PeriodicFunction, g: PeriodicFunction) -> PeriodicFunction:
    """Periodic convolution; output coefficient at j is 2*pi*fhat(j)*ghat(j)."""
    j = min(f.bandwidth, g.bandwidth)
    fc = f.coeffs[f.bandwidth - j:f.bandwidth + j + 1]
    gc = g.coeffs[g.bandwidth - j:g.bandwidth + j + 1]
    return PeriodicFunction(TWO_PI * fc * gc)


def derivative(f: PeriodicFunction, order: int) -> PeriodicFunction:
    """Spectral derivative: coefficient at j multiplied by (i*j)**order."""
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    if order == 0:
        return f
    j = np.arange(-f.bandwidth, f.bandwidth + 1)
    return PeriodicFunction(f.coeffs * (1j * j) ** order)


def _golden_max(fun, a: float, b: float, rel_tol: float = 1e-12) -> float:
    """Golden-section maximization of fun on [a, b]; returns max value."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while (b - a) > rel_tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return max(fc, fd, fun(0.5 * (a + b)))


def sup_norm(f: PeriodicFunction, grid: SpectralGrid | None = None) -> float:
    """Sup norm via grid scan plus golden-section refinement in the top cells."""
    if grid is None:
        grid = SpectralGrid(max(4 * f.bandwidth + 4, 256))
    if grid.n < 4 * f.bandwidth:
        raise ValueError("grid too coarse for sup-norm refinement")
    vals = np.abs(f.sample(grid.n))
    best = float(np.max(vals))
    if best == 0.0:
        return 0.0
    h = grid.weight
    # refine every grid-local maximum close to the global one
    candidates = np.nonzero(
        (vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1))
        & (vals >= 0.5 * best)
    )[0]
    absf = lambda x: abs(f.evaluate(x))
    for i in candidates:
        x0 = i * h
        best = max(best, _golden_max(absf, x0 - h, x0 + h, rel_tol=1e-12))
    return best


def count_sign_changes(
    f: PeriodicFunction,
    grid: SpectralGrid | None = None,
    zero_tol: float = 1e-9,
) -> int:
    """Cyclic sign alternations of f over a period, skipping near-zero samples.

    Samples with |f| < zero_tol * max|f| are ignored; the count over the
    remaining cyclic sequence is always even.
    """
    if grid is None:
        grid = SpectralGrid(max(4 * f.bandwidth + 4, 256))
    vals = f.sample(grid.n)
    peak = np.max(np.abs(vals))
    keep = np.abs(vals) >= zero_tol * peak if peak > 0 else np.zeros(grid.n, bool)
    signs = np.sign(vals[keep])
    if signs.size == 0:
        raise AllZero("function is below tolerance at every sample")
    return int(np.count_nonzero(signs != np.roll(signs, 1)))
