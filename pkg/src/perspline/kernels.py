"""Bernoulli, smoothing, and weight kernels via their Fourier transfers.

All solver paths consume the transfer functions only; point evaluation of
the Bernoulli kernel exists for cross-checking against closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import JumpPoint
from .spectral import TWO_PI, PeriodicFunction

_SERIES_CHUNK = 1 << 20


@dataclass(frozen=True)
class BernoulliKernel:
    """Periodic kernel whose convolution with a mean-zero function yields
    its order-fold periodic antiderivative.

    Spectrally (1/2pi) sum_{j != 0} exp(i j t) / (i j)**order; the transfer
    here is (i j)**(-order) with the 1/2pi absorbed by the convolution
    convention, so that conv(sigma, B_r) has coefficients
    sigmahat(j) * (i j)**(-order).
    """

    order: int
    truncation: int = 4096

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be a positive integer")

    def transfer(self, j):
        j = np.asarray(j)
        out = np.zeros(j.shape, dtype=complex)
        nz = j != 0
        out[nz] = (1j * j[nz].astype(float)) ** (-self.order)
        return out if out.ndim else complex(out)

    def as_function(self, bandwidth: int | None = None) -> PeriodicFunction:
        """Truncated kernel as a PeriodicFunction (coefficients transfer/2pi)."""
        j_max = bandwidth if bandwidth is not None else self.truncation
        js = np.arange(-j_max, j_max + 1)
        return PeriodicFunction(self.transfer(js) / TWO_PI)

    def evaluate(self, t, truncation: int | None = None):
        """Truncated series (1/pi) sum_{j=1..J} cos(j t - r pi/2) / j**r.

        For order 1 the kernel jumps at t = 0 mod 2pi; evaluation within
        1e-8 of the jump is rejected.
        """
        j_max = truncation if truncation is not None else self.truncation
        scalar = np.isscalar(t)
        ts = np.atleast_1d(np.asarray(t, dtype=float)) % TWO_PI
        if self.order == 1:
            dist = np.minimum(ts, TWO_PI - ts)
            if np.any(dist < 1e-8):
                raise JumpPoint("order-1 kernel evaluated at its jump point")
        shift = self.order * np.pi / 2.0
        out = np.zeros(ts.shape)
        for j0 in range(1, j_max + 1, _SERIES_CHUNK):
            jj = np.arange(j0, min(j0 + _SERIES_CHUNK, j_max + 1), dtype=float)
            inv = jj ** (-float(self.order))
            for i, ti in enumerate(ts):
                out[i] += np.dot(np.cos(jj * ti - shift), inv)
        out /= np.pi
        return float(out[0]) if scalar else out

    def closed_form(self, t):
        """Exact value for orders 1 and 2 (test oracles)."""
        u = np.asarray(t, dtype=float) % TWO_PI
        if self.order == 1:
            return (np.pi - u) / TWO_PI
        if self.order == 2:
            return -np.pi / 6.0 + u / 2.0 - u ** 2 / (4.0 * np.pi)
        raise NotImplementedError("closed form available for orders 1 and 2 only")


@dataclass(frozen=True)
class SmoothingKernel:
    """Analytic even unit-mass kernel with transfer 1/cosh(eps*j).

    Variation diminishing and an approximate identity as eps -> 0; eps = 0
    is the identity transfer.
    """

    eps: float

    def __post_init__(self):
        if self.eps < 0:
            raise ValueError("smoothing parameter must be >= 0")

    def transfer(self, j):
        if self.eps == 0.0:
            return np.ones(np.shape(j)) if np.ndim(j) else 1.0
        a = np.abs(self.eps * np.asarray(j, dtype=float))
        # 1/cosh(a) = 2 e^{-a} / (1 + e^{-2a}), overflow-free
        e = np.exp(-a)
        out = 2.0 * e / (1.0 + e * e)
        return out if out.ndim else float(out)

    def apply(self, f: PeriodicFunction) -> PeriodicFunction:
        js = np.arange(-f.bandwidth, f.bandwidth + 1)
        return PeriodicFunction(f.coeffs * self.transfer(js))


_WEIGHT_KINDS = ("box", "triangle", "delta")


@dataclass(frozen=True)
class WeightFunction:
    """Even unit-mass weight with half-support eps on [-eps, eps].

    The delta kind is the point-evaluation limit; its support degenerates
    to a point, so disjointness checks reduce to distinct-node checks.
    """

    kind: str
    eps: float = 0.0

    def __post_init__(self):
        if self.kind not in _WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "delta":
            if self.eps != 0.0:
                raise ValueError("delta weight must have zero half-support")
        elif self.eps <= 0.0:
            raise ValueError(f"{self.kind} weight needs a positive half-support")

    @property
    def is_delta(self) -> bool:
        return self.kind == "delta"

    def transfer(self, j):
        """Fourier transform scaled to 1 at j = 0."""
        j = np.asarray(j, dtype=float)
        if self.kind == "box":
            out = np.sinc(j * self.eps / np.pi)
        elif self.kind == "triangle":
            out = np.sinc(j * self.eps / (2.0 * np.pi)) ** 2
        else:
            out = np.ones(j.shape)
        return out if out.ndim else float(out)

    def density(self, x):
        """Pointwise density (quadrature oracle); undefined for delta."""
        if self.is_delta:
            raise ValueError("delta weight has no pointwise density")
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) <= self.eps
        if self.kind == "box":
            out = np.where(inside, 1.0 / (2.0 * self.eps), 0.0)
        else:
            out = np.where(inside, (self.eps - np.abs(x)) / self.eps ** 2, 0.0)
        return out if out.ndim else float(out)
