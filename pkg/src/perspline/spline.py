"""Periodic perfect splines stored by their r-th derivative data.

A spline s of order r with amplitude xi, knots t_0 < ... < t_{2n-1} and
leading sign has

    s^(r)(t) = xi * lead_sign * (-1)^i   on (t_i, t_{i+1}),

so ||s^(r)||_inf = |xi| holds by construction.  Evaluation goes through
the Fourier coefficients of the +-1 step (``step_spectrum``) combined
with the Bernoulli transfer; an exact piecewise-polynomial oracle is kept
alongside for testing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import MeanZeroViolation
from .kernels import WeightFunction
from .spectral import TWO_PI, PeriodicFunction

_J_CHUNK = 16384


def alternating_knot_sum(knots: np.ndarray) -> float:
    """Signed sum sum_i (-1)^i (t_{i+1} - t_i) with t_{2n} = t_0 + 2*pi.

    Zero iff s^(r-1) is periodic; reduces to -2*sum_i (-1)^i t_i - 2*pi
    for an even knot count.
    """
    knots = np.asarray(knots, dtype=float)
    if knots.size == 0:
        return 0.0
    alt = (-1.0) ** np.arange(knots.size)
    return float(-2.0 * np.dot(alt, knots) - TWO_PI)


def step_spectrum(knots, lead_sign: int, j):
    """Fourier coefficients of the +-1 alternating step with given knots.

    sigmahat(j) = (lead_sign / (pi i j)) sum_i (-1)^i exp(-i j t_i) for
    j != 0; sigmahat(0) is the signed-length sum over 2*pi (zero when the
    mean-zero knot condition holds).
    """
    knots = np.asarray(knots, dtype=float)
    scalar = np.isscalar(j)
    js = np.atleast_1d(np.asarray(j))
    alt = lead_sign * (-1.0) ** np.arange(knots.size)
    out = np.zeros(js.shape, dtype=complex)
    nz = js != 0
    if knots.size:
        jnz = js[nz].astype(float)
        phases = np.exp(-1j * np.outer(jnz, knots))
        out[nz] = (phases @ alt) / (np.pi * 1j * jnz)
        out[~nz] = lead_sign * alternating_knot_sum(knots) / TWO_PI
    return complex(out[0]) if scalar else out


def _positive_spectrum(knots, lead_sign, r, j_max):
    """sigmahat(j) * (i j)^(-r) for j = 1..j_max (spline coefficients, xi = 1)."""
    js = np.arange(1, j_max + 1, dtype=float)
    alt = lead_sign * (-1.0) ** np.arange(len(knots))
    out = np.empty(j_max, dtype=complex)
    for j0 in range(0, j_max, _J_CHUNK):
        jj = js[j0:j0 + _J_CHUNK]
        phases = np.exp(-1j * np.outer(jj, np.asarray(knots)))
        out[j0:j0 + _J_CHUNK] = (phases @ alt) / (np.pi * 1j * jj) \
            * (1j * jj) ** (-float(r))
    return out


@dataclass(frozen=True, eq=False)
class PerfectSpline:
    """Periodic perfect spline: order, knots in [0, 2*pi), sign, amplitude,
    offset.  xi = 0 encodes the constant spline and requires no knots."""

    r: int
    knots: np.ndarray
    lead_sign: int
    xi: float
    offset: float
    mean_zero_tol: float = field(default=0.05, repr=False)

    def __post_init__(self):
        knots = np.array(self.knots, dtype=float)
        knots.flags.writeable = False
        object.__setattr__(self, "knots", knots)
        if self.r < 1:
            raise ValueError("spline order must be >= 1")
        if self.lead_sign not in (-1, 1):
            raise ValueError("lead_sign must be +1 or -1")
        if self.xi == 0.0:
            if knots.size:
                raise ValueError("constant spline (xi = 0) must have no knots")
            return
        if knots.size == 0 or knots.size % 2 != 0:
            raise ValueError("knot count must be a positive even integer")
        if np.any(np.diff(knots) <= 0) or knots[0] < 0 or knots[-1] >= TWO_PI:
            raise ValueError("knots must be strictly increasing in [0, 2*pi)")
        resid = abs(alternating_knot_sum(knots))
        if resid > self.mean_zero_tol:
            raise MeanZeroViolation(
                f"alternating knot sum {resid:.3e} exceeds {self.mean_zero_tol:.1e}"
            )

    @property
    def knot_count(self) -> int:
        return int(self.knots.size)

    def mean_zero_residual(self) -> float:
        return abs(alternating_knot_sum(self.knots))

    def derivative_step(self, x):
        """Exact s^(r) values (+-xi) from the step representation."""
        scalar = np.isscalar(x)
        xs = np.atleast_1d(np.asarray(x, dtype=float)) % TWO_PI
        if self.xi == 0.0:
            out = np.zeros(xs.shape)
        else:
            idx = np.searchsorted(self.knots, xs, side="right") - 1
            idx %= self.knots.size
            out = self.xi * self.lead_sign * (-1.0) ** idx
        return float(out[0]) if scalar else out

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "knots": [float(t) for t in self.knots],
            "lead_sign": self.lead_sign,
            "xi": float(self.xi),
            "offset": float(self.offset),
        }

    @staticmethod
    def from_dict(d: dict) -> "PerfectSpline":
        return PerfectSpline(
            r=int(d["r"]),
            knots=np.asarray(d["knots"], dtype=float),
            lead_sign=int(d["lead_sign"]),
            xi=float(d["xi"]),
            offset=float(d["offset"]),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @staticmethod
    def load(path) -> "PerfectSpline":
        with open(path) as fh:
            return PerfectSpline.from_dict(json.load(fh))


def spline_coefficients(s: PerfectSpline, bandwidth: int) -> PeriodicFunction:
    """Truncated Fourier coefficients of the spline."""
    c = np.zeros(2 * bandwidth + 1, dtype=complex)
    c[bandwidth] = s.offset
    if s.xi != 0.0:
        pos = s.xi * _positive_spectrum(s.knots, s.lead_sign, s.r, bandwidth)
        c[bandwidth + 1:] = pos
        c[:bandwidth] = np.conj(pos[::-1])
    return PeriodicFunction(c)


def eval_spline(s: PerfectSpline, x, bandwidth: int = 4096):
    """Spectral evaluation xi * sum sigmahat(j) (i j)^-r e^{ijx} + offset."""
    if bandwidth < 64:
        raise ValueError("bandwidth must be >= 64")
    if s.xi == 0.0:
        return s.offset if np.isscalar(x) else np.full(np.shape(x), s.offset)
    scalar = np.isscalar(x)
    xs = np.atleast_1d(np.asarray(x, dtype=float)) % TWO_PI
    pos = s.xi * _positive_spectrum(s.knots, s.lead_sign, s.r, bandwidth)
    out = np.full(xs.shape, s.offset)
    js = np.arange(1, bandwidth + 1, dtype=float)
    for x0 in range(0, xs.size, 256):
        xc = xs[x0:x0 + 256]
        acc = np.zeros(xc.size)
        for j0 in range(0, bandwidth, _J_CHUNK):
            jj = js[j0:j0 + _J_CHUNK]
            acc += 2.0 * np.real(np.exp(1j * np.outer(xc, jj)) @ pos[j0:j0 + _J_CHUNK])
        out[x0:x0 + 256] += acc
    return float(out[0]) if scalar else out


def weighted_mean(s: PerfectSpline, w: WeightFunction, x_k: float,
                  bandwidth: int = 4096) -> float:
    """int phi_k(x - x_k) s(x) dx computed spectrally (phi_k is even)."""
    if s.xi == 0.0:
        return s.offset
    pos = s.xi * _positive_spectrum(s.knots, s.lead_sign, s.r, bandwidth)
    js = np.arange(1, bandwidth + 1)
    val = 2.0 * np.real(np.dot(pos * w.transfer(js), np.exp(1j * js * x_k)))
    return float(val + s.offset)


class PiecewiseOracle:
    """Exact piecewise-polynomial form of a perfect spline.

    Built by integrating the +-xi step r times analytically; after each
    integration the mean over the period is removed so the antiderivative
    stays periodic, matching the spectral form which carries no constant
    term.  Intended as an independent test oracle for eval_spline.
    """

    def __init__(self, s: PerfectSpline):
        self.spline = s
        if s.xi == 0.0:
            self.breaks = np.array([0.0, TWO_PI])
            self.polys = [np.polynomial.Polynomial([s.offset])]
            return
        knots = s.knots
        self.breaks = np.concatenate([knots, [knots[0] + TWO_PI]])
        lengths = np.diff(self.breaks)
        polys = [
            np.polynomial.Polynomial([s.xi * s.lead_sign * (-1.0) ** i])
            for i in range(knots.size)
        ]
        for _ in range(s.r):
            integrated = []
            c = 0.0
            for p, ell in zip(polys, lengths):
                q = p.integ() + c
                integrated.append(q)
                c = q(ell)
            mean = sum(
                (q.integ()(ell) for q, ell in zip(integrated, lengths))
            ) / TWO_PI
            polys = [q - mean for q in integrated]
        self.polys = [p + s.offset for p in polys]

    def __call__(self, x):
        scalar = np.isscalar(x)
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        t0 = self.breaks[0]
        u = (xs - t0) % TWO_PI + t0
        idx = np.clip(np.searchsorted(self.breaks, u, side="right") - 1,
                      0, len(self.polys) - 1)
        out = np.array([self.polys[i](ui - self.breaks[i])
                        for i, ui in zip(idx, u)])
        return float(out[0]) if scalar else out
