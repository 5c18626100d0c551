"""Truncated Dirichlet series: exact arithmetic, translations, and seminorms.

A series is stored as its coefficient prefix a_1..a_N (N = truncation).
Binary operations truncate to the shorter operand so that every stored
coefficient stays exact; convolution powers take an explicit output
truncation and treat the input as a Dirichlet polynomial (zero beyond its
truncation).  Truncated norms are monotone lower bounds of the full ones,
and operations that can lose support report an exactness flag instead of
guessing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import UndefinedAbscissa
from .numtheory import sieve


@dataclass(frozen=True)
class DirichletSeries:
    """Coefficient vector a_1..a_N of sum a_n n^{-s}; immutable.

    ``coeffs[i]`` is the coefficient of (i+1)^{-s}.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.coeffs, dtype=np.complex128)
        if arr.ndim != 1 or len(arr) < 1:
            raise ValueError("coeffs must be a non-empty 1-d array")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("coefficients must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    @property
    def truncation(self) -> int:
        return len(self.coeffs)

    def support_max(self) -> int:
        """Largest n with a_n != 0, or 0 for the zero series."""
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) + 1 if len(nz) else 0

    def coeff(self, n: int) -> complex:
        """a_n (1-based); zero beyond the truncation."""
        if n < 1:
            raise ValueError(f"index n must be >= 1, got {n}")
        return complex(self.coeffs[n - 1]) if n <= self.truncation else 0j

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(truncation: int) -> "DirichletSeries":
        return DirichletSeries(np.zeros(truncation, dtype=np.complex128))

    @staticmethod
    def monomial(n: int, c: complex, truncation: int) -> "DirichletSeries":
        """c * n^{-s} at the given truncation."""
        if not 1 <= n <= truncation:
            raise ValueError(f"monomial index {n} outside 1..{truncation}")
        coeffs = np.zeros(truncation, dtype=np.complex128)
        coeffs[n - 1] = c
        return DirichletSeries(coeffs)

    @staticmethod
    def ones(truncation: int) -> "DirichletSeries":
        """The truncated zeta series: a_n = 1 for n <= truncation."""
        return DirichletSeries(np.ones(truncation, dtype=np.complex128))

    # -- arithmetic sugar ----------------------------------------------------

    def __add__(self, other: "DirichletSeries") -> "DirichletSeries":
        return add(self, other)

    def __sub__(self, other: "DirichletSeries") -> "DirichletSeries":
        return add(self, scale(-1.0, other))

    def __neg__(self) -> "DirichletSeries":
        return scale(-1.0, self)

    def __mul__(self, other):
        if isinstance(other, DirichletSeries):
            return multiply(self, other)
        return scale(other, self)

    def __rmul__(self, other):
        return scale(other, self)

    def __eq__(self, other) -> bool:
        return isinstance(other, DirichletSeries) and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None


class SeminormValue(NamedTuple):
    """A seminorm together with its exactness status.

    ``exact`` is False when the computation could only certify a lower
    bound (support lost above the working truncation).
    """

    value: float
    exact: bool


@dataclass(frozen=True)
class SeminormParams:
    """Index pair (p, k) of a seminorm; exact evaluation needs p = 2 or p even."""

    p: float
    k: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class AbscissaReport:
    """Heuristic abscissa estimates from partial-sum growth on a geometric ladder.

    Estimates are truncation-dependent; sigma_c is clamped to sigma_a (a
    theorem for the true abscissas), so sigma_c_estimate <= sigma_a_estimate.
    """

    sigma_a_estimate: float
    sigma_c_estimate: float
    notes: str


# ---------------------------------------------------------------------------
# linear operations
# ---------------------------------------------------------------------------

def add(d: DirichletSeries, e: DirichletSeries) -> DirichletSeries:
    """Pointwise sum at the shorter truncation."""
    n = min(d.truncation, e.truncation)
    return DirichletSeries(d.coeffs[:n] + e.coeffs[:n])


def scale(c: complex, d: DirichletSeries) -> DirichletSeries:
    return DirichletSeries(complex(c) * d.coeffs)


def with_truncation(d: DirichletSeries, truncation: int) -> DirichletSeries:
    """Zero-extend or cut to the requested truncation.

    Extension is exact under polynomial semantics (the stored prefix is the
    whole object); cutting drops coefficients.
    """
    if truncation < 1:
        raise ValueError(f"truncation must be >= 1, got {truncation}")
    n = d.truncation
    if truncation == n:
        return d
    if truncation < n:
        return DirichletSeries(d.coeffs[:truncation].copy())
    out = np.zeros(truncation, dtype=np.complex128)
    out[:n] = d.coeffs
    return DirichletSeries(out)


def translate(d: DirichletSeries, delta: float) -> DirichletSeries:
    """Shift right by delta: b_n = a_n * n^{-delta}.

    Negative delta is rejected; the backward shift exists only as a private
    helper on finite supports inside the operators module.
    """
    if delta < 0:
        raise ValueError(f"translation delta must be >= 0, got {delta}")
    if delta == 0:
        return d
    n = np.arange(1, d.truncation + 1, dtype=np.float64)
    return DirichletSeries(d.coeffs * n ** (-float(delta)))


def multiply(d: DirichletSeries, e: DirichletSeries) -> DirichletSeries:
    """Dirichlet product c_n = sum_{d | n} a_d b_{n/d} at the shorter truncation.

    Divisors of n never exceed n, so every output coefficient equals that of
    the formal product of the two polynomials.
    """
    out_len = min(d.truncation, e.truncation)
    return DirichletSeries(_kernels.dirichlet_convolve(d.coeffs, e.coeffs, out_len))


def power(d: DirichletSeries, k: int, out_truncation: int) -> DirichletSeries:
    """k-fold convolution power of the polynomial d, truncated at out_truncation.

    power(d, 0) is the convolution unit 1^{-s}.  Coefficients are exact up to
    the output truncation whenever support(d)^k fits below it; otherwise they
    are the truncated prefix of the formal power.
    """
    if k < 0:
        raise ValueError(f"power exponent must be >= 0, got {k}")
    if out_truncation < 1:
        raise ValueError(f"out_truncation must be >= 1, got {out_truncation}")
    if k == 0:
        return DirichletSeries.monomial(1, 1.0, out_truncation)
    base = with_truncation(d, out_truncation)
    result = base
    for _ in range(k - 1):
        result = multiply(base, result)
    return result


def evaluate(d: DirichletSeries, s: complex) -> complex:
    """Partial sum of a_n n^{-s} over the stored prefix (deterministic order)."""
    n = np.arange(1, d.truncation + 1, dtype=np.float64)
    return complex(np.sum(d.coeffs * np.exp(-complex(s) * np.log(n))))


# ---------------------------------------------------------------------------
# seminorms
# ---------------------------------------------------------------------------

def seminorm_2(d: DirichletSeries, k: int) -> float:
    """The Hilbert seminorm (sum |a_n|^2 n^{-2/k})^{1/2}."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = np.arange(1, d.truncation + 1, dtype=np.float64)
    w = n ** (-2.0 / k)
    return float(np.sqrt(np.sum((d.coeffs.real**2 + d.coeffs.imag**2) * w)))


def seminorm_even(
    d: DirichletSeries, q: int, k: int, out_truncation: int
) -> SeminormValue:
    """Even-index seminorm of order p = 2q via the power identity.

    ||D||_{2q,k} = || translate(D, 1/k)^q ||_{H^2}^{1/q}, with the power
    computed at ``out_truncation``.  The value is exact when the support of
    the q-th power fits below the truncation (support(D)^q <= out_truncation);
    otherwise it is a certified lower bound and ``exact`` is False.
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if q == 1:
        return SeminormValue(seminorm_2(d, k), True)
    shifted = translate(d, 1.0 / k)
    p = power(shifted, q, out_truncation)
    l2 = np.sum(p.coeffs.real**2 + p.coeffs.imag**2)
    value = float(l2 ** (0.5 / q))
    exact = d.support_max() ** q <= out_truncation
    return SeminormValue(value, exact)


def seminorm_comparison_constant(k: int, p: float, q: float) -> float:
    """Constant C_{k,p,q} comparing ||.||_{q,k} against ||.||_{p,2k}.

    Equals prod_{j <= j0} (1 - p_j^{-1/(2k)})^{-1} where j0 counts the primes
    with p_j^{-1/(2k)} >= sqrt(p/q); the empty product is 1.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 1 <= p <= q:
        raise ValueError(f"need 1 <= p <= q, got p={p}, q={q}")
    threshold = math.sqrt(p / q)
    # p_j^{-1/(2k)} >= threshold  <=>  p_j <= (q/p)^k
    bound = (q / p) ** k
    if bound < 2:
        return 1.0
    if bound > 1e8:
        raise ValueError(
            f"comparison constant for k={k}, p={p}, q={q} needs primes up to "
            f"{bound:.2e}; beyond desk scale"
        )
    table = sieve(max(2, math.ceil(bound) + 1))
    const = 1.0
    for pj in table.primes:
        r = float(pj) ** (-1.0 / (2.0 * k))
        if r < threshold:
            break
        const *= 1.0 / (1.0 - r)
    return const


# ---------------------------------------------------------------------------
# abscissa estimation
# ---------------------------------------------------------------------------

def abscissa_estimates(d: DirichletSeries) -> AbscissaReport:
    """Heuristic estimates of the absolute/conditional convergence abscissas.

    Uses the classical limsup formulas on a geometric checkpoint ladder
    N' in {2^4, 2^5, ..., N} and reports the last-window slope of
    log(partial sum) against log N'.  A series whose support ends at or
    below half its truncation is treated as a polynomial (abscissa -inf).
    """
    sup = d.support_max()
    if sup == 0:
        raise UndefinedAbscissa("abscissa estimates are undefined for the zero series")
    n_trunc = d.truncation
    if 2 * sup <= n_trunc:
        notes = (
            f"support ends at n={sup} <= truncation/2: treated as a Dirichlet "
            "polynomial; both abscissas reported as -inf"
        )
        return AbscissaReport(-math.inf, -math.inf, notes)

    checkpoints = [2**j for j in range(4, int(math.log2(n_trunc)) + 1) if 2**j <= n_trunc]
    if not checkpoints or checkpoints[-1] != n_trunc:
        checkpoints.append(n_trunc)
    if len(checkpoints) < 2:
        checkpoints = [max(2, n_trunc // 2), n_trunc]

    abs_partial = np.cumsum(np.abs(d.coeffs))
    raw_partial = np.cumsum(d.coeffs)
    n_hi, n_lo = checkpoints[-1], checkpoints[-2]

    def _slope(values: np.ndarray) -> float:
        hi, lo = values[n_hi - 1], values[n_lo - 1]
        if hi <= 0 or lo <= 0:
            return -math.inf
        return (math.log(hi) - math.log(lo)) / (math.log(n_hi) - math.log(n_lo))

    sigma_a = _slope(abs_partial)
    sigma_c_raw = _slope(np.abs(raw_partial))
    sigma_c = min(sigma_c_raw, sigma_a)
    notes = (
        f"last-window slope over N'={n_lo}..{n_hi} of a {len(checkpoints)}-step "
        "geometric ladder; truncation-dependent heuristic; sigma_c clamped to sigma_a"
    )
    return AbscissaReport(sigma_a, sigma_c, notes)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def series_to_json(d: DirichletSeries) -> dict:
    """JSON form {"truncation": N, "coeffs": [[re, im], ...]}; coeffs[i] is a_{i+1}."""
    return {
        "truncation": d.truncation,
        "coeffs": [[float(c.real), float(c.imag)] for c in d.coeffs],
    }


def series_from_json(obj: dict) -> DirichletSeries:
    if not isinstance(obj, dict):
        raise ValueError("series JSON must be an object")
    for field in ("truncation", "coeffs"):
        if field not in obj:
            raise ValueError(f"series JSON missing field '{field}'")
    coeffs = obj["coeffs"]
    if not isinstance(coeffs, list) or len(coeffs) != int(obj["truncation"]):
        raise ValueError("field 'coeffs' must be a list of length 'truncation'")
    try:
        arr = np.array([complex(re, im) for re, im in coeffs], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"field 'coeffs' must hold [re, im] pairs: {exc}") from None
    return DirichletSeries(arr)


def save_series(d: DirichletSeries, path: str) -> None:
    with open(path, "w") as f:
        json.dump(series_to_json(d), f, sort_keys=True)
        f.write("\n")


def load_series(path: str) -> DirichletSeries:
    with open(path) as f:
        return series_from_json(json.load(f))


def write_seminorm_table(rows: Sequence[tuple], path: str) -> None:
    """CSV with columns k, p, value, exact for a batch of seminorm evaluations."""
    lines = ["k,p,value,exact"]
    for k, p, value, exact in rows:
        lines.append(f"{k},{p},{float(value)!r},{str(bool(exact)).lower()}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
