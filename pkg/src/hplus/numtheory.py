"""Prime sieve, factorization, divisor functions d_k, and exact prime counts.

Everything here is exact and sieve-backed: no analytic approximations of
pi(x) are used anywhere.  Tables are immutable after construction and safe
to share across threads.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import TableTooSmall

CACHE_ENV = "HPLUS_CACHE_DIR"
_CACHE_MAGIC = "hplus-sieve-v1"


@dataclass(frozen=True)
class PrimeTable:
    """Sieve output up to ``limit``: ascending primes and smallest prime factors.

    ``spf[n]`` is the smallest prime factor of n for 2 <= n <= limit
    (``spf[0]`` and ``spf[1]`` are padding).
    """

    limit: int
    primes: np.ndarray  # int64, ascending
    spf: np.ndarray  # int32, length limit + 1

    def __post_init__(self):
        self.primes.flags.writeable = False
        self.spf.flags.writeable = False

    @cached_property
    def _cum_log_primes(self) -> np.ndarray:
        # cum[i] = sum of log p over the first i primes, accumulated ascending
        return np.concatenate([[0.0], np.cumsum(np.log(self.primes.astype(np.float64)))])

    def nth_prime(self, n: int) -> int:
        """The n-th prime (1-based); requires the sieve to reach that far."""
        if n < 1 or n > len(self.primes):
            raise TableTooSmall(f"table holds {len(self.primes)} primes, need the {n}-th")
        return int(self.primes[n - 1])


@dataclass(frozen=True)
class MultiIndex:
    """Exponent vector alpha with n = prod p_j^{alpha_j}; trailing zeros trimmed."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        while exps and exps[-1] == 0:
            exps = exps[:-1]
        if any(e < 0 for e in exps):
            raise ValueError(f"negative exponent in {exps}")
        object.__setattr__(self, "exponents", exps)

    def __len__(self) -> int:
        return len(self.exponents)

    def __getitem__(self, j: int) -> int:
        return self.exponents[j] if j < len(self.exponents) else 0

    def to_int(self, table: PrimeTable) -> int:
        """Reconstruct n = prod p_j^{alpha_j}."""
        if len(self.exponents) > len(table.primes):
            raise TableTooSmall(
                f"index uses {len(self.exponents)} primes, table has {len(table.primes)}"
            )
        n = 1
        for j, e in enumerate(self.exponents):
            n *= int(table.primes[j]) ** e
        return n


def _cache_path(cache_dir: str, limit: int) -> str:
    return os.path.join(cache_dir, f"sieve-{limit}.npz")


def _try_load_cache(path: str, limit: int) -> PrimeTable | None:
    try:
        with np.load(path) as data:
            if str(data["magic"]) != _CACHE_MAGIC or int(data["limit"]) != limit:
                return None
            spf = data["spf"].astype(np.int32)
            primes = data["primes"].astype(np.int64)
        if len(spf) != limit + 1 or len(primes) == 0:
            return None
        # spot checks; a corrupt file falls through to recomputation
        if spf[2] != 2 or primes[0] != 2 or primes[-1] > limit:
            return None
        if not np.all(np.diff(primes) > 0):
            return None
        return PrimeTable(limit=limit, primes=primes, spf=spf)
    except Exception:
        return None


def sieve(limit: int, cache_dir: str | None = None) -> PrimeTable:
    """Smallest-prime-factor sieve up to ``limit`` (inclusive).

    If ``cache_dir`` is given (or the HPLUS_CACHE_DIR environment variable is
    set) the result is persisted as an .npz keyed by the limit; a corrupt or
    mismatched cache file is ignored and the table recomputed.
    """
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    limit = int(limit)
    cache_dir = cache_dir or os.environ.get(CACHE_ENV) or None

    if cache_dir:
        cached = _try_load_cache(_cache_path(cache_dir, limit), limit)
        if cached is not None:
            return cached

    spf, primes = _kernels.sieve_spf(limit)
    table = PrimeTable(limit=limit, primes=primes, spf=spf)

    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        path = _cache_path(cache_dir, limit)
        tmp = path + f".tmp-{os.getpid()}"
        try:
            with open(tmp, "wb") as f:
                np.savez(f, magic=_CACHE_MAGIC, limit=limit, spf=spf, primes=primes)
            os.replace(tmp, path)
        finally:
            if os.path.exists(tmp):
                os.remove(tmp)
    return table


def factorize(n: int, table: PrimeTable) -> MultiIndex:
    """Factor n by repeated smallest-prime-factor division, O(log n)."""
    n = int(n)
    if n < 1:
        raise ValueError(f"cannot factorize {n}")
    if n > table.limit:
        raise TableTooSmall(f"n = {n} exceeds sieve limit {table.limit}")
    if n == 1:
        return MultiIndex(())
    exps: dict[int, int] = {}
    spf = table.spf
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        exps[p] = e
    max_idx = int(np.searchsorted(table.primes, max(exps)))
    out = [0] * (max_idx + 1)
    for p, e in exps.items():
        out[int(np.searchsorted(table.primes, p))] = e
    return MultiIndex(tuple(out))


def divisor_power_table(k: int, n_max: int) -> np.ndarray:
    """Table of d_k(1..n_max): ordered factorizations of n into k factors.

    Built by (k-1)-fold Dirichlet convolution of the all-ones vector against
    itself, in exact uint64 arithmetic.  d_0 is the indicator of n = 1 and
    d_1 is identically 1.  Raises OverflowError if any entry wraps.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if k == 0:
        out = np.zeros(n_max, dtype=np.uint64)
        out[0] = 1
        return out
    table = np.ones(n_max, dtype=np.uint64)
    for _ in range(k - 1):
        table, overflow = _kernels.divisor_sum_u64(table)
        if overflow:
            raise OverflowError(f"d_{k} table overflows uint64 below n = {n_max}")
    return table


def prime_pi(x: float, table: PrimeTable) -> int:
    """Exact count of primes <= x."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x > table.limit:
        raise TableTooSmall(f"x = {x} exceeds sieve limit {table.limit}")
    return int(np.searchsorted(table.primes, math.floor(x), side="right"))


def chebyshev_theta(x: float, table: PrimeTable) -> float:
    """First Chebyshev function: sum of log p over primes p <= x.

    The logs are accumulated in ascending order in double precision.
    """
    return float(table._cum_log_primes[prime_pi(x, table)])


def smooth_numbers(n_primes: int, limit: int, table: PrimeTable) -> np.ndarray:
    """All n <= limit whose prime factors lie among the first n_primes primes.

    Always contains 1 (the empty product); sorted ascending.
    """
    if n_primes < 1:
        raise ValueError(f"n_primes must be >= 1, got {n_primes}")
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    out = [1]
    for p in table.primes[: min(n_primes, len(table.primes))]:
        p = int(p)
        if p > limit:
            break
        extended = []
        for v in out:
            w = v * p
            while w <= limit:
                extended.append(w)
                w *= p
        out.extend(extended)
    return np.array(sorted(out), dtype=np.int64)
