"""Sampled entanglement statistics and their random-matrix benchmarks.

Entropies are tracked in bits (the rank picture is integer-valued);
conversion to nats happens only where a result is defined that way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .seeding import substream
from .tableau import StabilizerTableau

_TRUNC = 64  # factors (1 - 2^-i) beyond i=64 are 1.0 in double precision


# -- sampling ------------------------------------------------------------------


@dataclass
class PageStats:
    """Bipartition statistics at one subsystem size."""

    size: int
    samples: int
    mean_entropy_bits: float
    mean_deficit_bits: float
    stderr_deficit_bits: float
    deficit_counts: dict[int, int]

    def deficit_fraction(self, eps: int) -> float:
        return self.deficit_counts.get(eps, 0) / self.samples


def sample_bipartitions(n: int, size: int, count: int, seed: int, label: str):
    """Yields `count` uniform subsets of {0..n-1} of the given size."""
    if not 0 <= size <= n:
        raise ValueError("size outside 0..n")
    for k in range(count):
        rng = substream(seed, f"{label}-size{size}", k)
        yield sorted(int(q) for q in rng.choice(n, size, replace=False))


def page_curve(
    state: StabilizerTableau,
    sizes,
    samples_per_size: int,
    seed: int,
    label: str = "page",
) -> list[PageStats]:
    """Sampled entropy and deficit statistics of a state, per subsystem size.

    The deficit is measured against the pure-state ceiling
    min(|A|, N - |A|) bits.
    """
    n = state.n_qubits
    out = []
    for size in sizes:
        ceiling = min(size, n - size)
        counts: dict[int, int] = {}
        total_s = 0
        total_eps = 0
        total_eps_sq = 0
        for subset in sample_bipartitions(n, size, samples_per_size, seed, label):
            s = state.renyi2_entropy_bits(subset)
            eps = ceiling - s
            counts[eps] = counts.get(eps, 0) + 1
            total_s += s
            total_eps += eps
            total_eps_sq += eps * eps
        k = samples_per_size
        mean_eps = total_eps / k
        var = (total_eps_sq - k * mean_eps**2) / (k - 1) if k > 1 else 0.0
        out.append(
            PageStats(
                size=int(size),
                samples=k,
                mean_entropy_bits=total_s / k,
                mean_deficit_bits=mean_eps,
                stderr_deficit_bits=math.sqrt(max(var, 0.0) / k),
                deficit_counts=counts,
            )
        )
    return out


def consecutive_entropy_profile(
    state: StabilizerTableau, start: int, rmax: int | None = None
) -> list[int]:
    """Entropies of the windows [start, start+r) for r = 1..rmax, in bits."""
    n = state.n_qubits
    if not 0 <= start < n:
        raise IndexError("start outside register")
    if rmax is None:
        rmax = n - start
    if not 1 <= rmax <= n - start:
        raise ValueError("rmax outside 1..n-start")
    return [state.renyi2_entropy_bits(range(start, start + r)) for r in range(1, rmax + 1)]


# -- random-matrix benchmarks ---------------------------------------------------


def _q_product(lo: int, hi: int) -> float:
    """prod_{i=lo}^{hi} (1 - 2^-i), truncated at i = 64."""
    out = 1.0
    for i in range(lo, min(hi, _TRUNC) + 1):
        out *= 1.0 - 2.0**-i
    return out


def rmt_rank_prob(n: int, a: int, eps: int) -> float:
    """Probability that a random n x 2a binary matrix has rank 2a - eps.

    Large-n random-matrix form, valid strictly below the 2a = n boundary.
    """
    if a < 0 or 2 * a >= n:
        raise ValueError("need 0 <= 2a < n")
    if eps < 0 or eps > 2 * a:
        return 0.0
    k = n - 2 * a
    return 2.0 ** (-eps * (k + eps)) * _q_product(eps + 1, _TRUNC) / _q_product(1, k + eps)


def rmt_deficit_pmf(n: int, a: int, max_eps: int | None = None) -> list[float]:
    """Deficit probabilities [P(0), P(1), ...] for a size-a subsystem."""
    if max_eps is None:
        max_eps = min(2 * a, 24)
    return [rmt_rank_prob(n, a, e) for e in range(max_eps + 1)]


def rmt_mean_deficit(n: int, a: int) -> float:
    """Closed-form mean entropy deficit in nats: 2^(2a-n) ln 2."""
    if a < 0 or 2 * a >= n:
        raise ValueError("need 0 <= 2a < n")
    return 2.0 ** (2 * a - n) * math.log(2.0)


def rmt_deficit_moments_bits(n: int, a: int) -> tuple[float, float]:
    """(mean, standard deviation) of the deficit in bits, from the pmf."""
    pmf = rmt_deficit_pmf(n, a)
    mean = sum(e * p for e, p in enumerate(pmf))
    second = sum(e * e * p for e, p in enumerate(pmf))
    return mean, math.sqrt(max(second - mean * mean, 0.0))


def exact_rank_prob(rows: int, cols: int, r: int) -> float:
    """Exact rank distribution of a uniform rows x cols binary matrix."""
    if r < 0 or r > min(rows, cols):
        return 0.0
    log2p = r * (rows + cols - r) - rows * cols
    value = 2.0**log2p
    for i in range(r):
        value *= (1.0 - 2.0 ** (i - rows)) * (1.0 - 2.0 ** (i - cols))
        value /= 1.0 - 2.0 ** (i - r)
    return value


# -- area-law average -----------------------------------------------------------


def area_law_mean_entropy(profile, a: int, n: int) -> float:
    """Mean entropy of uniform size-a subsets predicted from a window profile.

    A subset of a line splits into contiguous cells.  Assuming no mutual
    information between cells, each arrangement of cell lengths
    (q_1..q_Q) contributes sum_k S(q_k), and there are C(n-a+1, Q)
    placements for each ordered arrangement.  profile[r-1] is the
    entropy of a length-r window in bits.

    Valid for 1 <= a <= min(len(profile), 40).
    """
    if not 1 <= a <= n:
        raise ValueError("a outside 1..n")
    if a > 40:
        raise ValueError("cap: a <= 40")
    if len(profile) < a:
        raise ValueError("profile shorter than a")
    m = n - a + 1
    num = 0.0
    den = 0.0
    for q_parts in range(1, a + 1):
        placements = math.comb(m, q_parts)
        if placements == 0:
            continue
        if q_parts == 1:
            total_s = float(profile[a - 1])
        else:
            total_s = q_parts * sum(
                float(profile[r - 1]) * math.comb(a - r - 1, q_parts - 2)
                for r in range(1, a - q_parts + 2)
            )
        arrangements = math.comb(a - 1, q_parts - 1)
        num += placements * total_s
        den += placements * arrangements
    assert den == math.comb(n, a)
    return num / den


def _partitions(a: int):
    """Integer partitions of a as non-increasing tuples."""

    def rec(rest: int, cap: int, acc: tuple[int, ...]):
        if rest == 0:
            yield acc
            return
        for part in range(min(rest, cap), 0, -1):
            yield from rec(rest - part, part, acc + (part,))

    yield from rec(a, a, ())


def area_law_mean_entropy_partition_weighted(profile, a: int, n: int) -> float:
    """Variant that weights each unordered cell-length multiset by C(n-a+1, Q)
    alone and normalizes by sum_l Q_l C(n-a+1, Q_l).

    Kept for comparison: it undercounts arrangements of unequal cell
    lengths and disagrees with direct sampling already at a = 2.
    """
    if not 1 <= a <= min(n, 40):
        raise ValueError("a outside 1..min(n, 40)")
    if len(profile) < a:
        raise ValueError("profile shorter than a")
    m = n - a + 1
    num = 0.0
    den = 0.0
    for parts in _partitions(a):
        q_parts = len(parts)
        weight = math.comb(m, q_parts)
        num += weight * sum(float(profile[r - 1]) for r in parts)
        den += weight * q_parts
    return num / den
