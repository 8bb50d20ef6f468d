"""Nonparametric comparison of algorithms over repeated runs.

Kruskal-Wallis omnibus test (mid-rank ties, standard tie correction),
Dunn's pairwise z-tests with Bonferroni adjustment, and a compact letter
display built by insert-and-absorb so that two algorithms share a letter
iff their pairwise difference is not significant.

Self-contained: the chi-square upper tail is the regularized upper
incomplete gamma (power series / Lentz continued fraction) and the normal
tail comes from math.erfc, so nothing beyond numpy is required.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple, Sequence

import numpy as np


@dataclass(frozen=True)
class SampleGroup:
    """One algorithm's metric values, one entry per run."""

    label: str
    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ValueError(f"group {self.label!r} is empty")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"group {self.label!r} has non-finite values")


class KruskalWallisResult(NamedTuple):
    H: float
    df: int
    p: float


@dataclass(frozen=True)
class PairwiseResult:
    pair: tuple[str, str]
    z_statistic: float
    p_raw: float
    p_adjusted: float
    significant: bool


@dataclass(frozen=True)
class CldAssignment:
    """Letters per label; labels sharing a letter are not significantly different."""

    order: tuple[str, ...]
    letters: dict[str, str]
    letter_sets: dict[str, frozenset[int]]
    consistent: bool

    def shares_letter(self, a: str, b: str) -> bool:
        return bool(self.letter_sets[a] & self.letter_sets[b])


# ---------------------------------------------------------------------------
# special functions


def _gammainc_upper(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x), relative error ~1e-14."""
    if a <= 0:
        raise ValueError("a must be > 0")
    if x < 0:
        raise ValueError("x must be >= 0")
    if x == 0.0:
        return 1.0
    log_prefix = -x + a * math.log(x) - math.lgamma(a)
    if x < a + 1.0:
        # P(a, x) from the rising power series, then Q = 1 - P.
        term = 1.0 / a
        total = term
        denom = a
        for _ in range(1000):
            denom += 1.0
            term *= x / denom
            total += term
            if abs(term) < abs(total) * 1e-17:
                break
        return 1.0 - total * math.exp(log_prefix)
    # Q(a, x) from the continued fraction, modified Lentz.
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    return h * math.exp(log_prefix)


def chi2_sf(x: float, df: int) -> float:
    """Chi-square survival function P(X >= x)."""
    if x <= 0:
        return 1.0
    return min(1.0, max(0.0, _gammainc_upper(df / 2.0, x / 2.0)))


def normal_sf_two_sided(z: float) -> float:
    """Two-sided standard normal tail 2 * P(Z >= |z|)."""
    return math.erfc(abs(z) / math.sqrt(2.0))


# ---------------------------------------------------------------------------
# rank machinery


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    sv = values[order]
    i = 0
    n = len(values)
    while i < n:
        j = i
        while j + 1 < n and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _tie_term(values: np.ndarray) -> float:
    """Sum of t^3 - t over tie groups."""
    _, counts = np.unique(values, return_counts=True)
    t = counts.astype(float)
    return float((t**3 - t).sum())


def _pooled(groups: Sequence[SampleGroup]) -> tuple[np.ndarray, list[np.ndarray]]:
    labels = [g.label for g in groups]
    if len(set(labels)) != len(labels):
        raise ValueError("group labels must be unique")
    pooled = np.concatenate([np.asarray(g.values, dtype=float) for g in groups])
    ranks = _midranks(pooled)
    out = []
    at = 0
    for g in groups:
        out.append(ranks[at : at + len(g.values)])
        at += len(g.values)
    return pooled, out


def kruskal_wallis(groups: Sequence[SampleGroup]) -> KruskalWallisResult:
    """Kruskal-Wallis H with mid-rank ties and the usual tie correction.

    All-identical data collapses the tie divisor to zero; that case is
    reported as H = 0, p = 1 rather than an error.
    """
    if len(groups) < 2:
        raise ValueError("need at least two groups")
    pooled, group_ranks = _pooled(groups)
    n = len(pooled)
    df = len(groups) - 1
    h = 12.0 / (n * (n + 1)) * sum(
        r.sum() ** 2 / len(r) for r in group_ranks
    ) - 3.0 * (n + 1)
    divisor = 1.0 - _tie_term(pooled) / (n**3 - n)
    if divisor <= 0.0:
        return KruskalWallisResult(0.0, df, 1.0)
    h = max(h / divisor, 0.0)
    return KruskalWallisResult(h, df, chi2_sf(h, df))


def dunn_posthoc(groups: Sequence[SampleGroup], alpha: float = 0.05) -> list[PairwiseResult]:
    """Bonferroni-adjusted Dunn z-tests on every unordered pair of groups."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if len(groups) < 2:
        return []
    pooled, group_ranks = _pooled(groups)
    n = len(pooled)
    mean_ranks = [r.mean() for r in group_ranks]
    sizes = [len(r) for r in group_ranks]
    var_term = n * (n + 1) / 12.0 - _tie_term(pooled) / (12.0 * (n - 1))
    n_pairs = len(groups) * (len(groups) - 1) // 2
    out = []
    for i, j in combinations(range(len(groups)), 2):
        scale = var_term * (1.0 / sizes[i] + 1.0 / sizes[j])
        if scale > 0:
            z = (mean_ranks[i] - mean_ranks[j]) / math.sqrt(scale)
        else:
            z = 0.0
        p_raw = normal_sf_two_sided(z)
        p_adj = min(1.0, p_raw * n_pairs)
        out.append(
            PairwiseResult(
                pair=(groups[i].label, groups[j].label),
                z_statistic=z,
                p_raw=p_raw,
                p_adjusted=p_adj,
                significant=p_adj <= alpha,
            )
        )
    return out


# ---------------------------------------------------------------------------
# compact letter display


def _letter(k: int) -> str:
    out = ""
    k += 1
    while k:
        k, rem = divmod(k - 1, 26)
        out = chr(ord("a") + rem) + out
    return out


def compact_letter_display(
    pairwise: Sequence[PairwiseResult], order: Sequence[str]
) -> CldAssignment:
    """Insert-and-absorb letter assignment from pairwise significance.

    `order` ranks the labels best first (by group median in our reports).
    Starting from one column holding every label, each significant pair
    splits the columns containing both members, and columns absorbed by a
    superset are dropped; the surviving columns become the letters.
    """
    labels = list(order)
    known = set(labels)
    seen = set()
    for res in pairwise:
        a, b = res.pair
        if a not in known or b not in known:
            raise ValueError(f"pairwise result for unknown label {res.pair}")
        seen.add(frozenset((a, b)))
    for a, b in combinations(labels, 2):
        if frozenset((a, b)) not in seen:
            raise ValueError(f"missing pairwise result for ({a}, {b})")

    columns: list[frozenset[str]] = [frozenset(labels)]
    for res in pairwise:
        if not res.significant:
            continue
        a, b = res.pair
        nxt: list[frozenset[str]] = []
        for col in columns:
            if a in col and b in col:
                nxt.append(col - {a})
                nxt.append(col - {b})
            else:
                nxt.append(col)
        # absorb: drop empties, duplicates and strict subsets
        uniq: list[frozenset[str]] = []
        for c in nxt:
            if c and c not in uniq:
                uniq.append(c)
        columns = [c for c in uniq if not any(c < d for d in uniq)]

    pos = {lab: k for k, lab in enumerate(labels)}
    columns.sort(key=lambda col: tuple(sorted(pos[lab] for lab in col)))
    letter_sets = {lab: set() for lab in labels}
    for idx, col in enumerate(columns):
        for lab in col:
            letter_sets[lab].add(idx)
    letters = {
        lab: "".join(_letter(i) for i in sorted(ids)) for lab, ids in letter_sets.items()
    }
    sig = {frozenset(r.pair) for r in pairwise if r.significant}
    consistent = True
    for a, b in combinations(labels, 2):
        share = bool(letter_sets[a] & letter_sets[b])
        if share == (frozenset((a, b)) in sig):
            consistent = False
            break
    return CldAssignment(
        order=tuple(labels),
        letters=letters,
        letter_sets={lab: frozenset(ids) for lab, ids in letter_sets.items()},
        consistent=consistent,
    )
