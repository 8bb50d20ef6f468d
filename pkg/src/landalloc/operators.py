"""Variation and selection operators shared by all engines.

Plots are recombined on their base-K integer encoding: a floor-use vector
[u_0, ..., u_{f-1}] maps to the integer sum(u_t * K^(f-1-t)), most
significant digit first (so "122" in base 3 is 17). Real-coded SBX,
polynomial mutation and the DE-style scaled operators act on these
integers, then round half-to-even and clamp back into [0, K^f - 1] before
decoding, which keeps the near-parent bias that a modulo wrap would
destroy.

Every operator takes an explicit numpy Generator and is deterministic
given (inputs, config, seed). Locked plots always copy through. The
*_batch kernels are the single source of truth; the per-allocation
functions wrap them on one-row batches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np

from .model import CODE_DTYPE, Allocation, ProblemInstance

T = TypeVar("T")

# int64 holds K^f - 1 as long as f * log2(K) stays below 63 bits; taller
# buildings fall back to python-int (object dtype) arithmetic.
_INT64_BITS = 62


@dataclass(frozen=True)
class OperatorConfig:
    """Knobs shared by the variation operators.

    sbx_eta / poly_eta are the usual distribution indices (paper gap;
    defaults follow common NSGA-II practice), de_scale is the DE scale
    factor F, crossover_plot_fraction is the per-plot participation /
    swap probability, and mutation_plot_budget caps how many plots one
    mutation may alter. floorwise switches uniform crossover from
    plot-wise to floor-wise swapping.
    """

    sbx_eta: float = 20.0
    poly_eta: float = 20.0
    de_scale: float = 0.5
    crossover_plot_fraction: float = 0.2
    mutation_plot_budget: int = 1
    floorwise: bool = False
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.crossover_plot_fraction <= 1.0:
            raise ValueError("crossover_plot_fraction must be in [0, 1]")
        if self.sbx_eta <= 0 or self.poly_eta <= 0:
            raise ValueError("distribution indices must be > 0")
        if self.de_scale <= 0:
            raise ValueError("de_scale must be > 0")
        if self.mutation_plot_budget < 0:
            raise ValueError("mutation_plot_budget must be >= 0")


def encode_uses(uses: Sequence[int], base: int) -> int:
    """Base-`base` integer for a floor-use vector, MSB first."""
    value = 0
    for u in uses:
        value = value * base + int(u)
    return value


def decode_uses(value: int, base: int, digits: int) -> np.ndarray:
    """Inverse of encode_uses; returns a length-`digits` code array."""
    if not 0 <= value < base**digits:
        raise ValueError(f"value {value} outside [0, {base}^{digits})")
    out = np.zeros(digits, dtype=CODE_DTYPE)
    for t in range(digits - 1, -1, -1):
        value, out[t] = divmod(value, base)
    return out


@dataclass(frozen=True)
class EncodedPlot:
    """One plot's floor-use vector as an arbitrary-precision integer."""

    value: int
    base: int
    digits: int

    def __post_init__(self):
        if not 0 <= self.value <= self.base**self.digits - 1:
            raise ValueError("encoded value out of range")

    @classmethod
    def from_uses(cls, uses: Sequence[int], base: int) -> "EncodedPlot":
        return cls(encode_uses(uses, base), base, len(uses))

    def to_uses(self) -> np.ndarray:
        return decode_uses(self.value, self.base, self.digits)


class PlotCodec:
    """Vectorized base-K codec for a whole instance's flat code layout.

    Uses int64 arithmetic when every plot's code range fits, otherwise
    python-int (object dtype) arithmetic, so tall buildings never
    overflow.
    """

    def __init__(self, inst: ProblemInstance):
        self.inst = inst
        self.base = inst.n_uses
        self.digits = inst.floor_counts
        bits = inst.floor_counts * np.log2(self.base)
        self._exact = bool(np.all(bits <= _INT64_BITS))
        dtype = np.int64 if self._exact else object
        place = np.empty(inst.total_floors, dtype=dtype)
        for i in range(inst.n_plots):
            lo, hi = inst.floor_offsets[i], inst.floor_offsets[i + 1]
            f = hi - lo
            col = [self.base ** int(f - 1 - t) for t in range(f)]
            place[lo:hi] = np.array(col, dtype=dtype)
        self.place_values = place
        self.max_values = np.array(
            [self.base ** int(f) - 1 for f in inst.floor_counts], dtype=dtype
        )
        # targets[p] = flat indices of digit p counted from the least
        # significant end, for plots tall enough to have it
        self._max_digits = int(inst.floor_counts.max()) if inst.n_plots else 0
        self._digit_plots = []
        self._digit_slots = []
        for p in range(self._max_digits):
            ids = np.flatnonzero(inst.floor_counts > p)
            self._digit_plots.append(ids)
            self._digit_slots.append(inst.floor_offsets[ids] + inst.floor_counts[ids] - 1 - p)

    def encode_rows(self, codes: np.ndarray) -> np.ndarray:
        """(B, total_floors) code rows -> (B, N) per-plot integers."""
        codes = np.atleast_2d(codes)
        weighted = codes.astype(self.place_values.dtype) * self.place_values[None, :]
        if self.inst.n_plots == 0:
            return np.zeros((codes.shape[0], 0), dtype=self.place_values.dtype)
        return np.add.reduceat(weighted, self.inst.floor_offsets[:-1], axis=1)

    def decode_rows(self, values: np.ndarray) -> np.ndarray:
        """(B, N) per-plot integers -> (B, total_floors) code rows."""
        values = np.atleast_2d(values).copy()
        out = np.zeros((values.shape[0], self.inst.total_floors), dtype=CODE_DTYPE)
        for p in range(self._max_digits):
            ids = self._digit_plots[p]
            rem = values[:, ids] % self.base
            values[:, ids] //= self.base
            out[:, self._digit_slots[p]] = rem.astype(CODE_DTYPE)
        return out

    def clamp(self, values: np.ndarray) -> np.ndarray:
        """Clamp (B, N) rounded reals into [0, K^f - 1] as codec integers."""
        if self._exact:
            v = np.clip(values, 0, None)
            v = np.minimum(v, self.max_values[None, :].astype(float))
            return v.astype(np.int64)
        out = np.empty(values.shape, dtype=object)
        for i in range(values.shape[0]):
            for j in range(values.shape[1]):
                out[i, j] = min(max(int(values[i, j]), 0), int(self.max_values[j]))
        return out


def _codec(inst: ProblemInstance) -> PlotCodec:
    codec = getattr(inst, "_plot_codec", None)
    if codec is None:
        codec = PlotCodec(inst)
        inst._plot_codec = codec
    return codec


def _rint(values: np.ndarray) -> np.ndarray:
    # np.rint rounds half to even, matching python round()
    return np.rint(values)


# ---------------------------------------------------------------------------
# selection


def tournament_select(
    population: Sequence[T],
    key: Callable[[T], object],
    pool_size: int,
    rng: np.random.Generator,
) -> list[T]:
    """Binary tournaments with replacement until the pool is full.

    Each tournament draws two individuals uniformly (independently, so an
    individual can meet itself); the one with the greater `key` wins and
    ties are broken by a fair coin.
    """
    if not population:
        raise ValueError("population must be non-empty")
    keys = [key(ind) for ind in population]
    order = sorted(range(len(keys)), key=lambda i: keys[i])
    rank = np.zeros(len(keys), dtype=np.int64)
    r = 0
    for pos, idx in enumerate(order):
        if pos > 0 and keys[idx] != keys[order[pos - 1]]:
            r = pos
        rank[idx] = r
    winners = tournament_indices(rank, pool_size, rng)
    return [population[w] for w in winners]


def tournament_indices(
    rank: np.ndarray, pool_size: int, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized core: `rank` is a dense higher-is-better score array."""
    n = len(rank)
    if n == 0:
        raise ValueError("population must be non-empty")
    if pool_size == 0:
        return np.zeros(0, dtype=np.int64)
    a = rng.integers(0, n, size=pool_size)
    b = rng.integers(0, n, size=pool_size)
    coin = rng.random(pool_size) < 0.5
    take_a = rank[a] > rank[b]
    tie = rank[a] == rank[b]
    return np.where(take_a | (tie & coin), a, b)


# ---------------------------------------------------------------------------
# crossover


def sbx_values(
    v1: np.ndarray, v2: np.ndarray, eta: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Real-coded SBX on value arrays; returns the two children (floats)."""
    u = rng.random(v1.shape)
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0)),
    )
    f1 = v1.astype(float)
    f2 = v2.astype(float)
    c1 = 0.5 * ((1.0 + beta) * f1 + (1.0 - beta) * f2)
    c2 = 0.5 * ((1.0 - beta) * f1 + (1.0 + beta) * f2)
    return c1, c2


def sbx_batch(
    codes1: np.ndarray,
    codes2: np.ndarray,
    cfg: OperatorConfig,
    inst: ProblemInstance,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """SBX over paired code rows; each unlocked plot joins independently."""
    codes1 = np.atleast_2d(codes1)
    codes2 = np.atleast_2d(codes2)
    codec = _codec(inst)
    b, n = codes1.shape[0], inst.n_plots
    select = (rng.random((b, n)) < cfg.crossover_plot_fraction) & ~inst.locked[None, :]
    u = rng.random((b, n))
    if not select.any():
        return codes1.copy(), codes2.copy()
    v1 = codec.encode_rows(codes1)
    v2 = codec.encode_rows(codes2)
    eta = cfg.sbx_eta
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0)),
    )
    f1 = v1.astype(float)
    f2 = v2.astype(float)
    c1 = codec.clamp(_rint(0.5 * ((1.0 + beta) * f1 + (1.0 - beta) * f2)))
    c2 = codec.clamp(_rint(0.5 * ((1.0 - beta) * f1 + (1.0 + beta) * f2)))
    child1 = np.where(select, c1, v1)
    child2 = np.where(select, c2, v2)
    out1 = codec.decode_rows(child1)
    out2 = codec.decode_rows(child2)
    # Unselected plots copy through bit-exactly (no re-encode drift).
    fmask = np.repeat(select, inst.floor_counts, axis=1)
    return (
        np.where(fmask, out1, codes1).astype(CODE_DTYPE),
        np.where(fmask, out2, codes2).astype(CODE_DTYPE),
    )


def sbx_crossover(
    p1: Allocation,
    p2: Allocation,
    cfg: OperatorConfig,
    inst: ProblemInstance,
    rng: np.random.Generator,
) -> tuple[Allocation, Allocation]:
    """SBX on the base-K encodings of the selected unlocked plots."""
    c1, c2 = sbx_batch(p1.codes[None, :], p2.codes[None, :], cfg, inst, rng)
    return (
        Allocation(c1[0], inst.floor_offsets, inst.n_uses),
        Allocation(c2[0], inst.floor_offsets, inst.n_uses),
    )


def uniform_batch(
    codes1: np.ndarray,
    codes2: np.ndarray,
    cfg: OperatorConfig,
    inst: ProblemInstance,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform crossover over paired code rows (plot-wise or floor-wise)."""
    codes1 = np.atleast_2d(codes1)
    codes2 = np.atleast_2d(codes2)
    b = codes1.shape[0]
    unlocked_floor = np.repeat(~inst.locked, inst.floor_counts)
    if cfg.floorwise:
        swap = (rng.random((b, inst.total_floors)) < cfg.crossover_plot_fraction)
        swap &= unlocked_floor[None, :]
    else:
        plot_swap = (rng.random((b, inst.n_plots)) < cfg.crossover_plot_fraction)
        plot_swap &= ~inst.locked[None, :]
        swap = np.repeat(plot_swap, inst.floor_counts, axis=1)
    out1 = np.where(swap, codes2, codes1)
    out2 = np.where(swap, codes1, codes2)
    return out1.astype(CODE_DTYPE), out2.astype(CODE_DTYPE)


def uniform_crossover(
    p1: Allocation,
    p2: Allocation,
    cfg: OperatorConfig,
    inst: ProblemInstance,
    rng: np.random.Generator,
) -> tuple[Allocation, Allocation]:
    """Swap whole plots (or single floors with cfg.floorwise) between parents."""
    c1, c2 = uniform_batch(p1.codes[None, :], p2.codes[None, :], cfg, inst, rng)
    return (
        Allocation(c1[0], inst.floor_offsets, inst.n_uses),
        Allocation(c2[0], inst.floor_offsets, inst.n_uses),
    )


# ---------------------------------------------------------------------------
# mutation


def _pick_plots_batch(
    b: int, budget: int, inst: ProblemInstance, rng: np.random.Generator
) -> np.ndarray:
    """(B, N) bool mask selecting up to `budget` distinct unlocked plots per row."""
    n_unlocked = len(inst.unlocked_ids)
    take = min(budget, n_unlocked)
    mask = np.zeros((b, inst.n_plots), dtype=bool)
    if take == 0:
        return mask
    u = rng.random((b, n_unlocked))
    kth = np.partition(u, take - 1, axis=1)[:, take - 1 : take]
    chosen = u <= kth
    mask[:, inst.unlocked_ids] = chosen
    return mask


def random_mutation_batch(
    codes: np.ndarray,
    cfg: OperatorConfig,
    inst: ProblemInstance,
    rng: np.random.Generator,
) -> np.ndarray:
    """Redraw every floor of up to mutation_plot_budget plots per row."""
    codes = np.atleast_2d(codes)
    b = codes.shape[0]
    mask = _pick_plots_batch(b, cfg.mutation_plot_budget, inst, rng)
    fresh = rng.integers(0, inst.n_uses, size=(b, inst.total_floors), dtype=np.int64)
    fmask = np.repeat(mask, inst.floor_counts, axis=1)
    return np.where(fmask, fresh, codes).astype(CODE_DTYPE)


def random_mutation(
    a: Allocation, cfg: OperatorConfig, inst: ProblemInstance, rng: np.random.Generator
) -> Allocation:
    """Uniformly re-randomize the floors of a few unlocked plots."""
    out = random_mutation_batch(a.codes[None, :], cfg, inst, rng)
    return Allocation(out[0], inst.floor_offsets, inst.n_uses)


def polynomial_values(
    values: np.ndarray,
    low: np.ndarray,
    high: np.ndarray,
    eta: float,
    u: np.ndarray,
) -> np.ndarray:
    """Bounded polynomial-mutation step; degenerate domains pass through."""
    span = high.astype(float) - low.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        d1 = (values - low.astype(float)) / span
        d2 = (high.astype(float) - values) / span
        exp = 1.0 / (eta + 1.0)
        left = (2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (eta + 1.0)) ** exp - 1.0
        right = 1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (eta + 1.0)) ** exp
    delta = np.where(u < 0.5, left, right)
    return np.where(span > 0, values + delta * span, values)


def polynomial_mutation_batch(
    codes: np.ndarray,
    cfg: OperatorConfig,
    inst: ProblemInstance,
    rng: np.random.Generator,
) -> np.ndarray:
    """Perturb the encoded value of up to mutation_plot_budget plots per row."""
    codes = np.atleast_2d(codes)
    codec = _codec(inst)
    b = codes.shape[0]
    mask = _pick_plots_batch(b, cfg.mutation_plot_budget, inst, rng)
    u = rng.random((b, inst.n_plots))
    if not mask.any():
        return codes.copy()
    values = codec.encode_rows(codes)
    low = np.zeros(inst.n_plots)
    high = codec.max_values.astype(float)
    perturbed = polynomial_values(values.astype(float), low, high, cfg.poly_eta, u)
    mutated = codec.clamp(_rint(perturbed))
    out = codec.decode_rows(np.where(mask, mutated, values))
    fmask = np.repeat(mask, inst.floor_counts, axis=1)
    return np.where(fmask, out, codes).astype(CODE_DTYPE)


def polynomial_mutation(
    a: Allocation, cfg: OperatorConfig, inst: ProblemInstance, rng: np.random.Generator
) -> Allocation:
    """Polynomial mutation on the base-K encoding over [0, K^f - 1]."""
    out = polynomial_mutation_batch(a.codes[None, :], cfg, inst, rng)
    return Allocation(out[0], inst.floor_offsets, inst.n_uses)


# ---------------------------------------------------------------------------
# DE-style scaled operators


def scaled_add_batch(
    target: np.ndarray, donor: np.ndarray, f: float, inst: ProblemInstance
) -> np.ndarray:
    """Per unlocked plot: encode(target) + round(f * encode(donor)), clamped."""
    target = np.atleast_2d(target)
    donor = np.atleast_2d(donor)
    codec = _codec(inst)
    vt = codec.encode_rows(target)
    vd = codec.encode_rows(donor)
    moved = codec.clamp(vt.astype(float) + _rint(f * vd.astype(float)))
    out = codec.decode_rows(moved)
    fmask = np.repeat(~inst.locked, inst.floor_counts)
    return np.where(fmask[None, :], out, target).astype(CODE_DTYPE)


def scaled_add(
    target: Allocation, donor: Allocation, f: float, inst: ProblemInstance
) -> Allocation:
    """DE-style mutant: target shifted by the scaled donor encoding."""
    out = scaled_add_batch(target.codes[None, :], donor.codes[None, :], f, inst)
    return Allocation(out[0], inst.floor_offsets, inst.n_uses)


def scaled_difference_batch(
    a: np.ndarray, b: np.ndarray, f: float, inst: ProblemInstance
) -> np.ndarray:
    """Per unlocked plot: round(f * (encode(a) - encode(b))), clamped."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    codec = _codec(inst)
    va = codec.encode_rows(a)
    vb = codec.encode_rows(b)
    moved = codec.clamp(_rint(f * (va.astype(float) - vb.astype(float))))
    out = codec.decode_rows(moved)
    fmask = np.repeat(~inst.locked, inst.floor_counts)
    return np.where(fmask[None, :], out, a).astype(CODE_DTYPE)


def scaled_difference(
    a: Allocation, b: Allocation, f: float, inst: ProblemInstance
) -> Allocation:
    """DE difference vector, used directly as a new candidate solution."""
    out = scaled_difference_batch(a.codes[None, :], b.codes[None, :], f, inst)
    return Allocation(out[0], inst.floor_offsets, inst.n_uses)
