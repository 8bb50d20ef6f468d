"""Problem model: plots, land uses, allocations, objectives and constraints.

A problem instance describes N plots, each carrying one building with f_i
floors, a K-use catalog, a K x K compatibility matrix, an N x K full-plot
price matrix, and the constraint parameters (area band gamma, plot-change
budget mu, and the price box). An allocation assigns one use code to every
floor of every plot; the induced per-plot use proportions drive both
objectives.

Everything here is pure and deterministic; instances are immutable after
construction and allocations are value-copied by the variation operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

CODE_DTYPE = np.int16


@dataclass(frozen=True)
class LandUse:
    """One land-use category; codes must be dense 0..K-1."""

    id: int
    name: str


@dataclass(frozen=True)
class Plot:
    """A parcel holding one building of `floor_count` floors.

    `actual_uses` is the as-built floor-use vector (length = floor_count);
    locked plots (schools, hospitals, ...) must keep it in every solution.
    """

    id: int
    floor_count: int
    total_floor_space: float
    neighbors: tuple[int, ...]
    locked: bool = False
    actual_uses: tuple[int, ...] = ()


class ProblemInstance:
    """Immutable bundle of plots, uses, matrices and constraint parameters.

    Construction validates the structural invariants and precomputes the
    flat floor layout plus the actual allocation's per-use areas so that
    objective evaluation and constraint checks are single vectorized
    passes.
    """

    def __init__(
        self,
        plots: Sequence[Plot],
        uses: Sequence[LandUse],
        compat: np.ndarray,
        price: np.ndarray,
        gamma: float,
        mu: float,
        price_min: float,
        price_max: float,
    ):
        self.plots = tuple(plots)
        self.uses = tuple(uses)
        self.compat = np.asarray(compat, dtype=float)
        self.price = np.asarray(price, dtype=float)
        self.gamma = float(gamma)
        self.mu = float(mu)
        self.price_min = float(price_min)
        self.price_max = float(price_max)
        self._validate()
        self._precompute()

    def _validate(self) -> None:
        n, k = len(self.plots), len(self.uses)
        if k < 2:
            raise ValueError("need at least two land-use types")
        if [u.id for u in self.uses] != list(range(k)):
            raise ValueError("land-use ids must be dense 0..K-1 in order")
        if [p.id for p in self.plots] != list(range(n)):
            raise ValueError("plot ids must be dense 0..N-1 in order")
        if self.compat.shape != (k, k):
            raise ValueError(f"compat must be {k}x{k}, got {self.compat.shape}")
        if not np.all(np.isfinite(self.compat)):
            raise ValueError("compat entries must be finite")
        if self.price.shape != (n, k):
            raise ValueError(f"price must be {n}x{k}, got {self.price.shape}")
        if np.any(self.price < 0):
            raise ValueError("price entries must be non-negative")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError("mu must be in [0, 1]")
        if self.price_min > self.price_max:
            raise ValueError("price_min must be <= price_max")
        for p in self.plots:
            if p.floor_count < 1:
                raise ValueError(f"plot {p.id}: floor_count must be >= 1")
            if p.total_floor_space <= 0:
                raise ValueError(f"plot {p.id}: total_floor_space must be > 0")
            if len(p.actual_uses) != p.floor_count:
                raise ValueError(f"plot {p.id}: actual_uses length != floor_count")
            if any(not 0 <= u < k for u in p.actual_uses):
                raise ValueError(f"plot {p.id}: actual use code out of range")
            for j in p.neighbors:
                if j == p.id:
                    raise ValueError(f"plot {p.id}: self-neighborhood not allowed")
                if not 0 <= j < n:
                    raise ValueError(f"plot {p.id}: neighbor id {j} out of range")

    def _precompute(self) -> None:
        n = len(self.plots)
        self.floor_counts = np.array([p.floor_count for p in self.plots], dtype=np.int64)
        self.floor_offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(self.floor_counts, out=self.floor_offsets[1:])
        self.total_floors = int(self.floor_offsets[-1])
        self.floor_plot_index = np.repeat(np.arange(n, dtype=np.int64), self.floor_counts)
        self.floor_space = np.array([p.total_floor_space for p in self.plots], dtype=float)
        self.locked = np.array([p.locked for p in self.plots], dtype=bool)
        self.unlocked_ids = np.flatnonzero(~self.locked)
        # Ordered neighbor pairs exactly as stored; J(i) is never symmetrized.
        ei, ej = [], []
        for p in self.plots:
            ei.extend([p.id] * len(p.neighbors))
            ej.extend(p.neighbors)
        self.edge_i = np.array(ei, dtype=np.int64)
        self.edge_j = np.array(ej, dtype=np.int64)
        self.actual_codes = np.concatenate(
            [np.asarray(p.actual_uses, dtype=CODE_DTYPE) for p in self.plots]
        )
        stats = evaluate_batch(self, self.actual_codes[None, :])
        self.actual_areas = stats.areas[0]
        self.actual_objectives = ObjectiveVector(
            compatibility=float(stats.compatibility[0]), price=float(stats.price[0])
        )

    @property
    def n_plots(self) -> int:
        return len(self.plots)

    @property
    def n_uses(self) -> int:
        return len(self.uses)

    def actual_allocation(self) -> "Allocation":
        """Fresh Allocation holding the as-built floor uses."""
        return Allocation(self.actual_codes.copy(), self.floor_offsets, self.n_uses)


@dataclass
class Allocation:
    """Per-plot floor-use vectors, stored as one flat code array.

    `codes[offsets[i]:offsets[i+1]]` is plot i's floor-use vector. The
    offsets array is shared with the instance and never mutated; operators
    copy `codes` before editing.
    """

    codes: np.ndarray
    offsets: np.ndarray
    use_count: int

    @classmethod
    def from_lists(cls, floor_uses: Iterable[Sequence[int]], use_count: int) -> "Allocation":
        rows = [np.asarray(u, dtype=CODE_DTYPE) for u in floor_uses]
        offsets = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum([len(r) for r in rows], out=offsets[1:])
        codes = np.concatenate(rows) if rows else np.zeros(0, dtype=CODE_DTYPE)
        return cls(codes, offsets, use_count)

    @property
    def n_plots(self) -> int:
        return len(self.offsets) - 1

    def floor_uses(self, i: int) -> np.ndarray:
        """Read-only view of plot i's floor-use vector."""
        return self.codes[self.offsets[i] : self.offsets[i + 1]]

    def copy(self) -> "Allocation":
        return Allocation(self.codes.copy(), self.offsets, self.use_count)

    def validate(self, inst: ProblemInstance) -> None:
        """Raise ValueError unless this allocation is valid for `inst`."""
        if self.use_count != inst.n_uses:
            raise ValueError("use_count mismatch")
        if len(self.codes) != inst.total_floors or not np.array_equal(
            self.offsets, inst.floor_offsets
        ):
            raise ValueError("floor layout mismatch")
        if np.any(self.codes < 0) or np.any(self.codes >= inst.n_uses):
            raise ValueError("floor-use code out of range")
        for i in np.flatnonzero(inst.locked):
            if not np.array_equal(self.floor_uses(i), inst.actual_codes[inst.floor_offsets[i] : inst.floor_offsets[i + 1]]):
                raise ValueError(f"locked plot {i} was altered")


@dataclass(frozen=True)
class ObjectiveVector:
    """A (compatibility, price) pair; both objectives are maximized."""

    compatibility: float
    price: float

    def as_array(self) -> np.ndarray:
        return np.array([self.compatibility, self.price], dtype=float)


@dataclass(frozen=True)
class ConstraintReport:
    """Outcome of the area / price / plot-change checks for one allocation."""

    area_ok: bool
    price_ok: bool
    changed_plot_count: int
    plot_budget_ok: bool
    max_area_change_fraction: float


@dataclass(frozen=True)
class BatchStats:
    """Vectorized evaluation results for a batch of allocations."""

    compatibility: np.ndarray  # (B,)
    price: np.ndarray  # (B,)
    areas: np.ndarray  # (B, K) floor area per use
    changed: np.ndarray  # (B,) plots differing from actual


def evaluate_batch(inst: ProblemInstance, codes: np.ndarray) -> BatchStats:
    """Evaluate a (B, total_floors) batch of flat code arrays in one pass.

    Returns both objectives plus the per-use areas and changed-plot counts
    needed by the constraint checks. The neighborhood sum accumulates
    per-edge contributions with numpy's pairwise summation.
    """
    codes = np.atleast_2d(codes)
    b = codes.shape[0]
    n, k = inst.n_plots, inst.n_uses
    if codes.shape[1] != inst.total_floors:
        raise ValueError(
            f"expected {inst.total_floors} floor codes per allocation, got {codes.shape[1]}"
        )
    flat = (
        np.arange(b, dtype=np.int64)[:, None] * (n * k)
        + inst.floor_plot_index[None, :] * k
        + codes.astype(np.int64)
    ).ravel()
    counts = np.bincount(flat, minlength=b * n * k).reshape(b, n, k)
    props = counts / inst.floor_counts[None, :, None]
    areas = props * inst.floor_space[None, :, None]  # (B, N, K)
    weighted = areas @ inst.compat  # (B, N, K)
    if len(inst.edge_i):
        contrib = np.einsum(
            "bek,bek->be", weighted[:, inst.edge_i, :], areas[:, inst.edge_j, :]
        )
        compatibility = contrib.sum(axis=1)
    else:
        compatibility = np.zeros(b)
    price = np.einsum("bnk,nk->b", props, inst.price)
    per_use_area = areas.sum(axis=1)
    diff = (codes != inst.actual_codes[None, :]).astype(np.int64)
    per_plot = np.add.reduceat(diff, inst.floor_offsets[:-1], axis=1)
    changed = (per_plot > 0).sum(axis=1)
    return BatchStats(compatibility, price, per_use_area, changed)


def _single_stats(inst: ProblemInstance, a: Allocation) -> BatchStats:
    if len(a.codes) != inst.total_floors:
        raise ValueError("allocation does not match the instance floor layout")
    return evaluate_batch(inst, a.codes[None, :])


def evaluate_compatibility(inst: ProblemInstance, a: Allocation) -> float:
    """Neighborhood compatibility score.

    Sums C[l, m] * x[i, l] * x[j, m] * F[i] * F[j] over every stored
    ordered neighbor pair (i, j) and every use pair (l, m), where x is the
    floor-proportion matrix induced by the allocation.
    """
    return float(_single_stats(inst, a).compatibility[0])


def evaluate_price(inst: ProblemInstance, a: Allocation) -> float:
    """Total land price: sum over plots and uses of P[i, m] * x[i, m]."""
    return float(_single_stats(inst, a).price[0])


def proportions(a: Allocation, i: int) -> np.ndarray:
    """Use proportions x[i, .] of plot i (fractions of its floors)."""
    if not 0 <= i < a.n_plots:
        raise ValueError(f"plot id {i} out of range")
    row = a.floor_uses(i)
    return np.bincount(row, minlength=a.use_count) / len(row)


def area_band_ok(inst: ProblemInstance, areas: np.ndarray, gamma: float) -> bool:
    """Constraint 3: every use's total area within (1 +/- gamma) of actual."""
    lo = (1.0 - gamma) * inst.actual_areas
    hi = (1.0 + gamma) * inst.actual_areas
    return bool(np.all(areas >= lo) and np.all(areas <= hi))


def price_box_ok(inst: ProblemInstance, price: float) -> bool:
    """Constraint 4: total price within [price_min, price_max]."""
    return inst.price_min <= price <= inst.price_max


def plot_budget_ok(inst: ProblemInstance, changed: int, mu: float) -> bool:
    """Constraint 5: changed-plot count within mu * N (soft guide)."""
    return changed <= mu * inst.n_plots + 1e-9


def check_constraints(
    inst: ProblemInstance,
    a: Allocation,
    gamma: float | None = None,
    mu: float | None = None,
) -> ConstraintReport:
    """Check Constraints 3-5 for one allocation.

    `gamma` and `mu` override the instance defaults; relaxation schedules
    pass the phase values here. Constraints 1-2 hold structurally for
    every Allocation (proportions are floor fractions).
    """
    gamma = inst.gamma if gamma is None else float(gamma)
    mu = inst.mu if mu is None else float(mu)
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must be in [0, 1]")
    stats = _single_stats(inst, a)
    areas = stats.areas[0]
    price = float(stats.price[0])
    changed = int(stats.changed[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.abs(areas - inst.actual_areas) / inst.actual_areas
    rel = np.where(
        inst.actual_areas > 0, rel, np.where(areas > 0, np.inf, 0.0)
    )
    return ConstraintReport(
        area_ok=area_band_ok(inst, areas, gamma),
        price_ok=price_box_ok(inst, price),
        changed_plot_count=changed,
        plot_budget_ok=plot_budget_ok(inst, changed, mu),
        max_area_change_fraction=float(np.max(rel)) if len(rel) else 0.0,
    )
