"""The four optimization engines plus the NSGA-II machinery they share.

Engines:

* ``SOA``         generational GA on the scalar fitness a*price + b*compatibility
* ``MSBX_NSGA2``  NSGA-II with random mutation before SBX crossover and
                  polynomial mutation occasionally replacing crossover
* ``CR_DES``      NSGA-II skeleton with uniform crossover where, with some
                  probability, a child is the scaled difference vector of two
                  mating-pool members
* ``MSBX_MO``     DE-flavored loop: every solution is shifted by a scaled
                  random donor and crossed (SBX) with itself

All engines share initialization (perturb 25% of the unlocked plots of the
actual map), binary tournaments over a half-population mating pool,
(mu + lambda) survival, feasible-first constraint handling, and the
relaxation schedule that restores the original constraints at the final
generation. Every run is driven by a single seeded Generator, so identical
(instance, config, seed) produce bit-identical RunRecords.

Internally a population is a bundle of parallel arrays (codes matrix,
objectives, cached constraint stats); Individual objects are materialized
only for the persisted RunRecord.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np

from . import metrics
from .model import (
    CODE_DTYPE,
    Allocation,
    ObjectiveVector,
    ProblemInstance,
    evaluate_batch,
    price_box_ok,
)
from .operators import (
    OperatorConfig,
    polynomial_mutation_batch,
    random_mutation_batch,
    sbx_batch,
    scaled_add_batch,
    scaled_difference_batch,
    tournament_indices,
    uniform_batch,
)

ALGORITHMS = ("SOA", "MSBX_NSGA2", "CR_DES", "MSBX_MO")

_INIT_RETRY_CAP = 50


@dataclass(frozen=True)
class RelaxationSchedule:
    """Constraint values used during search vs at the final generation."""

    gamma_search: float
    mu_search: float
    gamma_final: float
    mu_final: float

    @classmethod
    def constant(cls, gamma: float, mu: float) -> "RelaxationSchedule":
        return cls(gamma, mu, gamma, mu)


@dataclass(frozen=True)
class EngineConfig:
    algorithm: str
    population_size: int = 100
    generations: int = 150
    init_change_fraction: float = 0.25
    soa_a: float = 0.5  # weight on price
    soa_b: float = 0.5  # weight on compatibility
    de_child_probability: float = 0.2
    mutation_probability: float = 0.1
    relax: RelaxationSchedule | None = None  # None -> instance gamma/mu, constant
    operator_cfg: OperatorConfig = field(default_factory=OperatorConfig)
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        for name in ("init_change_fraction", "de_child_probability", "mutation_probability"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")


@dataclass
class Individual:
    """One member of a population with its cached evaluation results."""

    allocation: Allocation
    objectives: ObjectiveVector
    areas: np.ndarray  # (K,) per-use floor area
    changed_count: int
    rank: int = 0
    crowding: float = 0.0
    feasible: bool = True
    violation: float = 0.0


@dataclass
class RunRecord:
    """Outcome of one seeded engine run.

    `hv_trace` is the per-generation hypervolume of the all-time archive of
    solutions feasible under the final (unrelaxed) constraints, normalized
    over the archive's own objective range plus the actual land-use point.
    `front_indices` point into `population` and select the reported,
    feasible-filtered Pareto front. Wall time is informational only and is
    excluded from canonical serialization.
    """

    algorithm: str
    config: dict
    seed: int
    hv_trace: list[float]
    population: list[Individual]
    front_indices: list[int]
    wall_time_s: float

    def front(self) -> list[Individual]:
        return [self.population[i] for i in self.front_indices]


# ---------------------------------------------------------------------------
# non-dominated sorting and crowding


def _as_points(objs) -> np.ndarray:
    if isinstance(objs, np.ndarray):
        return np.atleast_2d(objs.astype(float))
    rows = [
        o.as_array() if isinstance(o, ObjectiveVector) else np.asarray(o, dtype=float)
        for o in objs
    ]
    if not rows:
        return np.zeros((0, 2))
    return np.stack(rows)


def fast_non_dominated_sort(objs) -> list[list[int]]:
    """Partition points into Pareto fronts under maximization dominance.

    a dominates b iff a >= b componentwise and a != b. Front k holds the
    points non-dominated once fronts 1..k-1 are removed.
    """
    pts = _as_points(objs)
    n = len(pts)
    if n == 0:
        raise ValueError("cannot sort an empty objective list")
    ge = (pts[:, None, :] >= pts[None, :, :]).all(axis=2)
    dom = ge & ~ge.T  # i >= j with at least one strict coordinate
    counts = dom.sum(axis=0).astype(np.int64)
    fronts: list[list[int]] = []
    current = np.flatnonzero(counts == 0)
    while current.size:
        fronts.append(current.tolist())
        counts[current] = -1
        counts -= dom[current].sum(axis=0)
        current = np.flatnonzero(counts == 0)
    return fronts


def crowding_distance(
    objs, obj_min: np.ndarray | None = None, obj_max: np.ndarray | None = None
) -> np.ndarray:
    """NSGA-II crowding distances for one front.

    Boundary points get +inf per objective; interior points accumulate
    (next - prev) / (max - min); a degenerate span contributes 0.
    """
    pts = _as_points(objs)
    n = len(pts)
    if n == 0:
        raise ValueError("front must be non-empty")
    lo = pts.min(axis=0) if obj_min is None else np.asarray(obj_min, dtype=float)
    hi = pts.max(axis=0) if obj_max is None else np.asarray(obj_max, dtype=float)
    d = np.zeros(n)
    for m in range(pts.shape[1]):
        order = np.argsort(pts[:, m], kind="stable")
        d[order[0]] = np.inf
        d[order[-1]] = np.inf
        span = hi[m] - lo[m]
        if span > 0 and n > 2:
            d[order[1:-1]] += (pts[order[2:], m] - pts[order[:-2], m]) / span
    return d


# ---------------------------------------------------------------------------
# array-backed population state


class _Pop:
    """Parallel arrays for one population; cheap to slice and concatenate."""

    __slots__ = ("codes", "comp", "price", "areas", "changed", "rank", "crowd",
                 "feasible", "violation")

    def __init__(self, codes, comp, price, areas, changed):
        n = len(comp)
        self.codes = codes
        self.comp = comp
        self.price = price
        self.areas = areas
        self.changed = changed
        self.rank = np.zeros(n, dtype=np.int64)
        self.crowd = np.zeros(n)
        self.feasible = np.ones(n, dtype=bool)
        self.violation = np.zeros(n)

    @classmethod
    def evaluate(cls, inst: ProblemInstance, codes: np.ndarray) -> "_Pop":
        stats = evaluate_batch(inst, codes)
        return cls(codes, stats.compatibility, stats.price, stats.areas, stats.changed)

    @property
    def n(self) -> int:
        return len(self.comp)

    def objectives(self) -> np.ndarray:
        return np.column_stack([self.comp, self.price])

    def concat(self, *others: "_Pop") -> "_Pop":
        pops = (self,) + others
        out = _Pop(
            np.concatenate([p.codes for p in pops]),
            np.concatenate([p.comp for p in pops]),
            np.concatenate([p.price for p in pops]),
            np.concatenate([p.areas for p in pops]),
            np.concatenate([p.changed for p in pops]),
        )
        return out

    def take(self, idx) -> "_Pop":
        idx = np.asarray(idx, dtype=np.int64)
        out = _Pop(
            self.codes[idx], self.comp[idx], self.price[idx],
            self.areas[idx], self.changed[idx],
        )
        out.rank = self.rank[idx]
        out.crowd = self.crowd[idx]
        out.feasible = self.feasible[idx]
        out.violation = self.violation[idx]
        return out


def _materialize(inst: ProblemInstance, pop: _Pop) -> list[Individual]:
    return [
        Individual(
            allocation=Allocation(pop.codes[r].copy(), inst.floor_offsets, inst.n_uses),
            objectives=ObjectiveVector(float(pop.comp[r]), float(pop.price[r])),
            areas=pop.areas[r].copy(),
            changed_count=int(pop.changed[r]),
            rank=int(pop.rank[r]),
            crowding=float(pop.crowd[r]),
            feasible=bool(pop.feasible[r]),
            violation=float(pop.violation[r]),
        )
        for r in range(pop.n)
    ]


# ---------------------------------------------------------------------------
# constraint handling


def _resolved(inst: ProblemInstance, cfg: EngineConfig) -> EngineConfig:
    if cfg.relax is None:
        return replace(cfg, relax=RelaxationSchedule.constant(inst.gamma, inst.mu))
    return cfg


def apply_relaxation_phase(gen: int, cfg: EngineConfig) -> tuple[float, float]:
    """(gamma, mu) in effect at 1-based generation `gen`.

    Search values apply up to generation G-1; the final generation runs
    under the unrelaxed (final) values.
    """
    if cfg.relax is None:
        raise ValueError("relaxation schedule not resolved")
    if not 1 <= gen <= cfg.generations:
        raise ValueError(f"generation {gen} outside [1, {cfg.generations}]")
    r = cfg.relax
    if gen == cfg.generations:
        return (r.gamma_final, r.mu_final)
    return (r.gamma_search, r.mu_search)


def _refresh_pop(inst: ProblemInstance, pop: _Pop, gamma: float, mu: float) -> None:
    """Set feasible/violation arrays under (gamma, mu).

    Violation is the normalized area excess plus normalized price excess;
    the plot budget participates in the flag only.
    """
    lo = (1.0 - gamma) * inst.actual_areas
    hi = (1.0 + gamma) * inst.actual_areas
    area_ok = (pop.areas >= lo).all(axis=1) & (pop.areas <= hi).all(axis=1)
    price_ok = (pop.price >= inst.price_min) & (pop.price <= inst.price_max)
    budget_ok = pop.changed <= mu * inst.n_plots + 1e-9
    pop.feasible = area_ok & price_ok & budget_ok
    positive = inst.actual_areas[inst.actual_areas > 0]
    fallback = positive.mean() if positive.size else 1.0
    denom = np.where(inst.actual_areas > 0, inst.actual_areas, fallback)
    area_excess = (np.maximum(pop.areas - hi, 0.0) + np.maximum(lo - pop.areas, 0.0)) / denom
    span = inst.price_max - inst.price_min
    if span <= 0 or not np.isfinite(span):
        span = max(abs(inst.price_max), 1.0) if np.isfinite(inst.price_max) else 1.0
    price_excess = (
        np.maximum(pop.price - inst.price_max, 0.0)
        + np.maximum(inst.price_min - pop.price, 0.0)
    ) / span
    pop.violation = area_excess.sum(axis=1) + price_excess


def _pop_fronts(pop: _Pop) -> list[np.ndarray]:
    """Feasible-first fronts: NDS over feasible, then violation groups."""
    fronts: list[np.ndarray] = []
    feas_idx = np.flatnonzero(pop.feasible)
    if feas_idx.size:
        objs = pop.objectives()[feas_idx]
        fronts.extend(feas_idx[fr] for fr in fast_non_dominated_sort(objs))
    inf_idx = np.flatnonzero(~pop.feasible)
    if inf_idx.size:
        v = pop.violation[inf_idx]
        order = np.argsort(v, kind="stable")
        sorted_idx = inf_idx[order]
        sorted_v = v[order]
        start = 0
        for k in range(1, len(sorted_idx) + 1):
            if k == len(sorted_idx) or sorted_v[k] != sorted_v[start]:
                fronts.append(sorted_idx[start:k])
                start = k
    for r, fr in enumerate(fronts):
        pop.rank[fr] = r
    return fronts


def _pop_crowding(pop: _Pop, fronts: list[np.ndarray]) -> None:
    objs = pop.objectives()
    for fr in fronts:
        pop.crowd[fr] = crowding_distance(objs[fr])


def _pop_survival(pop: _Pop, fronts: list[np.ndarray], target: int) -> _Pop:
    """Fill whole fronts, trimming the last admitted one by crowding."""
    _pop_crowding(pop, fronts)
    chosen: list[np.ndarray] = []
    total = 0
    for fr in fronts:
        if total + len(fr) <= target:
            chosen.append(fr)
            total += len(fr)
            continue
        need = target - total
        if need > 0:
            order = np.argsort(-pop.crowd[fr], kind="stable")
            chosen.append(fr[order[:need]])
        break
    return pop.take(np.concatenate(chosen))


def _dense_rank(*cols: np.ndarray) -> np.ndarray:
    """Dense higher-is-better scores from higher-is-better key columns."""
    arrs = [np.asarray(c, dtype=float) for c in cols]
    order = np.lexsort(tuple(arrs[::-1]))
    key = np.stack(arrs, axis=1)[order]
    n = len(order)
    change = np.zeros(n, dtype=np.int64)
    if n > 1:
        change[1:] = np.any(key[1:] != key[:-1], axis=1)
    dense = np.cumsum(change)
    out = np.empty(n, dtype=np.int64)
    out[order] = dense
    return out


def _soa_scores(pop: _Pop, cfg: EngineConfig) -> np.ndarray:
    fitness = cfg.soa_a * pop.price + cfg.soa_b * pop.comp
    return _dense_rank(pop.feasible.astype(float), -pop.violation, fitness)


# ---------------------------------------------------------------------------
# initialization and the final-feasible archive


def _init_codes(inst: ProblemInstance, cfg: EngineConfig, rng: np.random.Generator) -> np.ndarray:
    n_change = math.ceil(cfg.init_change_fraction * len(inst.unlocked_ids))
    codes = np.empty((cfg.population_size, inst.total_floors), dtype=CODE_DTYPE)
    for r in range(cfg.population_size):
        for _ in range(_INIT_RETRY_CAP):
            row = inst.actual_codes.copy()
            if n_change:
                picks = rng.choice(inst.unlocked_ids, size=n_change, replace=False)
                for p in picks:
                    lo, hi = inst.floor_offsets[p], inst.floor_offsets[p + 1]
                    row[lo:hi] = rng.integers(0, inst.n_uses, size=hi - lo)
            price = float(evaluate_batch(inst, row[None, :]).price[0])
            if price_box_ok(inst, price):
                break
        codes[r] = row
    return codes


def initialize_population(
    inst: ProblemInstance, cfg: EngineConfig, rng: np.random.Generator
) -> list[Individual]:
    """Seed a population by perturbing the actual land-use map.

    Each individual re-randomizes the floors of ceil(init_change_fraction *
    N_unlocked) uniformly chosen unlocked plots; candidates outside the
    price box are redrawn up to a retry cap and then admitted infeasible.
    """
    cfg = _resolved(inst, cfg)
    pop = _Pop.evaluate(inst, _init_codes(inst, cfg, rng))
    gamma, mu = apply_relaxation_phase(1, cfg)
    _refresh_pop(inst, pop, gamma, mu)
    return _materialize(inst, pop)


class _FinalFeasibleArchive:
    """All-time non-dominated set of final-feasible solutions."""

    def __init__(self, inst: ProblemInstance, relax: RelaxationSchedule):
        self.inst = inst
        self.gamma_final = relax.gamma_final
        self.members: _Pop | None = None

    def offer(self, candidates: _Pop) -> None:
        inst = self.inst
        lo = (1.0 - self.gamma_final) * inst.actual_areas
        hi = (1.0 + self.gamma_final) * inst.actual_areas
        mask = (
            (candidates.areas >= lo).all(axis=1)
            & (candidates.areas <= hi).all(axis=1)
            & (candidates.price >= inst.price_min)
            & (candidates.price <= inst.price_max)
        )
        if not mask.any():
            return
        ok = candidates.take(np.flatnonzero(mask))
        merged = ok if self.members is None else self.members.concat(ok)
        pts = merged.objectives()
        order = np.lexsort((-pts[:, 1], -pts[:, 0]))
        ys = pts[order, 1]
        keep = np.ones(len(order), dtype=bool)
        if len(order) > 1:
            keep[1:] = ys[1:] > np.maximum.accumulate(ys)[:-1]
        self.members = merged.take(order[keep][::-1])

    def snapshot(self) -> np.ndarray:
        if self.members is None:
            return np.zeros((0, 2))
        return self.members.objectives()


def _hv_trace(inst: ProblemInstance, snapshots: list[np.ndarray]) -> list[float]:
    pts = [s for s in snapshots if s.size]
    universe = np.vstack(pts + [inst.actual_objectives.as_array()[None, :]])
    bounds = metrics.NormalizationBounds.from_points(universe)
    return [
        metrics.hypervolume_2d(metrics.normalize(s, bounds)) if s.size else 0.0
        for s in snapshots
    ]


# ---------------------------------------------------------------------------
# per-algorithm offspring generation (batched per generation)


def _nsga_pool(pop: _Pop, rng: np.random.Generator, size: int) -> np.ndarray:
    scores = _dense_rank(-pop.rank.astype(float), pop.crowd)
    return tournament_indices(scores, size, rng)


def _interleave(c1: np.ndarray, c2: np.ndarray, lam: int) -> np.ndarray:
    out = np.empty((2 * len(c1), c1.shape[1]), dtype=CODE_DTYPE)
    out[0::2] = c1
    out[1::2] = c2
    return out[:lam]


def _offspring_mutate_sbx(
    inst: ProblemInstance,
    cfg: EngineConfig,
    pop: _Pop,
    pool: np.ndarray,
    rng: np.random.Generator,
    replacement_mutation: str,
) -> np.ndarray:
    """Random mutation before SBX; sometimes mutation replaces crossover."""
    lam = cfg.population_size
    n_pairs = (lam + 1) // 2
    i = rng.integers(0, len(pool), size=n_pairs)
    j = rng.integers(0, len(pool), size=n_pairs)
    mutate_only = rng.random(n_pairs) < cfg.mutation_probability
    p1 = pop.codes[pool[i]]
    p2 = pop.codes[pool[j]]
    out1 = np.empty_like(p1)
    out2 = np.empty_like(p2)
    cross = np.flatnonzero(~mutate_only)
    if cross.size:
        m1 = random_mutation_batch(p1[cross], cfg.operator_cfg, inst, rng)
        m2 = random_mutation_batch(p2[cross], cfg.operator_cfg, inst, rng)
        c1, c2 = sbx_batch(m1, m2, cfg.operator_cfg, inst, rng)
        out1[cross] = c1
        out2[cross] = c2
    solo = np.flatnonzero(mutate_only)
    if solo.size:
        if replacement_mutation == "random":
            out1[solo] = random_mutation_batch(p1[solo], cfg.operator_cfg, inst, rng)
            out2[solo] = random_mutation_batch(p2[solo], cfg.operator_cfg, inst, rng)
        else:
            out1[solo] = polynomial_mutation_batch(p1[solo], cfg.operator_cfg, inst, rng)
            out2[solo] = polynomial_mutation_batch(p2[solo], cfg.operator_cfg, inst, rng)
    return _interleave(out1, out2, lam)


def _offspring_cr_des(
    inst: ProblemInstance,
    cfg: EngineConfig,
    pop: _Pop,
    pool: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Uniform crossover; a DE difference child replaces a pair sometimes."""
    lam = cfg.population_size
    de_flag = rng.random(lam) < cfg.de_child_probability
    ai = rng.integers(0, len(pool), size=lam)
    bi = rng.integers(0, len(pool), size=lam)
    counts = np.where(de_flag, 1, 2)
    ends = np.cumsum(counts)
    starts = ends - counts
    used = np.flatnonzero(starts < lam)
    out = np.empty((lam, inst.total_floors), dtype=CODE_DTYPE)
    de_units = used[de_flag[used]]
    cr_units = used[~de_flag[used]]
    if de_units.size:
        rows = scaled_difference_batch(
            pop.codes[pool[ai[de_units]]],
            pop.codes[pool[bi[de_units]]],
            cfg.operator_cfg.de_scale,
            inst,
        )
        out[starts[de_units]] = rows
    if cr_units.size:
        c1, c2 = uniform_batch(
            pop.codes[pool[ai[cr_units]]],
            pop.codes[pool[bi[cr_units]]],
            cfg.operator_cfg,
            inst,
            rng,
        )
        out[starts[cr_units]] = c1
        second = starts[cr_units] + 1
        fits = second < lam
        out[second[fits]] = c2[fits]
    return out


def _offspring_msbx_mo(
    inst: ProblemInstance,
    cfg: EngineConfig,
    pop: _Pop,
    rng: np.random.Generator,
) -> np.ndarray:
    """Each x is shifted by a scaled random donor and SBX-crossed with itself.

    The emitted child is the x-anchored one: unselected plots keep x and
    the participating plots are SBX-mixed toward the mutant, the DE
    trial-vector construction.
    """
    n = pop.n
    donors = rng.integers(0, n - 1, size=n)
    donors += donors >= np.arange(n)
    mutants = scaled_add_batch(pop.codes, pop.codes[donors], cfg.operator_cfg.de_scale, inst)
    _, children = sbx_batch(mutants, pop.codes, cfg.operator_cfg, inst, rng)
    return children


# ---------------------------------------------------------------------------
# the engine loops


def _evolve(
    inst: ProblemInstance,
    cfg: EngineConfig,
    rng: np.random.Generator | None,
    variation: Callable[[_Pop, np.random.Generator], np.ndarray],
    soa: bool,
) -> RunRecord:
    cfg = _resolved(inst, cfg)
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    t0 = time.perf_counter()
    pop = _Pop.evaluate(inst, _init_codes(inst, cfg, rng))
    gamma, mu = apply_relaxation_phase(1, cfg)
    _refresh_pop(inst, pop, gamma, mu)
    if not soa:
        _pop_crowding(pop, _pop_fronts(pop))
    archive = _FinalFeasibleArchive(inst, cfg.relax)
    archive.offer(pop)
    snapshots: list[np.ndarray] = []
    for gen in range(1, cfg.generations + 1):
        gamma, mu = apply_relaxation_phase(gen, cfg)
        # Selection reuses the rank/crowding assigned by the previous
        # survival step, as in canonical NSGA-II.
        offspring = _Pop.evaluate(inst, variation(pop, rng))
        merged = pop.concat(offspring)
        if gen == cfg.generations and archive.members is not None:
            merged = merged.concat(archive.members)
        _refresh_pop(inst, merged, gamma, mu)
        if soa:
            order = np.argsort(-_soa_scores(merged, cfg), kind="stable")
            pop = merged.take(order[: cfg.population_size])
            pop.rank = np.arange(pop.n)
            pop.crowd = np.zeros(pop.n)
        else:
            pop = _pop_survival(merged, _pop_fronts(merged), cfg.population_size)
        archive.offer(offspring)
        snapshots.append(archive.snapshot())
    front_indices = _final_front_indices(inst, cfg, pop, soa)
    return RunRecord(
        algorithm=cfg.algorithm,
        config=config_snapshot(cfg),
        seed=cfg.seed,
        hv_trace=_hv_trace(inst, snapshots),
        population=_materialize(inst, pop),
        front_indices=front_indices,
        wall_time_s=time.perf_counter() - t0,
    )


def _final_front_indices(
    inst: ProblemInstance, cfg: EngineConfig, pop: _Pop, soa: bool
) -> list[int]:
    """Feasible-filtered front: original gamma band and price box only."""
    lo = (1.0 - cfg.relax.gamma_final) * inst.actual_areas
    hi = (1.0 + cfg.relax.gamma_final) * inst.actual_areas
    mask = (
        (pop.areas >= lo).all(axis=1)
        & (pop.areas <= hi).all(axis=1)
        & (pop.price >= inst.price_min)
        & (pop.price <= inst.price_max)
    )
    ok = np.flatnonzero(mask)
    if not ok.size:
        return []
    if soa:
        fitness = cfg.soa_a * pop.price[ok] + cfg.soa_b * pop.comp[ok]
        return [int(ok[int(np.argmax(fitness))])]
    objs = pop.objectives()[ok]
    return sorted(int(ok[k]) for k in fast_non_dominated_sort(objs)[0])


def config_snapshot(cfg: EngineConfig) -> dict:
    """Plain-dict snapshot of a resolved engine config."""
    return asdict(cfg)


def run_soa(
    inst: ProblemInstance, cfg: EngineConfig, rng: np.random.Generator | None = None
) -> RunRecord:
    """Single-objective GA on the weighted raw objectives."""
    if cfg.algorithm != "SOA":
        raise ValueError("run_soa requires algorithm='SOA'")
    if abs(cfg.soa_a + cfg.soa_b - 1.0) > 1e-9:
        raise ValueError("soa_a + soa_b must equal 1")

    def variation(pop: _Pop, rng):
        pool = tournament_indices(_soa_scores(pop, cfg), cfg.population_size // 2, rng)
        return _offspring_mutate_sbx(inst, cfg, pop, pool, rng, "random")

    return _evolve(inst, cfg, rng, variation, soa=True)


def run_msbx_nsga2(
    inst: ProblemInstance, cfg: EngineConfig, rng: np.random.Generator | None = None
) -> RunRecord:
    """NSGA-II with random mutation before SBX, polynomial as the solo branch."""
    if cfg.algorithm != "MSBX_NSGA2":
        raise ValueError("run_msbx_nsga2 requires algorithm='MSBX_NSGA2'")

    def variation(pop: _Pop, rng):
        pool = _nsga_pool(pop, rng, cfg.population_size // 2)
        return _offspring_mutate_sbx(inst, cfg, pop, pool, rng, "polynomial")

    return _evolve(inst, cfg, rng, variation, soa=False)


def run_cr_des(
    inst: ProblemInstance, cfg: EngineConfig, rng: np.random.Generator | None = None
) -> RunRecord:
    """NSGA-II skeleton; uniform crossover plus DE difference children."""
    if cfg.algorithm != "CR_DES":
        raise ValueError("run_cr_des requires algorithm='CR_DES'")

    def variation(pop: _Pop, rng):
        pool = _nsga_pool(pop, rng, cfg.population_size // 2)
        return _offspring_cr_des(inst, cfg, pop, pool, rng)

    return _evolve(inst, cfg, rng, variation, soa=False)


def run_msbx_mo(
    inst: ProblemInstance, cfg: EngineConfig, rng: np.random.Generator | None = None
) -> RunRecord:
    """Scaled-donor mutants crossed with their parents, Pareto-rank survival."""
    if cfg.algorithm != "MSBX_MO":
        raise ValueError("run_msbx_mo requires algorithm='MSBX_MO'")

    def variation(pop: _Pop, rng):
        return _offspring_msbx_mo(inst, cfg, pop, rng)

    return _evolve(inst, cfg, rng, variation, soa=False)


_RUNNERS = {
    "SOA": run_soa,
    "MSBX_NSGA2": run_msbx_nsga2,
    "CR_DES": run_cr_des,
    "MSBX_MO": run_msbx_mo,
}


def run_engine(
    inst: ProblemInstance, cfg: EngineConfig, rng: np.random.Generator | None = None
) -> RunRecord:
    """Dispatch to the configured algorithm."""
    return _RUNNERS[cfg.algorithm](inst, cfg, rng)
