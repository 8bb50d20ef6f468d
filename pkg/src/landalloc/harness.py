"""Experiment harness: configs, batch execution, and RunRecord persistence.

A bundle directory is self-contained and regenerable:

    bundle/
      manifest.json               run plan, statuses, instance hash
      instance.landalloc.json     copy of the instance the runs used
      runs/<label>__s<seed>.json  one canonical RunRecord per (engine, seed)
      combined/<label>.json       non-dominated union of the label's fronts
      timings.json                wall times (informational, not canonical)
      report/...                  written by the report step

RunRecord files are canonical JSON (sorted keys, no timestamps), so
rerunning the same config produces byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .engines import EngineConfig, Individual, RelaxationSchedule, RunRecord, run_engine
from .instance_io import (
    InstanceError,
    canonical_dumps,
    load_instance,
)
from .model import CODE_DTYPE, Allocation, ObjectiveVector, ProblemInstance, evaluate_batch
from .operators import OperatorConfig

RECORD_SCHEMA = 1
MANIFEST_SCHEMA = 1

DEFAULT_SEEDS = (1, 2, 3, 4, 5)
DEFAULT_STATS_METRICS = ("best_price", "best_compatibility", "hv", "igd_plus")


class ExperimentConfigError(ValueError):
    """Bad experiment configuration document."""


@dataclass
class ExperimentConfig:
    """Parsed experiment plan; engine entries stay raw until an instance is known."""

    instance_path: Path
    engine_entries: list[dict]
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    output_dir: Path = Path("results")
    alpha: float = 0.05
    stats_metrics: tuple[str, ...] = DEFAULT_STATS_METRICS
    reference_set: str = "combined"
    workers: int = 1

    def __post_init__(self):
        labels = [e.get("label") for e in self.engine_entries]
        if not labels:
            raise ExperimentConfigError("config needs at least one engine entry")
        if any(not isinstance(l, str) or not l for l in labels):
            raise ExperimentConfigError("every engine entry needs a non-empty label")
        if len(set(labels)) != len(labels):
            raise ExperimentConfigError("engine labels must be unique")
        if len(set(self.seeds)) != len(self.seeds) or not self.seeds:
            raise ExperimentConfigError("seeds must be non-empty and distinct")
        if not 0.0 < self.alpha < 1.0:
            raise ExperimentConfigError("alpha must be in (0, 1)")
        if self.reference_set != "combined":
            raise ExperimentConfigError(
                "reference_set: only the 'combined' policy (non-dominated union "
                "of all compared fronts) is supported"
            )
        if self.workers < 1:
            raise ExperimentConfigError("workers must be >= 1")

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Path | None = None) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ExperimentConfigError("config root must be an object")
        if "instance" not in doc:
            raise ExperimentConfigError("config is missing 'instance'")
        if "engines" not in doc or not isinstance(doc["engines"], list):
            raise ExperimentConfigError("config is missing an 'engines' list")
        base = base_dir or Path(".")
        return cls(
            instance_path=(base / doc["instance"]).resolve(),
            engine_entries=list(doc["engines"]),
            seeds=tuple(doc.get("seeds", DEFAULT_SEEDS)),
            output_dir=(base / doc.get("output", "results")).resolve(),
            alpha=float(doc.get("alpha", 0.05)),
            stats_metrics=tuple(doc.get("stats_metrics", DEFAULT_STATS_METRICS)),
            reference_set=str(doc.get("reference_set", "combined")),
            workers=int(doc.get("workers", 1)),
        )

    @property
    def labels(self) -> list[str]:
        return [e["label"] for e in self.engine_entries]


def build_engine_config(entry: dict, inst: ProblemInstance) -> tuple[str, EngineConfig]:
    """Turn one raw engine entry into a label plus a resolved EngineConfig."""
    entry = dict(entry)
    label = entry.pop("label")
    algorithm = entry.pop("algorithm", None)
    if algorithm is None:
        raise ExperimentConfigError(f"engine {label!r}: missing 'algorithm'")
    gamma_final = float(entry.pop("gamma_final", inst.gamma))
    mu_final = float(entry.pop("mu_final", inst.mu))
    relax = RelaxationSchedule(
        gamma_search=float(entry.pop("gamma_search", gamma_final)),
        mu_search=float(entry.pop("mu_search", mu_final)),
        gamma_final=gamma_final,
        mu_final=mu_final,
    )
    op = entry.pop("operators", {})
    if not isinstance(op, dict):
        raise ExperimentConfigError(f"engine {label!r}: 'operators' must be an object")
    try:
        operator_cfg = OperatorConfig(**op)
        cfg = EngineConfig(
            algorithm=algorithm, relax=relax, operator_cfg=operator_cfg, **entry
        )
    except (TypeError, ValueError) as exc:
        raise ExperimentConfigError(f"engine {label!r}: {exc}")
    return label, cfg


def slug(index: int, label: str) -> str:
    return f"{index:02d}_" + re.sub(r"[^A-Za-z0-9_-]+", "-", label)


# ---------------------------------------------------------------------------
# RunRecord (de)serialization


def record_to_dict(label: str, rec: RunRecord) -> dict:
    return {
        "schema": RECORD_SCHEMA,
        "label": label,
        "algorithm": rec.algorithm,
        "seed": rec.seed,
        "config": rec.config,
        "hv_trace": [float(v) for v in rec.hv_trace],
        "front": [int(i) for i in rec.front_indices],
        "population": [
            {
                "floor_uses": [int(c) for c in ind.allocation.codes],
                "compatibility": ind.objectives.compatibility,
                "price": ind.objectives.price,
                "changed": ind.changed_count,
                "rank": ind.rank,
                "crowding": float(ind.crowding),
                "feasible": ind.feasible,
                "violation": float(ind.violation),
            }
            for ind in rec.population
        ],
    }


def record_to_json(label: str, rec: RunRecord) -> str:
    return canonical_dumps(record_to_dict(label, rec), compact=True)


def record_from_dict(doc: dict, inst: ProblemInstance) -> tuple[str, RunRecord]:
    """Rebuild a RunRecord; per-use areas are recomputed from the codes."""
    pop_docs = doc["population"]
    individuals: list[Individual] = []
    if pop_docs:
        codes = np.array([d["floor_uses"] for d in pop_docs], dtype=CODE_DTYPE)
        stats = evaluate_batch(inst, codes)
        for r, d in enumerate(pop_docs):
            individuals.append(
                Individual(
                    allocation=Allocation(codes[r].copy(), inst.floor_offsets, inst.n_uses),
                    objectives=ObjectiveVector(float(d["compatibility"]), float(d["price"])),
                    areas=stats.areas[r].copy(),
                    changed_count=int(d["changed"]),
                    rank=int(d["rank"]),
                    crowding=float(d["crowding"]),
                    feasible=bool(d["feasible"]),
                    violation=float(d["violation"]),
                )
            )
    rec = RunRecord(
        algorithm=doc["algorithm"],
        config=doc["config"],
        seed=int(doc["seed"]),
        hv_trace=[float(v) for v in doc["hv_trace"]],
        population=individuals,
        front_indices=[int(i) for i in doc["front"]],
        wall_time_s=float("nan"),
    )
    return doc["label"], rec


# ---------------------------------------------------------------------------
# combined fronts


def combined_front_entries(records: list[RunRecord]) -> list[dict]:
    """Non-dominated union of the records' fronts, with allocations attached."""
    entries = []
    for rec in records:
        for ind in rec.front():
            entries.append(
                {
                    "compatibility": ind.objectives.compatibility,
                    "price": ind.objectives.price,
                    "seed": rec.seed,
                    "floor_uses": [int(c) for c in ind.allocation.codes],
                }
            )
    if not entries:
        return []
    pts = np.array([[e["compatibility"], e["price"]] for e in entries])
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))
    ys = pts[order, 1]
    keep = np.ones(len(order), dtype=bool)
    if len(order) > 1:
        keep[1:] = ys[1:] > np.maximum.accumulate(ys)[:-1]
    kept = sorted(order[keep].tolist())
    return [entries[i] for i in kept]


# ---------------------------------------------------------------------------
# bundle execution


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _execute_run(instance_path: str, label: str, cfg: EngineConfig) -> tuple[str, int, str, float]:
    """Worker entry: returns (label, seed, record json, wall time)."""
    inst = load_instance(instance_path)
    rec = run_engine(inst, cfg)
    return label, cfg.seed, record_to_json(label, rec), rec.wall_time_s


@dataclass
class BundleResult:
    bundle_dir: Path
    ok_runs: int
    failed_runs: int
    failures: list[str]


def run_experiment(cfg: ExperimentConfig) -> BundleResult:
    """Execute every (engine, seed) pair and persist the bundle."""
    inst = load_instance(cfg.instance_path)
    engines = [build_engine_config(e, inst) for e in cfg.engine_entries]
    bundle = cfg.output_dir
    (bundle / "runs").mkdir(parents=True, exist_ok=True)
    (bundle / "combined").mkdir(exist_ok=True)
    local_instance = bundle / "instance.landalloc.json"
    local_instance.write_bytes(Path(cfg.instance_path).read_bytes())

    jobs = []
    for idx, (label, ecfg) in enumerate(engines):
        for seed in cfg.seeds:
            jobs.append((idx, label, replace(ecfg, seed=int(seed))))

    outcomes: dict[tuple[str, int], tuple[str | None, str | None, float]] = {}
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = {
                pool.submit(_execute_run, str(local_instance), label, ecfg): (label, ecfg.seed)
                for _, label, ecfg in jobs
            }
            for fut, (label, seed) in futures.items():
                try:
                    _, _, text, wall = fut.result()
                    outcomes[(label, seed)] = (text, None, wall)
                except Exception as exc:  # run isolation: one failure, one gap
                    outcomes[(label, seed)] = (None, f"{type(exc).__name__}: {exc}", 0.0)
    else:
        for _, label, ecfg in jobs:
            try:
                _, _, text, wall = _execute_run(str(local_instance), label, ecfg)
                outcomes[(label, ecfg.seed)] = (text, None, wall)
            except Exception as exc:
                outcomes[(label, ecfg.seed)] = (None, f"{type(exc).__name__}: {exc}", 0.0)

    run_entries = []
    timings = {}
    failures = []
    ok = 0
    label_records: dict[str, list[RunRecord]] = {label: [] for label, _ in engines}
    for idx, (label, ecfg) in enumerate(engines):
        for seed in cfg.seeds:
            text, error, wall = outcomes[(label, int(seed))]
            fname = f"runs/{slug(idx, label)}__s{seed}.json"
            entry = {"label": label, "seed": int(seed), "file": fname, "status": "ok"}
            if error is None:
                (bundle / fname).write_text(text, encoding="utf-8")
                timings[fname] = wall
                _, rec = record_from_dict(json.loads(text), inst)
                label_records[label].append(rec)
                ok += 1
            else:
                entry["status"] = "failed"
                entry["error"] = error
                failures.append(f"{label} seed {seed}: {error}")
            run_entries.append(entry)

    for idx, (label, ecfg) in enumerate(engines):
        front = combined_front_entries(label_records[label])
        (bundle / "combined" / f"{slug(idx, label)}.json").write_text(
            canonical_dumps({"label": label, "points": front}, compact=True),
            encoding="utf-8",
        )

    manifest = {
        "schema": MANIFEST_SCHEMA,
        "instance": "instance.landalloc.json",
        "instance_sha256": _sha256(local_instance),
        "seeds": [int(s) for s in cfg.seeds],
        "alpha": cfg.alpha,
        "stats_metrics": list(cfg.stats_metrics),
        "reference_set": cfg.reference_set,
        "engines": [
            {"label": label, "slug": slug(idx, label), "config": _config_dict(ecfg)}
            for idx, (label, ecfg) in enumerate(engines)
        ],
        "runs": run_entries,
    }
    (bundle / "manifest.json").write_text(canonical_dumps(manifest), encoding="utf-8")
    (bundle / "timings.json").write_text(
        canonical_dumps({"wall_time_s": timings}), encoding="utf-8"
    )
    return BundleResult(bundle, ok, len(failures), failures)


def _config_dict(cfg: EngineConfig) -> dict:
    out = asdict(cfg)
    out.pop("seed", None)  # seeds vary per run; the manifest lists them once
    return out


# ---------------------------------------------------------------------------
# bundle loading / verification


@dataclass
class LoadedBundle:
    bundle_dir: Path
    manifest: dict
    instance: ProblemInstance
    records: dict[str, list[RunRecord]]  # label -> records in seed order
    gaps: list[str]


def load_bundle(bundle_dir: str | Path) -> LoadedBundle:
    bundle = Path(bundle_dir)
    manifest_path = bundle / "manifest.json"
    if not manifest_path.exists():
        raise InstanceError(f"no manifest.json in {bundle}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    inst = load_instance(bundle / manifest["instance"])
    records: dict[str, list[RunRecord]] = {e["label"]: [] for e in manifest["engines"]}
    gaps = []
    for entry in manifest["runs"]:
        if entry["status"] != "ok":
            gaps.append(f"{entry['label']} seed {entry['seed']}: {entry.get('error', 'failed')}")
            continue
        path = bundle / entry["file"]
        if not path.exists():
            gaps.append(f"{entry['label']} seed {entry['seed']}: file missing")
            continue
        label, rec = record_from_dict(json.loads(path.read_text(encoding="utf-8")), inst)
        records[label].append(rec)
    return LoadedBundle(bundle, manifest, inst, records, gaps)


def verify_bundle(bundle_dir: str | Path) -> tuple[list[str], bool]:
    """Check bundle completeness and invariants.

    Returns (issues, incomplete): `incomplete` marks missing or failed
    runs; other issues are integrity problems.
    """
    bundle = Path(bundle_dir)
    issues: list[str] = []
    incomplete = False
    manifest_path = bundle / "manifest.json"
    if not manifest_path.exists():
        return ([f"{bundle}: manifest.json missing"], True)
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        return ([f"manifest.json unreadable: {exc}"], False)
    inst_path = bundle / manifest.get("instance", "instance.landalloc.json")
    if not inst_path.exists():
        return ([f"instance file missing: {inst_path.name}"], True)
    if _sha256(inst_path) != manifest.get("instance_sha256"):
        issues.append("instance file hash does not match the manifest")
    try:
        inst = load_instance(inst_path)
    except InstanceError as exc:
        return (issues + [f"instance invalid: {exc}"], False)
    gens_by_label = {
        e["label"]: e["config"]["generations"] for e in manifest.get("engines", [])
    }
    for entry in manifest.get("runs", []):
        tag = f"{entry['label']} seed {entry['seed']}"
        if entry["status"] != "ok":
            issues.append(f"{tag}: marked failed ({entry.get('error', '?')})")
            incomplete = True
            continue
        path = bundle / entry["file"]
        if not path.exists():
            issues.append(f"{tag}: run file missing")
            incomplete = True
            continue
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            label, rec = record_from_dict(doc, inst)
        except Exception as exc:
            issues.append(f"{tag}: unreadable run file ({exc})")
            continue
        expected_gens = gens_by_label.get(entry["label"])
        if expected_gens is not None and len(rec.hv_trace) != expected_gens:
            issues.append(f"{tag}: hv trace length {len(rec.hv_trace)} != generations {expected_gens}")
        if any(not 0 <= i < len(rec.population) for i in rec.front_indices):
            issues.append(f"{tag}: front indices out of range")
            continue
        front = rec.front()
        pts = np.array([[f.objectives.compatibility, f.objectives.price] for f in front])
        for a in range(len(front)):
            dominated = np.all(pts >= pts[a], axis=1) & np.any(pts > pts[a], axis=1)
            if dominated.any():
                issues.append(f"{tag}: reported front contains dominated points")
                break
    return issues, incomplete
