"""Configure, run, and record complete walker simulations.

A run is fully determined by (config, seed). Every random stream is derived
from the run seed with a distinct domain tag, and each walker draws from its
own sub-stream seeded by `seed XOR walker_id`, so walkers that never
interact are bit-identical to the same walkers run alone. Outputs carry no
wall-clock or machine state: identical inputs give identical bytes.

Per swarm jump the phases are fixed: attraction bookkeeping, movement
(ascending walker id), local training, memory merge, collisions
(co-location, then rendezvous, then uplink), perception refresh, evaluation.
"""
from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import datahub, policy, swarm, topology, walker
from .errors import ConfigError
from .learner import TrainConfig, evaluate, init_model
from .policy import (
    IMPORTANCE_DYNAMIC,
    IMPORTANCE_STATIC,
    MH,
    UNIFORM,
    ElasticParams,
    ImportanceParams,
    TransitionPolicy,
)

logger = logging.getLogger(__name__)

_WALKER_TAG = 0x40
_INTERACTION_TAG = 0x41


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class GraphSpec:
    kind: str = "caveman"  # caveman | rgg
    nodes: int = 50
    cliques: int = 8
    radius: float | None = None  # rgg only; None picks the mean-degree-6 radius
    max_retries: int = 100


@dataclass(frozen=True)
class DataSpec:
    classes: int = 10
    dims: int = 32
    per_class: int = 500
    val_frac: float = 0.2
    sep: float = 3.0


@dataclass(frozen=True)
class PartitionSpec:
    kind: str = "label_skew"  # label_skew | clique_dominant
    skew_frac: float = 0.98
    labels_lo: int = 1
    labels_hi: int = 2
    dominance: float = 1.0


@dataclass(frozen=True)
class LearnerSpec:
    arch: str = "softmax"
    hidden: int = 64
    learning_rate: float = 0.05
    batch_size: int = 32
    l2: float = 0.0


@dataclass(frozen=True)
class PolicySpec:
    kind: str = UNIFORM
    alpha: float = 0.5
    alpha_min: float = 0.10
    alpha_max: float = 0.85
    acc_min: float = 0.1
    acc_max: float = 0.8
    normalize_terms: bool = True


@dataclass(frozen=True)
class ElasticSpec:
    enabled: bool = False
    x_max: int = 20
    tau1: float = 10.0
    tau2: float = 0.4


@dataclass(frozen=True)
class MemorySpec:
    enabled: bool = False
    schedule: tuple[tuple[int, float], ...] = ()


@dataclass(frozen=True)
class AttractionSpec:
    enabled: bool = False
    strength: float = 0.1
    base_coeff: float = 0.05
    cooldown_max: int = 5


@dataclass(frozen=True)
class RendezvousSpec:
    enabled: bool = False
    every: int = 10
    node: int = 0


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "run"
    series: str = ""  # label used to group runs in summaries; defaults to name
    graph: GraphSpec = field(default_factory=GraphSpec)
    data: DataSpec = field(default_factory=DataSpec)
    partition: PartitionSpec = field(default_factory=PartitionSpec)
    learner: LearnerSpec = field(default_factory=LearnerSpec)
    policy: PolicySpec = field(default_factory=PolicySpec)
    elastic: ElasticSpec = field(default_factory=ElasticSpec)
    iters_per_visit: int = 5
    walkers: int = 1
    start: str = "random"  # random | per_clique
    memory: MemorySpec = field(default_factory=MemorySpec)
    attraction: AttractionSpec = field(default_factory=AttractionSpec)
    rendezvous: RendezvousSpec = field(default_factory=RendezvousSpec)
    confine_cliques: bool = False
    uplink: bool = False
    jumps: int = 400
    eval_every: int = 1
    seeds: tuple[int, ...] = (0,)

    @property
    def series_label(self) -> str:
        return self.series or self.name

    def validate(self) -> None:
        if self.jumps < 1:
            raise ConfigError("jump budget must be at least 1")
        if self.walkers < 1:
            raise ConfigError("need at least one walker")
        if self.eval_every < 1:
            raise ConfigError("eval_every must be at least 1")
        if self.iters_per_visit < 1:
            raise ConfigError("iters_per_visit must be at least 1")
        if self.graph.kind not in ("caveman", "rgg"):
            raise ConfigError(f"unknown graph kind {self.graph.kind!r}")
        if self.partition.kind not in ("label_skew", "clique_dominant"):
            raise ConfigError(f"unknown partition kind {self.partition.kind!r}")
        if self.policy.kind not in (UNIFORM, MH, IMPORTANCE_STATIC, IMPORTANCE_DYNAMIC):
            raise ConfigError(f"unknown policy kind {self.policy.kind!r}")
        needs_cliques = (
            self.partition.kind == "clique_dominant"
            or self.confine_cliques
            or self.start == "per_clique"
        )
        if needs_cliques and self.graph.kind != "caveman":
            raise ConfigError("clique-based options require a caveman graph")
        if self.start not in ("random", "per_clique"):
            raise ConfigError(f"unknown start mode {self.start!r}")

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["memory"]["schedule"] = [list(stage) for stage in self.memory.schedule]
        doc["seeds"] = list(self.seeds)
        return doc


def config_from_dict(doc: dict) -> ExperimentConfig:
    def sub(cls, key):
        payload = dict(doc.get(key, {}))
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(payload) - known
        if unknown:
            raise ConfigError(f"unknown {key} option(s): {sorted(unknown)}")
        return cls(**payload)

    mem = dict(doc.get("memory", {}))
    mem["schedule"] = tuple(tuple(stage) for stage in mem.get("schedule", ()))
    top_known = {f for f in ExperimentConfig.__dataclass_fields__}
    unknown = set(doc) - top_known
    if unknown:
        raise ConfigError(f"unknown config option(s): {sorted(unknown)}")
    cfg = ExperimentConfig(
        name=doc.get("name", "run"),
        series=doc.get("series", ""),
        graph=sub(GraphSpec, "graph"),
        data=sub(DataSpec, "data"),
        partition=sub(PartitionSpec, "partition"),
        learner=sub(LearnerSpec, "learner"),
        policy=sub(PolicySpec, "policy"),
        elastic=sub(ElasticSpec, "elastic"),
        iters_per_visit=doc.get("iters_per_visit", 5),
        walkers=doc.get("walkers", 1),
        start=doc.get("start", "random"),
        memory=MemorySpec(**mem),
        attraction=sub(AttractionSpec, "attraction"),
        rendezvous=sub(RendezvousSpec, "rendezvous"),
        confine_cliques=doc.get("confine_cliques", False),
        uplink=doc.get("uplink", False),
        jumps=doc.get("jumps", 400),
        eval_every=doc.get("eval_every", 1),
        seeds=tuple(doc.get("seeds", (0,))),
    )
    cfg.validate()
    return cfg


def set_config_axis(cfg: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    """Return a copy with one (possibly dotted) config field replaced."""
    doc = cfg.to_dict()
    node = doc
    parts = axis.split(".")
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"unknown config axis {axis!r}")
        node = node[part]
    leaf = parts[-1]
    if not isinstance(node, dict) or leaf not in node:
        raise ConfigError(f"unknown config axis {axis!r}")
    node[leaf] = value
    return config_from_dict(doc)


# ---------------------------------------------------------------------------
# Environment and run records


@dataclass
class Environment:
    graph: topology.Graph
    centrality: topology.Centrality
    dataset: datahub.Dataset
    partition: datahub.Partition
    node_features: list[np.ndarray]
    node_labels: list[np.ndarray]
    val_features: np.ndarray
    val_labels: np.ndarray


def build_environment(cfg: ExperimentConfig, seed: int) -> Environment:
    cfg.validate()
    gspec = cfg.graph
    if gspec.kind == "caveman":
        g = topology.gen_connected_caveman(gspec.cliques, gspec.nodes, seed)
    else:
        radius = gspec.radius or topology.default_rgg_radius(gspec.nodes)
        g = topology.gen_rgg(gspec.nodes, radius, seed, gspec.max_retries)
    ds = datahub.gen_synthetic(
        cfg.data.classes, cfg.data.dims, cfg.data.per_class, cfg.data.val_frac, cfg.data.sep, seed
    )
    pspec = cfg.partition
    if pspec.kind == "label_skew":
        part = datahub.partition_label_skew(
            ds, g, pspec.skew_frac, pspec.labels_lo, pspec.labels_hi, seed
        )
    else:
        part = datahub.partition_clique_dominant(ds, g, pspec.dominance, seed)
    node_features = []
    node_labels = []
    for node in range(g.node_count):
        x, y = datahub.node_view(ds, part, node)
        node_features.append(x)
        node_labels.append(y)
    return Environment(
        graph=g,
        centrality=topology.betweenness(g),
        dataset=ds,
        partition=part,
        node_features=node_features,
        node_labels=node_labels,
        val_features=ds.features[ds.val_indices],
        val_labels=ds.labels[ds.val_indices],
    )


@dataclass
class MetricsRecord:
    series: str
    seed: int
    walker_ids: list[int]
    rows: list[tuple]  # (t, walker_id, loss, accuracy, cum_iters)
    collision_count: int
    collision_intervals: list[int]
    final_accuracy: float


@dataclass
class RunResult:
    run_id: str
    series: str
    seed: int
    events: list[dict]
    metrics: MetricsRecord


def walker_rng(seed: int, walker_id: int) -> np.random.Generator:
    """Per-walker stream: domain-tagged SeedSequence over seed XOR walker id."""
    return np.random.default_rng(np.random.SeedSequence([_WALKER_TAG, seed ^ walker_id]))


def interaction_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([_INTERACTION_TAG, seed]))


class _WalkerDriver:
    """Per-walker mutable context the loop keeps next to the swarm state."""

    def __init__(self, wid: int, rng: np.random.Generator):
        self.wid = wid
        self.rng = rng
        self.home_clique: int | None = None
        self.cum_iters = 0
        self.alpha: float | None = None


def _initial_walkers(env: Environment, cfg: ExperimentConfig, seed: int, walker_ids) -> tuple[list[walker.WalkerState], list[_WalkerDriver]]:
    g = env.graph
    states = []
    drivers = []
    for wid in walker_ids:
        rng = walker_rng(seed, wid)
        model_seed = int(rng.integers(2 ** 31))
        im = init_model(cfg.learner.arch, cfg.data.dims, cfg.data.classes, model_seed, cfg.learner.hidden)
        if cfg.start == "per_clique":
            members = g.clique_members(wid % g.n_cliques)
            pos = members[int(rng.integers(len(members)))]
        else:
            pos = int(rng.integers(g.node_count))
        drv = _WalkerDriver(wid, rng)
        if cfg.confine_cliques:
            drv.home_clique = g.clique_of[pos]
        states.append(walker.WalkerState(id=wid, position=pos, im=im, sm=im))
        drivers.append(drv)
    return states, drivers


def _base_policy(env: Environment, cfg: ExperimentConfig) -> TransitionPolicy:
    kind = cfg.policy.kind
    if kind == UNIFORM:
        return policy.uniform_transition(env.graph)
    if kind == MH:
        return policy.mh_transition(env.graph)
    imp = policy.importance_vector(
        env.partition.data_frac,
        env.partition.label_frac,
        np.array(env.centrality.normalized),
        cfg.policy.alpha,
        cfg.policy.normalize_terms,
    )
    return policy.build_transition(env.graph, imp, kind=IMPORTANCE_STATIC)


def _importance_params(cfg: ExperimentConfig) -> ImportanceParams:
    p = cfg.policy
    return ImportanceParams(
        alpha=p.alpha,
        alpha_min=p.alpha_min,
        alpha_max=p.alpha_max,
        acc_min=p.acc_min,
        acc_max=p.acc_max,
        normalize_terms=p.normalize_terms,
    )


def simulate(env: Environment, cfg: ExperimentConfig, seed: int, walker_ids: list[int] | None = None) -> RunResult:
    """Execute one full run over a prebuilt environment.

    walker_ids defaults to range(cfg.walkers); passing an explicit subset
    reruns just those walkers on their own sub-streams, which is what makes
    non-interacting multi-walker runs decomposable walker by walker.
    """
    cfg.validate()
    g = env.graph
    ids = list(range(cfg.walkers)) if walker_ids is None else list(walker_ids)
    run_id = f"{cfg.series_label}:{seed}"
    train_cfg = TrainConfig(cfg.learner.learning_rate, cfg.learner.batch_size, cfg.learner.l2)
    imp_params = _importance_params(cfg)
    elastic_params = ElasticParams(cfg.elastic.x_max, cfg.elastic.tau1, cfg.elastic.tau2)
    mem_cfg = walker.MemoryConfig(enabled=cfg.memory.enabled, schedule=cfg.memory.schedule)
    attraction_cfg = swarm.AttractionConfig(
        strength=cfg.attraction.strength,
        base_coeff=cfg.attraction.base_coeff,
        cooldown_max=cfg.attraction.cooldown_max,
    ) if cfg.attraction.enabled else None
    interactions_on = attraction_cfg is not None and attraction_cfg.enabled and len(ids) > 1

    states, drivers = _initial_walkers(env, cfg, seed, ids)
    s = swarm.new_swarm(states)
    rng_interaction = interaction_rng(seed)
    centrality_vec = np.array(env.centrality.normalized)

    dynamic = cfg.policy.kind == IMPORTANCE_DYNAMIC

    def confine(pol: TransitionPolicy, drv: _WalkerDriver) -> TransitionPolicy:
        if not cfg.confine_cliques:
            return pol
        return swarm.clique_confined_policy(g, pol, drv.home_clique)

    if dynamic:
        policies = []
        for idx, drv in enumerate(drivers):
            s.walkers[idx], pol = walker.perception_refresh(
                s.walkers[idx], env.val_features, env.val_labels, imp_params,
                env.partition.data_frac, env.partition.label_frac,
                centrality_vec, g,
            )
            drv.alpha = policy.accuracy_scaled_alpha(s.walkers[idx].cached_accuracy, imp_params)
            policies.append(confine(pol, drv))
    else:
        shared = _base_policy(env, cfg)
        policies = [confine(shared, drv) for drv in drivers]

    events: list[dict] = []
    rows: list[tuple] = []
    collision_count = 0
    collision_intervals: list[int] = []

    def record_eval(t: int) -> None:
        for idx, drv in enumerate(drivers):
            loss, acc = evaluate(s.walkers[idx].im, env.val_features, env.val_labels)
            rows.append((t, drv.wid, loss, acc, drv.cum_iters))

    record_eval(0)

    for t in range(1, cfg.jumps + 1):
        # 1. attraction clocks and pursuit triggers
        if interactions_on:
            s, trig = swarm.tick_attraction(s, attraction_cfg, rng_interaction)
            for ev in trig:
                ev.update({"run_id": run_id, "t": t, "walkers": [ids[i] for i in ev["walkers"]]})
                events.append(ev)

        # 2. movement, ascending walker id
        for idx, drv in enumerate(drivers):
            w = s.walkers[idx]
            target = swarm.steer_target(s, idx)
            if target is not None and target != w.position:
                nxt = topology.next_hop_toward(g, w.position, target)
                s.walkers[idx] = replace(w, position=nxt, jumps=w.jumps + 1)
            elif target is not None:
                s.walkers[idx] = replace(w, jumps=w.jumps + 1)
            else:
                s.walkers[idx] = walker.step(w, policies[idx], drv.rng)
            if drv.home_clique is not None and s.homing[idx] is not None:
                if g.clique_of[s.walkers[idx].position] == drv.home_clique:
                    s.homing[idx] = None

        # 3. local training
        tick_visits: list[dict] = []
        for idx, drv in enumerate(drivers):
            w = s.walkers[idx]
            node = w.position
            x, y = env.node_features[node], env.node_labels[node]
            if cfg.elastic.enabled:
                quality = policy.data_quality(
                    float(env.partition.data_frac[node]),
                    float(env.partition.label_frac[node]),
                    elastic_params.tau2,
                )
                iters = policy.elastic_iterations(quality, elastic_params)
            else:
                iters = cfg.iters_per_visit
            if x.shape[0] == 0:
                iters = 0
            else:
                s.walkers[idx] = walker.visit(w, x, y, iters, train_cfg, drv.rng)
            drv.cum_iters += iters
            ev = {"run_id": run_id, "t": t, "kind": "visit", "walker_id": drv.wid,
                  "node": node, "iters": iters}
            tick_visits.append(ev)
            events.append(ev)

        # 4. memory merge
        if mem_cfg.enabled:
            for idx, drv in enumerate(drivers):
                beta = mem_cfg.beta_at(t)
                s.walkers[idx] = walker.memory_merge(s.walkers[idx], beta)
                tick_visits[idx]["beta"] = beta

        # 5. collisions: co-location, then rendezvous, then uplink
        if interactions_on:
            for group in swarm.colocated_groups(s):
                pairs = [(r, q) for i, r in enumerate(group) for q in group[i + 1:]]
                if not any(s.cooldown[r, q] == 0 for r, q in pairs):
                    continue
                intervals = [int(s.since_collision[r, q]) for r, q in pairs]
                node = s.walkers[group[0]].position
                s, weights = swarm.collide(s, group, mem_cfg.enabled)
                for ev in swarm.end_pursuits(s, group):
                    ev.update({"run_id": run_id, "t": t, "node": node,
                               "walkers": [ids[i] for i in ev["walkers"]]})
                    events.append(ev)
                swarm.start_cooldown(s, group, attraction_cfg.cooldown_max)
                for idx in group:
                    drv = drivers[idx]
                    if drv.home_clique is not None and g.clique_of[node] != drv.home_clique:
                        s.homing[idx] = swarm.nearest_clique_node(g, node, drv.home_clique)
                collision_count += 1
                collision_intervals.extend(intervals)
                events.append({"run_id": run_id, "t": t, "kind": "collide",
                               "trigger": "colocation", "walkers": [ids[i] for i in group],
                               "node": node, "weights": weights})
        if cfg.rendezvous.enabled and t % cfg.rendezvous.every == 0:
            s, weights = swarm.rendezvous_tick(s, cfg.rendezvous.every, cfg.rendezvous.node, mem_cfg.enabled)
            for ev in swarm.end_pursuits(s, list(range(s.size))):
                ev.update({"run_id": run_id, "t": t, "node": cfg.rendezvous.node,
                           "walkers": [ids[i] for i in ev["walkers"]]})
                events.append(ev)
            events.append({"run_id": run_id, "t": t, "kind": "rendezvous",
                           "walkers": list(ids), "node": cfg.rendezvous.node,
                           "weights": weights})
        if cfg.uplink and len(ids) > 1:
            s, weights = swarm.uplink_aggregate(s, mem_cfg.enabled)
            events.append({"run_id": run_id, "t": t, "kind": "collide",
                           "trigger": "uplink", "walkers": list(ids),
                           "node": None, "weights": weights})

        # 6. perception refresh
        if dynamic:
            for idx, drv in enumerate(drivers):
                s.walkers[idx], pol = walker.perception_refresh(
                    s.walkers[idx], env.val_features, env.val_labels, imp_params,
                    env.partition.data_frac, env.partition.label_frac,
                    centrality_vec, g,
                )
                drv.alpha = policy.accuracy_scaled_alpha(s.walkers[idx].cached_accuracy, imp_params)
                policies[idx] = confine(pol, drv)
                tick_visits[idx]["alpha_inst"] = drv.alpha

        # 7. evaluation
        if t % cfg.eval_every == 0:
            for idx, drv in enumerate(drivers):
                loss, acc = evaluate(s.walkers[idx].im, env.val_features, env.val_labels)
                rows.append((t, drv.wid, loss, acc, drv.cum_iters))
                tick_visits[idx]["loss"] = loss
                tick_visits[idx]["acc"] = acc

    last_t = max(r[0] for r in rows)
    final_acc = float(np.mean([r[3] for r in rows if r[0] == last_t]))
    metrics = MetricsRecord(
        series=cfg.series_label,
        seed=seed,
        walker_ids=list(ids),
        rows=rows,
        collision_count=collision_count,
        collision_intervals=collision_intervals,
        final_accuracy=final_acc,
    )
    return RunResult(run_id=run_id, series=cfg.series_label, seed=seed, events=events, metrics=metrics)


def run_single(cfg: ExperimentConfig, seed: int) -> RunResult:
    """Build the environment for (cfg, seed) and simulate it."""
    env = build_environment(cfg, seed)
    return simulate(env, cfg, seed)


def _run_cell(args: tuple[dict, int]) -> RunResult:
    doc, seed = args
    return run_single(config_from_dict(doc), seed)


def thread_count() -> int:
    raw = os.environ.get("XLWALK_THREADS", "")
    if not raw:
        return 1
    n = int(raw)
    return os.cpu_count() or 1 if n == 0 else max(1, n)


def run_many(cells: list[tuple[ExperimentConfig, int]], threads: int | None = None) -> list[RunResult]:
    """Run (config, seed) cells, possibly in parallel; output order fixed by input."""
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(cells) <= 1:
        # Series within a suite share the same world; build each environment once.
        envs: dict[tuple, Environment] = {}
        results = []
        for cfg, seed in cells:
            key = (cfg.graph, cfg.data, cfg.partition, seed)
            if key not in envs:
                envs[key] = build_environment(cfg, seed)
            results.append(simulate(envs[key], cfg, seed))
        return results
    payload = [(cfg.to_dict(), seed) for cfg, seed in cells]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_run_cell, payload))


def run_sweep(
    cfg: ExperimentConfig,
    axis: str,
    values: list,
    seeds: list[int],
    threads: int | None = None,
) -> list[RunResult]:
    """Cross product of axis values and seeds; one series per value."""
    if not values:
        raise ConfigError("sweep needs at least one value")
    cells = []
    for value in values:
        cfg_v = set_config_axis(cfg, axis, value)
        cfg_v = replace(cfg_v, series=f"{axis}={value}")
        for seed in seeds:
            cells.append((cfg_v, seed))
    return run_many(cells, threads)


# ---------------------------------------------------------------------------
# Summaries


def metrics_to_csv(records: list[MetricsRecord]) -> str:
    """Per-jump per-walker evaluation rows, one line per measurement."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["series", "seed", "t", "walker", "loss", "acc", "cum_iters"])
    for rec in records:
        for t, wid, loss, acc, cum in rec.rows:
            w.writerow([rec.series, rec.seed, t, wid, repr(float(loss)), repr(float(acc)), cum])
    return out.getvalue()


def _mean_std(values: list[float]) -> tuple[float, float]:
    arr = np.array(values, dtype=np.float64)
    return float(arr.mean()), float(arr.std())


def summarize(records: list[MetricsRecord]) -> str:
    """Aggregate runs into CSV tables: per-jump curves and final summaries.

    Means are taken over seeds (walker values are averaged within each run
    first); the std column is the across-seed standard deviation.
    """
    if not records:
        raise ConfigError("nothing to summarize")
    seen = set()
    for rec in records:
        key = (rec.series, rec.seed)
        if key in seen:
            raise ConfigError(f"duplicate run for series={rec.series} seed={rec.seed}")
        seen.add(key)

    by_series: dict[str, list[MetricsRecord]] = {}
    for rec in records:
        by_series.setdefault(rec.series, []).append(rec)

    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["table", "series", "t", "mean", "std", "count"])

    def per_jump(rec: MetricsRecord, col: int, reduce) -> dict[int, float]:
        by_t: dict[int, list[float]] = {}
        for row in rec.rows:
            by_t.setdefault(row[0], []).append(float(row[col]))
        return {t: reduce(vals) for t, vals in by_t.items()}

    for series in sorted(by_series):
        recs = by_series[series]
        curves = [per_jump(rec, 3, lambda v: float(np.mean(v))) for rec in recs]
        ts = sorted(set.intersection(*[set(c) for c in curves]))
        for t in ts:
            mean, std = _mean_std([c[t] for c in curves])
            w.writerow(["accuracy_vs_jump", series, t, repr(mean), repr(std), len(recs)])
    for series in sorted(by_series):
        recs = by_series[series]
        curves = [per_jump(rec, 4, lambda v: float(np.sum(v))) for rec in recs]
        ts = sorted(set.intersection(*[set(c) for c in curves]))
        for t in ts:
            mean, std = _mean_std([c[t] for c in curves])
            w.writerow(["cum_sgd_vs_jump", series, t, repr(mean), repr(std), len(recs)])
    for series in sorted(by_series):
        recs = by_series[series]
        mean, std = _mean_std([rec.final_accuracy for rec in recs])
        w.writerow(["final_accuracy", series, "", repr(mean), repr(std), len(recs)])
    for series in sorted(by_series):
        recs = by_series[series]
        per_run = [float(np.mean(rec.collision_intervals)) for rec in recs if rec.collision_intervals]
        n_events = sum(rec.collision_count for rec in recs)
        if per_run:
            mean, std = _mean_std(per_run)
            w.writerow(["collision_interval", series, "", repr(mean), repr(std), n_events])
    return out.getvalue()


def metrics_from_csv(text: str) -> list[MetricsRecord]:
    """Rebuild records from a metrics.csv produced by metrics_to_csv."""
    reader = csv.DictReader(io.StringIO(text))
    grouped: dict[tuple[str, int], list[tuple]] = {}
    for line in reader:
        key = (line["series"], int(line["seed"]))
        grouped.setdefault(key, []).append(
            (int(line["t"]), int(line["walker"]), float(line["loss"]),
             float(line["acc"]), int(line["cum_iters"]))
        )
    records = []
    for (series, seed), rows in sorted(grouped.items()):
        last_t = max(r[0] for r in rows)
        final = float(np.mean([r[3] for r in rows if r[0] == last_t]))
        records.append(
            MetricsRecord(
                series=series,
                seed=seed,
                walker_ids=sorted({r[1] for r in rows}),
                rows=rows,
                collision_count=0,
                collision_intervals=[],
                final_accuracy=final,
            )
        )
    return records
