"""Day-by-day replay engine.

Each simulated day runs a fixed sub-step order: (a) feed the day's
historical events into the dependency graph and the open pool, (b)
complete in-progress work, (c) let the policy decide on the feasible
bugs, (d) enqueue the assignments and start whatever fits the
developers' remaining capacity, (e) regenerate one capacity day per
developer, capped at the horizon L.

Capacity-aware policies (RABT/DABT) only ever assign work that starts
the same day; anything else is a solver contract violation.  CBR and
CosTriage ignore capacity when choosing, so their assignments queue at
the developer until capacity frees up - that queueing is what makes
their overdue and un-fixed counts grow.  The Actual policy replays
history verbatim: historical completion day, no capacity accounting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .bdg import DependencyGraph
from .costmodel import infer_topic
from .errors import ValidationError
from .policies import (
    POLICY_NAMES,
    decide_actual,
    decide_cbr,
    decide_costriage,
    decide_knapsack,
)
from .suitability import predict_suitability
from .textprep import preprocess_text, tfidf_transform


@dataclass
class SimConfig:
    policy: str
    boundary_day: int
    end_day: int
    alpha: float = 0.5
    seed: int = 0
    horizon_L: float = 10.0

    def __post_init__(self):
        if self.policy not in POLICY_NAMES:
            raise ValidationError(f"unknown policy {self.policy!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError("alpha must lie in [0, 1]")
        if self.horizon_L <= 0:
            raise ValidationError("horizon L must be positive")
        if self.end_day < self.boundary_day:
            raise ValidationError("end_day before boundary_day")


@dataclass
class ReplayCorpus:
    """Everything the replay needs about the bug history."""

    records: list  # every BugRecord, valid or not (the world)
    assignable_ids: set  # cleaned test bugs the policy may assign
    history: dict = field(init=False)

    def __post_init__(self):
        self.history = {r.bug_id: r for r in self.records}


@dataclass
class TrainedModels:
    """Frozen artifacts from the training phase."""

    linear_model: object
    vocab: object
    topic_model: object
    cost_matrix: object
    dev_profiles: dict  # dev_id -> DeveloperProfile (active set)
    _row_cache: dict = field(default_factory=dict)
    _topic_cache: dict = field(default_factory=dict)

    @property
    def dev_ids(self):
        return sorted(self.dev_profiles)

    def suitability_row(self, record):
        if record.bug_id not in self._row_cache:
            doc = preprocess_text(record.summary, record.description, record.bug_id)
            vec = tfidf_transform(doc, self.vocab)
            self._row_cache[record.bug_id] = predict_suitability(
                self.linear_model, vec, self.dev_ids, bug_id=record.bug_id
            )
        return self._row_cache[record.bug_id]

    def topic_of(self, record):
        if record.bug_id not in self._topic_cache:
            doc = preprocess_text(record.summary, record.description, record.bug_id)
            self._topic_cache[record.bug_id] = infer_topic(
                self.topic_model, doc, self.vocab
            )
        return self._topic_cache[record.bug_id]

    def cost_map(self, record):
        topic = self.topic_of(record)
        return {d: self.cost_matrix.cost(d, topic) for d in self.dev_ids}


@dataclass
class DeveloperSlate:
    dev_id: int
    T: float
    in_progress: list = field(default_factory=list)  # (bug_id, completion_day)
    queue: list = field(default_factory=list)  # FIFO of (bug_id, cost)


@dataclass
class SimState:
    day: int
    graph: DependencyGraph
    slates: dict  # dev_id -> DeveloperSlate
    open_pool: set = field(default_factory=set)  # assignable, unassigned
    assigned: dict = field(default_factory=dict)  # bug_id -> dev_id
    log: list = field(default_factory=list)  # assignment dicts
    daily: list = field(default_factory=list)  # per-day sample dicts


def feasible_bugs(state: SimState) -> list:
    """Open, unassigned, assignable bugs (deferred ones included)."""
    return sorted(state.open_pool)


def _events_by_day(records):
    """(day -> [(kind, bug, other)]) for opens and arc changes, and
    (day -> [bug]) for historical resolutions."""
    opens: dict[int, list] = {}
    arcs: dict[int, list] = {}
    resolves: dict[int, list] = {}
    for rec in records:
        opens.setdefault(rec.reported_at, []).append(rec.bug_id)
        for day, kind, other in rec.dependency_events:
            arcs.setdefault(day, []).append((kind, rec.bug_id, other))
        if rec.resolved_at is not None:
            resolves.setdefault(rec.resolved_at, []).append(rec.bug_id)
    return opens, arcs, resolves


class Replay:
    """One deterministic policy run over the testing phase."""

    def __init__(self, config: SimConfig, corpus: ReplayCorpus, models: TrainedModels):
        self.config = config
        self.corpus = corpus
        self.models = models
        self.opens, self.arcs, self.hist_resolves = _events_by_day(corpus.records)
        self.graph = DependencyGraph()
        self.state = SimState(
            day=config.boundary_day,
            graph=self.graph,
            slates={
                d: DeveloperSlate(dev_id=d, T=config.horizon_L)
                for d in models.dev_ids
            },
        )
        self._entered = set()  # assignable bugs that entered the pool
        self._warm_up()

    def _warm_up(self):
        """Replay history through the boundary day to seed the graph."""
        days = sorted(
            set(self.opens) | set(self.arcs) | set(self.hist_resolves)
        )
        for day in days:
            if day > self.config.boundary_day:
                break
            self._apply_world_events(day, simulate_everything=False)

    def _apply_world_events(self, day, simulate_everything=True):
        for bug_id in sorted(self.opens.get(day, ())):
            self.graph.apply_event("OPEN", bug_id)
            if (
                simulate_everything
                and bug_id in self.corpus.assignable_ids
                and day > self.config.boundary_day
            ):
                self.state.open_pool.add(bug_id)
                self._entered.add(bug_id)
        for kind, bug_id, other in self.arcs.get(day, ()):
            arc_kind = "ADD_ARC" if kind == "ADD_BLOCKS" else "REMOVE_ARC"
            self.graph.apply_event(arc_kind, bug_id, other)
        for bug_id in sorted(self.hist_resolves.get(day, ())):
            # Simulated bugs resolve when the simulated developer
            # finishes, not on the historical date.
            if simulate_everything and bug_id in self.corpus.assignable_ids:
                continue
            self.graph.apply_event("RESOLVE", bug_id)

    def _complete_work(self, day):
        for dev_id in sorted(self.state.slates):
            slate = self.state.slates[dev_id]
            still = []
            for bug_id, completion_day in slate.in_progress:
                if completion_day <= day:
                    self.graph.apply_event("RESOLVE", bug_id)
                else:
                    still.append((bug_id, completion_day))
            slate.in_progress = still

    def _decide(self, day, feasible):
        cfg = self.config
        history = self.corpus.history
        s_rows = {b: self.models.suitability_row(history[b]) for b in feasible}
        cost_lookup = lambda b: self.models.cost_map(history[b])
        if cfg.policy == "actual":
            return decide_actual(day, feasible, history)
        if cfg.policy == "cbr":
            return decide_cbr(day, feasible, s_rows, cost_lookup)
        if cfg.policy == "costriage":
            return decide_costriage(day, feasible, s_rows, cost_lookup, cfg.alpha)
        capacities = {d: self.state.slates[d].T for d in self.models.dev_ids}
        variant = "RABT" if cfg.policy == "rabt" else "DABT"
        return decide_knapsack(
            day,
            feasible,
            s_rows,
            cost_lookup,
            capacities,
            self.graph,
            cfg.alpha,
            variant,
        )

    def _record_assignment(self, day, bug_id, dev_id, cost, same_batch):
        rec = self.corpus.history[bug_id]
        parents = (
            self.graph.blocking_parents(bug_id)
            if bug_id in self.graph.children
            else set()
        )
        blocking = {p for p in parents if same_batch.get(p) != dev_id}
        profile = self.models.dev_profiles.get(dev_id)
        accurate = (
            profile is not None and rec.component in profile.components_experienced
        )
        entry = {
            "bug_id": bug_id,
            "dev_id": dev_id,
            "reported_day": rec.reported_at,
            "assigned_day": day,
            "estimated_cost": cost,
            "infeasible": bool(blocking),
            "accurate": bool(accurate),
            "component": rec.component,
            "start_day": None,
            "completion_day": None,
        }
        self.state.assigned[bug_id] = dev_id
        self.state.open_pool.discard(bug_id)
        self.state.log.append(entry)
        return entry

    def _start_queued(self, day, strict_devs):
        """FIFO start pass; strict_devs must drain fully (solver
        contract: their batch was chosen to fit remaining capacity)."""
        for dev_id in sorted(self.state.slates):
            slate = self.state.slates[dev_id]
            remaining = []
            for bug_id, cost, entry in slate.queue:
                if not remaining and cost <= slate.T + 1e-9:
                    slate.T -= cost
                    completion = day + max(1, math.ceil(cost))
                    entry["start_day"] = day
                    entry["completion_day"] = completion
                    slate.in_progress.append((bug_id, completion))
                else:
                    remaining.append((bug_id, cost, entry))
            if remaining and dev_id in strict_devs:
                raise ValidationError(
                    f"solver batch exceeds developer {dev_id}'s remaining capacity"
                )
            slate.queue = remaining

    def step_day(self):
        day = self.state.day + 1
        self.state.day = day
        cfg = self.config
        self._apply_world_events(day)
        self._complete_work(day)

        decision = self._decide(day, feasible_bugs(self.state))
        same_batch = {b: d for b, d, _ in decision.assignments}
        strict_devs = set()
        for bug_id, dev_id, cost in decision.assignments:
            entry = self._record_assignment(day, bug_id, dev_id, cost, same_batch)
            if cfg.policy == "actual":
                rec = self.corpus.history[bug_id]
                entry["start_day"] = day
                entry["completion_day"] = rec.resolved_at
                self.state.slates[dev_id].in_progress.append(
                    (bug_id, rec.resolved_at)
                )
            else:
                self.state.slates[dev_id].queue.append((bug_id, cost, entry))
                if cfg.policy in ("rabt", "dabt"):
                    strict_devs.add(dev_id)
        if cfg.policy != "actual":
            self._start_queued(day, strict_devs)

        for dev_id in sorted(self.state.slates):
            slate = self.state.slates[dev_id]
            slate.T = min(slate.T + 1.0, cfg.horizon_L)
            if slate.T < -1e-9:
                raise ValidationError(f"developer {dev_id} capacity went negative")

        snapshot = self.graph.metrics_snapshot()
        self.state.daily.append(
            {
                "day": day,
                "mean_depth": snapshot.mean_depth,
                "mean_degree": snapshot.mean_degree,
                "n_nodes": snapshot.n_nodes,
                "n_arcs": snapshot.n_arcs,
                "capacity": {
                    str(d): self.state.slates[d].T for d in sorted(self.state.slates)
                },
            }
        )

    def run(self):
        while self.state.day < self.config.end_day:
            self.step_day()
        # Flush: anything unfinished by the end of the horizon stays
        # un-fixed; completion days past the end are cleared.
        for entry in self.state.log:
            if entry["completion_day"] is not None and entry["completion_day"] > self.config.end_day:
                entry["completion_day"] = None
        return SimResult(
            config=self.config,
            log=self.state.log,
            daily=self.state.daily,
            total_entering=len(self._entered),
        )


@dataclass
class SimResult:
    config: SimConfig
    log: list
    daily: list
    total_entering: int


def run_simulation(config: SimConfig, corpus: ReplayCorpus, models: TrainedModels) -> SimResult:
    """Run one policy over the whole testing phase, deterministically."""
    if not models.dev_profiles:
        raise ValidationError("no active developers; refusing to simulate")
    return Replay(config, corpus, models).run()
