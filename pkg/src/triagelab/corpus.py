"""Corpus ingestion, cleaning, and train/test splitting.

Bug histories arrive as JSON Lines, one bug per line.  Cleaning applies
four filters in a fixed order: resolved status, active assignee, valid
assignment date, and acceptable fixing time (Q3 + 1.5*IQR outlier cut).
Active developers are the ones whose fix count exceeds the IQR of
per-developer fix counts.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError

VALID_STATUSES = ("FIXED", "CLOSED", "OTHER")
DEP_EVENT_KINDS = ("ADD_BLOCKS", "REMOVE_BLOCKS")

_REQUIRED_FIELDS = (
    "bug_id",
    "summary",
    "description",
    "component",
    "reported_at",
    "status_final",
)


@dataclass(frozen=True)
class BugRecord:
    """One bug's static text plus its timestamped lifecycle facts.

    ``dependency_events`` holds ``(day, kind, other_id)`` tuples; a kind
    of ``ADD_BLOCKS`` on bug ``i`` with other ``j`` means an arc i -> j
    (i blocks j) appears on that day.
    """

    bug_id: int
    summary: str
    description: str
    component: str
    reported_at: int
    assigned_at: int | None = None
    resolved_at: int | None = None
    actual_assignee: int | None = None
    status_final: str = "OTHER"
    dependency_events: tuple = ()

    def __post_init__(self):
        if self.status_final not in VALID_STATUSES:
            raise ValidationError(
                f"bug {self.bug_id}: bad status {self.status_final!r}"
            )
        if self.assigned_at is not None and self.assigned_at < self.reported_at:
            raise ValidationError(
                f"bug {self.bug_id}: assigned before reported"
            )
        for ev in self.dependency_events:
            if len(ev) != 3 or ev[1] not in DEP_EVENT_KINDS:
                raise ValidationError(
                    f"bug {self.bug_id}: bad dependency event {ev!r}"
                )

    @property
    def fixing_time(self) -> int | None:
        """resolved_at - assigned_at + 1, or None if either is missing."""
        if self.assigned_at is None or self.resolved_at is None:
            return None
        return self.resolved_at - self.assigned_at + 1

    @property
    def text(self) -> str:
        return f"{self.summary} {self.description}"


@dataclass(frozen=True)
class DeveloperProfile:
    dev_id: int
    name: str
    fixed_bug_count: int
    components_experienced: frozenset
    is_active: bool


@dataclass
class CleaningRule:
    """Frozen statistical parameters for the cleaning filters.

    When a field is None it is computed from the data being cleaned;
    freezing both fields makes ``clean_bugs`` a projection (idempotent
    under re-application of the same rule).
    """

    active_dev_ids: frozenset | None = None
    max_fix_threshold: float | None = None
    boundary_day: int | None = None


@dataclass
class DatasetSummary:
    counts_by_step: list  # [input, step1, step2, step3, step4]
    boundary_day: int | None
    horizon_L: float | None
    max_fix_threshold: float | None
    active_dev_ids: frozenset = field(default_factory=frozenset)

    def to_json(self) -> str:
        return json.dumps(
            {
                "counts_by_step": self.counts_by_step,
                "boundary_day": self.boundary_day,
                "horizon_L": self.horizon_L,
                "max_fix_threshold": self.max_fix_threshold,
                "active_dev_ids": sorted(self.active_dev_ids),
            },
            indent=2,
            sort_keys=True,
        )

    def write_cleaning_log(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "kept_count"])
            for step, count in enumerate(self.counts_by_step):
                writer.writerow([step, count])


def quartiles(sample) -> tuple[float, float]:
    """(Q1, Q3) with linear interpolation between order statistics."""
    arr = np.asarray(sample, dtype=float)
    if arr.size == 0:
        raise ValidationError("empty sample has no quartiles")
    q1, q3 = np.percentile(arr, [25, 75], method="linear")
    return float(q1), float(q3)


def _record_from_obj(obj, line_no):
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", line_no)
    for name in _REQUIRED_FIELDS:
        if name not in obj:
            raise ParseError(f"missing field {name!r}", line_no)
    deps = tuple(
        (int(day), kind, int(other))
        for day, kind, other in obj.get("dependency_events", [])
    )
    try:
        return BugRecord(
            bug_id=int(obj["bug_id"]),
            summary=str(obj["summary"]),
            description=str(obj["description"]),
            component=str(obj["component"]),
            reported_at=int(obj["reported_at"]),
            assigned_at=obj.get("assigned_at"),
            resolved_at=obj.get("resolved_at"),
            actual_assignee=obj.get("actual_assignee"),
            status_final=obj.get("status_final", "OTHER"),
            dependency_events=deps,
        )
    except ValidationError as exc:
        raise ParseError(str(exc), line_no) from exc


def load_events(path) -> list[BugRecord]:
    """Load a JSONL bug-history file, sorted by report day.

    Raises ParseError (with the offending line number) on malformed
    lines and ValidationError on duplicate bug ids.
    """
    records = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line_no) from exc
            record = _record_from_obj(obj, line_no)
            if record.bug_id in seen:
                raise ValidationError(f"duplicate bug_id {record.bug_id}")
            seen.add(record.bug_id)
            records.append(record)
    records.sort(key=lambda r: (r.reported_at, r.bug_id))
    return records


def record_to_obj(record: BugRecord) -> dict:
    obj = {
        "bug_id": record.bug_id,
        "summary": record.summary,
        "description": record.description,
        "component": record.component,
        "reported_at": record.reported_at,
        "status_final": record.status_final,
        "dependency_events": [list(ev) for ev in record.dependency_events],
    }
    for name in ("assigned_at", "resolved_at", "actual_assignee"):
        value = getattr(record, name)
        if value is not None:
            obj[name] = value
    return obj


def select_active_developers(records) -> list[DeveloperProfile]:
    """Profile developers from (training) records; flag the active ones.

    A developer is active when their fix count exceeds the IQR of all
    per-developer fix counts.  With a single developer the IQR is 0, so
    any positive count is active.
    """
    counts: dict[int, int] = {}
    components: dict[int, set] = {}
    for rec in records:
        dev = rec.actual_assignee
        if dev is None:
            continue
        counts[dev] = counts.get(dev, 0) + 1
        components.setdefault(dev, set()).add(rec.component)
    if not counts:
        return []
    q1, q3 = quartiles(list(counts.values()))
    iqr = q3 - q1
    return [
        DeveloperProfile(
            dev_id=dev,
            name=f"dev-{dev}",
            fixed_bug_count=n,
            components_experienced=frozenset(components[dev]),
            is_active=n > iqr,
        )
        for dev, n in sorted(counts.items())
    ]


def fixing_time_threshold(fixing_times) -> float:
    """Outlier cut Q3 + 1.5 * IQR over a fixing-time sample."""
    q1, q3 = quartiles(fixing_times)
    return q3 + 1.5 * (q3 - q1)


def clean_bugs(records, rule: CleaningRule | None = None):
    """Apply the four cleaning filters; returns (kept, DatasetSummary).

    Filters, in order:
      1. status FIXED/CLOSED with a resolution date;
      2. assigned to an active developer (computed from step-1
         survivors in the training window unless frozen in ``rule``);
      3. assignment date present and not after resolution;
      4. fixing time within Q3 + 1.5*IQR of the step-3 survivors
         (unless frozen in ``rule``).
    """
    rule = rule or CleaningRule()
    counts = [len(records)]

    step1 = [
        r
        for r in records
        if r.status_final in ("FIXED", "CLOSED") and r.resolved_at is not None
    ]
    counts.append(len(step1))

    if rule.active_dev_ids is not None:
        active = rule.active_dev_ids
    else:
        pool = step1
        if rule.boundary_day is not None:
            pool = [r for r in step1 if r.reported_at <= rule.boundary_day]
        active = frozenset(
            p.dev_id for p in select_active_developers(pool) if p.is_active
        )
    step2 = [r for r in step1 if r.actual_assignee in active]
    counts.append(len(step2))

    step3 = [
        r
        for r in step2
        if r.assigned_at is not None and r.assigned_at <= r.resolved_at
    ]
    counts.append(len(step3))

    threshold = rule.max_fix_threshold
    if threshold is None and step3:
        threshold = fixing_time_threshold([r.fixing_time for r in step3])
    step4 = (
        [r for r in step3 if r.fixing_time <= threshold]
        if threshold is not None
        else list(step3)
    )
    counts.append(len(step4))

    horizon = None
    if rule.boundary_day is not None:
        train_times = [
            r.fixing_time for r in step4 if r.reported_at <= rule.boundary_day
        ]
        if train_times:
            horizon = compute_horizon_L(train_times)
    summary = DatasetSummary(
        counts_by_step=counts,
        boundary_day=rule.boundary_day,
        horizon_L=horizon,
        max_fix_threshold=threshold,
        active_dev_ids=active,
    )
    return step4, summary


def split_train_test(records, boundary_day: int):
    """Partition records by report day; the boundary day goes to train."""
    train = [r for r in records if r.reported_at <= boundary_day]
    test = [r for r in records if r.reported_at > boundary_day]
    return train, test


def compute_horizon_L(train_fixing_times) -> float:
    """Project horizon: third quartile of training fixing times."""
    if len(train_fixing_times) == 0:
        raise ValidationError("cannot compute horizon from an empty sample")
    _, q3 = quartiles(train_fixing_times)
    return q3
