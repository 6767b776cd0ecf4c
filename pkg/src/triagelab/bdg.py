"""Evolving bug dependency graph (BDG).

Nodes are open bugs, arcs point from a blocking bug to the bug it
blocks.  The graph stays acyclic: arc events that would close a loop
are dropped (historical data noise) and logged.  Resolving a bug
removes the node with all incident arcs, so arcs never reference
resolved blockers.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

from .errors import ValidationError

log = logging.getLogger(__name__)

OPEN = "OPEN"
ADD_ARC = "ADD_ARC"
REMOVE_ARC = "REMOVE_ARC"
RESOLVE = "RESOLVE"


@dataclass(frozen=True)
class GraphMetrics:
    mean_depth: float
    mean_degree: float
    n_nodes: int
    n_arcs: int


@dataclass
class DependencyGraph:
    children: dict = field(default_factory=dict)  # blocker -> set of blocked
    parents: dict = field(default_factory=dict)  # blocked -> set of blockers
    resolved: set = field(default_factory=set)
    rejected_arcs: list = field(default_factory=list)

    @property
    def nodes(self):
        return set(self.children)

    @property
    def n_arcs(self) -> int:
        return sum(len(kids) for kids in self.children.values())

    def _ensure_node(self, bug: int) -> None:
        if bug in self.resolved:
            return
        self.children.setdefault(bug, set())
        self.parents.setdefault(bug, set())

    def _reaches(self, start: int, target: int) -> bool:
        stack = [start]
        seen = set()
        while stack:
            node = stack.pop()
            if node == target:
                return True
            if node in seen:
                continue
            seen.add(node)
            stack.extend(self.children.get(node, ()))
        return False

    def apply_event(self, kind: str, bug: int, other: int | None = None) -> None:
        """Apply OPEN/ADD_ARC/REMOVE_ARC/RESOLVE.

        ADD_ARC(bug, other) adds the arc bug -> other (bug blocks
        other), auto-opening unknown endpoints; a cycle-creating arc is
        dropped and logged.  Arcs touching resolved bugs are ignored.
        """
        if kind == OPEN:
            self._ensure_node(bug)
        elif kind == RESOLVE:
            self.resolve(bug)
        elif kind == ADD_ARC:
            if bug in self.resolved or other in self.resolved:
                return
            self._ensure_node(bug)
            self._ensure_node(other)
            if bug == other or self._reaches(other, bug):
                self.rejected_arcs.append((bug, other))
                log.warning("dropping cycle-creating arc %s -> %s", bug, other)
                return
            self.children[bug].add(other)
            self.parents[other].add(bug)
        elif kind == REMOVE_ARC:
            if bug in self.children:
                self.children[bug].discard(other)
            if other in self.parents:
                self.parents[other].discard(bug)
        else:
            raise ValidationError(f"unknown graph event kind {kind!r}")

    def resolve(self, bug: int) -> None:
        if bug not in self.children:
            self.resolved.add(bug)
            return
        for child in self.children.pop(bug):
            self.parents[child].discard(bug)
        for parent in self.parents.pop(bug):
            self.children[parent].discard(bug)
        self.resolved.add(bug)

    def blocking_parents(self, bug: int) -> set:
        """Direct unresolved blockers of an open bug (not transitive)."""
        if bug not in self.parents:
            raise ValidationError(f"bug {bug} is not an open node")
        return set(self.parents[bug])

    def depth(self, bug: int) -> int:
        """Longest chain of unresolved blockers above the bug."""
        best = 0
        stack = [(bug, 0)]
        while stack:
            node, d = stack.pop()
            ps = self.parents.get(node, ())
            if not ps:
                best = max(best, d)
            for p in ps:
                stack.append((p, d + 1))
        return best

    def is_acyclic(self) -> bool:
        """Full topological-sort check (Kahn)."""
        indegree = {n: len(self.parents[n]) for n in self.children}
        queue = [n for n, d in indegree.items() if d == 0]
        visited = 0
        while queue:
            node = queue.pop()
            visited += 1
            for child in self.children[node]:
                indegree[child] -= 1
                if indegree[child] == 0:
                    queue.append(child)
        return visited == len(self.children)

    def metrics_snapshot(self) -> GraphMetrics:
        """Mean depth and mean degree over open nodes; zeros when empty.

        mean_degree = |arcs| / |nodes| (half the mean incident degree).
        """
        n = len(self.children)
        if n == 0:
            return GraphMetrics(0.0, 0.0, 0, 0)
        arcs = self.n_arcs
        total_depth = sum(self.depth(b) for b in self.children)
        return GraphMetrics(
            mean_depth=total_depth / n,
            mean_degree=arcs / n,
            n_nodes=n,
            n_arcs=arcs,
        )

    def write_arcs_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["blocker", "blocked"])
            for blocker in sorted(self.children):
                for blocked in sorted(self.children[blocker]):
                    writer.writerow([blocker, blocked])
