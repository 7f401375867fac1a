"""Loop classes, essential classes and positivity of a transition diagram."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from .netgen import TransitionDiagram

__all__ = [
    "LoopClass",
    "ClassReport",
    "loop_classes",
    "is_positive",
    "row_nonzero_check",
    "diagram_graph",
    "to_dot",
]


@dataclass
class LoopClass:
    nodes: tuple  # sorted full node ids
    reduced: tuple  # sorted reduced labels
    kind: str  # essential | maximal | simple-loop
    simple: bool = False
    positivity: str = "unknown"
    witness: tuple = ()
    row_nonzero: bool | None = None

    @property
    def essential(self):
        return self.kind == "essential"

    def label(self):
        return "{" + ",".join(map(str, self.reduced)) + "}"


@dataclass
class ClassReport:
    classes: list
    membership: dict
    warnings: list = field(default_factory=list)

    @property
    def essential(self):
        return [c for c in self.classes if c.kind == "essential"]

    @property
    def n_essential(self):
        return len(self.essential)

    @property
    def maximal(self):
        """All non-essential maximal loop classes (simple loops included)."""
        return [c for c in self.classes if c.kind != "essential"]

    def class_of(self, node_id):
        i = self.membership.get(node_id)
        return None if i is None else self.classes[i]


def diagram_graph(d: TransitionDiagram) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(d.n_nodes))
    for es in d.edges:
        for e in es:
            g.add_edge(e.parent, e.child)
    return g


def loop_classes(d: TransitionDiagram, positivity_cap=20000) -> ClassReport:
    """Strongly connected components that carry a cycle, with their kinds.

    Each component is a maximal loop class.  It is essential when no edge
    leaves it; a non-essential one whose edges form a single cycle is
    reported as a simple loop.
    """
    g = diagram_graph(d)
    cond = nx.condensation(g)
    warnings = []
    if d.truncated:
        warnings.append(f"diagram truncated: {d.truncation_reason}")
    comps = {}
    for c in cond.nodes:
        members = cond.nodes[c]["members"]
        internal = sum(1 for a in members for b in g.successors(a) if b in members)
        if internal:
            comps[c] = (sorted(members), internal)
    essential = {c for c in comps if cond.out_degree(c) == 0}
    if d.truncated:
        # unexpanded nodes have no recorded children; do not call them essential
        unexpanded = {i for i, es in enumerate(d.edges) if not es}
        essential = {c for c in essential if not any(m in unexpanded for m in comps[c][0])}
    order = sorted(comps, key=lambda c: min(comps[c][0]))
    classes = []
    membership = {}
    for c in order:
        members, internal = comps[c]
        simple = internal == len(members)
        if c in essential:
            kind = "essential"
        else:
            kind = "simple-loop" if simple else "maximal"
        reduced = tuple(sorted({d.reduced_label(i) for i in members}))
        lc = LoopClass(tuple(members), reduced, kind, simple)
        lc.row_nonzero = row_nonzero_check(d, lc)
        for i in members:
            membership[i] = len(classes)
        classes.append(lc)
    report = ClassReport(classes, membership, warnings)
    for lc in classes:
        pos, wit = is_positive(d, lc, positivity_cap)
        lc.positivity, lc.witness = pos, wit
    return report


def _support_masks(digits):
    """Row bitmasks of a digit matrix: bit i set when entry (j, i) is nonzero."""
    return tuple(sum(1 << i for i, s in enumerate(row) if s >= 0) for row in digits)


def _bool_mult(a, b):
    out = []
    for row in a:
        acc = 0
        j = 0
        while row:
            if row & 1:
                acc |= b[j]
            row >>= 1
            j += 1
        out.append(acc)
    return tuple(out)


def is_positive(d: TransitionDiagram, c: LoopClass, cap=20000):
    """Search for an internal path whose matrix product is entrywise positive.

    Explores (start, end, support pattern) triples breadth-first by path
    length, so the witness returned is a shortest one.  Returns
    (verdict, witness path) with verdict positive | not-positive |
    undecided-at-cap.
    """
    members = set(c.nodes)
    inner = {i: [e for e in d.edges[i] if e.child in members] for i in members}
    width = {i: len(d.nodes[i].neighbours) for i in members}
    seen = {}
    queue = deque()
    for i in sorted(members):
        for e in inner[i]:
            pat = _support_masks(e.digits)
            key = (i, e.child, pat)
            if key not in seen:
                seen[key] = (i, e.child)
                queue.append(key)
    full = lambda pat, w: all(r == (1 << w) - 1 for r in pat)
    while queue:
        key = queue.popleft()
        s, t, pat = key
        if full(pat, width[t]):
            return "positive", seen[key]
        for e in inner[t]:
            npat = _bool_mult(pat, _support_masks(e.digits))
            nkey = (s, e.child, npat)
            if nkey in seen:
                continue
            if len(seen) >= cap:
                return "undecided-at-cap", ()
            seen[nkey] = seen[key] + (e.child,)
            queue.append(nkey)
    return "not-positive", ()


def row_nonzero_check(d: TransitionDiagram, c: LoopClass) -> bool:
    members = set(c.nodes)
    for i in members:
        for e in d.edges[i]:
            if e.child in members and any(all(s < 0 for s in row) for row in e.digits):
                return False
    return True


def to_dot(d: TransitionDiagram, report: ClassReport | None = None) -> str:
    """DOT text for the reduced diagram.

    Nodes are named ``r<label>`` and labelled with the reduced label and
    the reduced characteristic vector.  Edges are deduplicated between
    reduced labels.  Essential classes are filled grey; each loop class is
    a ``cluster_<n>`` subgraph.
    """
    lines = ["digraph transition {", "  rankdir=TB;", '  node [shape=box, fontname="monospace"];']
    ess_labels = set()
    if report:
        for c in report.essential:
            ess_labels.update(c.reduced)
    for lab, vec in enumerate(d.reduced_vectors(), 1):
        attrs = f'label="{lab}\\n{_dot_escape(vec.describe_reduced())}"'
        if lab in ess_labels:
            attrs += ", style=filled, fillcolor=lightgrey"
        lines.append(f"  r{lab} [{attrs}];")
    if report:
        for n, c in enumerate(report.classes):
            lines.append(f"  subgraph cluster_{n} {{")
            lines.append(f'    label="{c.kind} {c.label()}";')
            lines.append("    " + " ".join(f"r{x};" for x in c.reduced))
            lines.append("  }")
    pairs = sorted({(d.reduced_label(e.parent), d.reduced_label(e.child)) for e in d.edge_list()})
    for a, b in pairs:
        lines.append(f"  r{a} -> r{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_escape(s):
    return s.replace("\\", "\\\\").replace('"', '\\"')
