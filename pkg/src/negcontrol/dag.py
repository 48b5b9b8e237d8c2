"""Validity checks for candidate negative-control designs.

A design is a small DAG over the fixed role vocabulary
``{A, Y, U, W, Z, X, IV}``. :func:`validate_dag` reports which structural
requirements of a negative-control design the graph breaks. The catalog
:data:`CATALOG` enumerates the partial graphs for the ``(Z, A, U)`` and
``(W, Y, U)`` relationships together with their known validity, and doubles
as a source of simulation scenarios.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import MalformedSpec

NODES = ("A", "Y", "U", "W", "Z", "X", "IV")
REQUIRED = frozenset({"A", "Y", "U"})


class Violation(str, enum.Enum):
    NoUWEdge = "NoUWEdge"
    NoUZEdgeNotIV = "NoUZEdgeNotIV"
    YCausesW = "YCausesW"
    ColliderU = "ColliderU"
    ACausesW = "ACausesW"
    ZCausesY = "ZCausesY"


DESCRIPTIONS = {
    Violation.NoUWEdge: "no edge between U and W; the NCO cannot proxy the confounder",
    Violation.NoUZEdgeNotIV: "no edge between U and Z and Z does not cause A; Z is neither a proxy of U nor an IV",
    Violation.YCausesW: "Y causes W, so A affects W through Y",
    Violation.ColliderU: "both Z and W cause U; conditioning on U links Z and W",
    Violation.ACausesW: "A causes W directly (NCO exclusion restriction broken)",
    Violation.ZCausesY: "Z causes Y directly (NCE exclusion restriction broken)",
}


@dataclass(frozen=True)
class DagSpec:
    nodes: frozenset
    edges: tuple

    def __init__(self, nodes: Iterable[str], edges: Iterable[Iterable[str]]):
        object.__setattr__(self, "nodes", frozenset(nodes))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in edges))

    @classmethod
    def from_edges(cls, edges, extra_nodes=()) -> "DagSpec":
        """Build a spec whose nodes are ``{A, Y, U}``, every edge endpoint and ``extra_nodes``."""
        edges = [tuple(e) for e in edges]
        nodes = set(REQUIRED) | set(extra_nodes)
        for src, dst in edges:
            nodes.update((src, dst))
        return cls(nodes, edges)

    def has_edge(self, src: str, dst: str) -> bool:
        return (src, dst) in self.edge_set

    @property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def adjacent(self, a: str, b: str) -> bool:
        return self.has_edge(a, b) or self.has_edge(b, a)

    def parents(self, node: str) -> list:
        return [s for s, d in self.edges if d == node]

    def to_json(self) -> str:
        doc = {"nodes": sorted(self.nodes, key=NODES.index), "edges": [list(e) for e in self.edges]}
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "DagSpec":
        try:
            doc = json.loads(text)
            return cls(doc["nodes"], doc["edges"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedSpec(f"cannot parse DAG document: {exc}") from exc


def topological_order(spec: DagSpec) -> list:
    """Kahn's algorithm; ties broken by the fixed node vocabulary order."""
    indeg = {v: 0 for v in spec.nodes}
    children = {v: [] for v in spec.nodes}
    for s, d in spec.edges:
        indeg[d] += 1
        children[s].append(d)
    ready = sorted((v for v, k in indeg.items() if k == 0), key=NODES.index)
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for c in children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
        ready.sort(key=NODES.index)
    if len(order) != len(spec.nodes):
        cyc = sorted(v for v in spec.nodes if v not in order)
        raise MalformedSpec(f"graph is cyclic (nodes on a cycle or downstream of one: {cyc})")
    return order


def check_structure(spec: DagSpec) -> None:
    unknown = sorted(set(spec.nodes) - set(NODES))
    if unknown:
        raise MalformedSpec(f"unknown nodes {unknown}; allowed {list(NODES)}")
    missing = sorted(REQUIRED - spec.nodes)
    if missing:
        raise MalformedSpec(f"graph must contain nodes {sorted(REQUIRED)}; missing {missing}")
    for edge in spec.edges:
        if len(edge) != 2:
            raise MalformedSpec(f"edge {edge!r} is not an ordered pair")
        src, dst = edge
        if src not in spec.nodes or dst not in spec.nodes:
            raise MalformedSpec(f"edge {src}->{dst} references an undeclared node")
        if src == dst:
            raise MalformedSpec(f"self-loop on {src}")
    topological_order(spec)


def validate_dag(spec: DagSpec) -> list:
    """Return the list of :class:`Violation` codes for ``spec`` (empty when valid).

    Raises
    ------
    MalformedSpec
        Unknown nodes, missing ``A``/``Y``/``U``, dangling edges or a cycle.
    """
    check_structure(spec)
    found = []
    has = spec.has_edge
    if "W" in spec.nodes and not spec.adjacent("U", "W"):
        found.append(Violation.NoUWEdge)
    if "Z" in spec.nodes and not spec.adjacent("U", "Z") and not has("Z", "A"):
        found.append(Violation.NoUZEdgeNotIV)
    if has("Y", "W"):
        found.append(Violation.YCausesW)
    if has("Z", "U") and has("W", "U"):
        found.append(Violation.ColliderU)
    if has("A", "W"):
        found.append(Violation.ACausesW)
    if has("Z", "Y"):
        found.append(Violation.ZCausesY)
    return found


def is_valid_design(spec: DagSpec) -> bool:
    """True when ``spec`` is acyclic and has no violations.

    Unlike :func:`validate_dag`, a cyclic graph counts as an invalid design
    instead of raising; unknown nodes still raise.
    """
    try:
        return not validate_dag(spec)
    except MalformedSpec:
        check_vocabulary(spec)
        return False


def check_vocabulary(spec: DagSpec) -> None:
    unknown = sorted(set(spec.nodes) - set(NODES))
    if unknown:
        raise MalformedSpec(f"unknown nodes {unknown}; allowed {list(NODES)}")


# -- catalog of partial graphs ---------------------------------------------

_BASE = (("U", "A"), ("U", "Y"), ("A", "Y"))


class CatalogCell(NamedTuple):
    panel: str  # "ZAU" or "WYU"
    row: str
    column: str
    label: str
    edges: tuple
    valid: bool

    @property
    def spec(self) -> DagSpec:
        extra = ("Z",) if self.panel == "ZAU" else ("W",)
        return DagSpec.from_edges(_BASE + self.edges, extra_nodes=extra)


def _cell(panel, row, column, label, extra, valid):
    return CatalogCell(panel, row, column, label, tuple(extra), valid)


CATALOG = (
    # (Z, A, U) relationships
    _cell("ZAU", "no U-Z edge", "Z->A", "Instrumental variable", [("Z", "A")], True),
    _cell("ZAU", "no U-Z edge", "A->Z", "post-treatment, unrelated to U", [("A", "Z")], False),
    _cell("ZAU", "no U-Z edge", "Z indep A", "unrelated to U", [], False),
    _cell("ZAU", "U->Z", "Z->A", "Invalid IV", [("U", "Z"), ("Z", "A")], True),
    _cell("ZAU", "U->Z", "A->Z", "Post-treatment proxy of U", [("U", "Z"), ("A", "Z")], True),
    _cell("ZAU", "U->Z", "Z indep A", "Surrogate of U", [("U", "Z")], True),
    _cell("ZAU", "Z->U", "Z->A", "", [("Z", "U"), ("Z", "A")], True),
    _cell("ZAU", "Z->U", "A->Z", "", [("Z", "U"), ("A", "Z")], False),
    _cell("ZAU", "Z->U", "Z indep A", "", [("Z", "U")], True),
    # (W, Y, U) relationships
    _cell("WYU", "no U-W edge", "W->Y", "", [("W", "Y")], False),
    _cell("WYU", "no U-W edge", "Y->W", "", [("Y", "W")], False),
    _cell("WYU", "no U-W edge", "Y indep W | U", "", [], False),
    _cell("WYU", "U->W", "W->Y", "", [("W", "Y"), ("U", "W")], True),
    _cell("WYU", "U->W", "Y->W", "", [("Y", "W"), ("U", "W")], False),
    _cell("WYU", "U->W", "Y indep W | U", "", [("U", "W")], True),
    _cell("WYU", "W->U", "W->Y", "", [("W", "Y"), ("W", "U")], True),
    _cell("WYU", "W->U", "Y->W", "", [("Y", "W"), ("W", "U")], False),
    _cell("WYU", "W->U", "Y indep W | U", "", [("W", "U")], True),
)

# U -> A, U -> Y, U -> W, U -> Z, A -> Y, IV -> A
TWO_PROXY_DAG = DagSpec.from_edges(
    [("U", "A"), ("U", "Y"), ("U", "W"), ("U", "Z"), ("A", "Y"), ("IV", "A")]
)


def combine_cells(zau: CatalogCell, wyu: CatalogCell) -> DagSpec:
    """Merge one ``(Z, A, U)`` and one ``(W, Y, U)`` partial graph into a full design."""
    edges = list(_BASE) + list(zau.edges) + list(wyu.edges)
    return DagSpec.from_edges(edges, extra_nodes=("Z", "W"))
