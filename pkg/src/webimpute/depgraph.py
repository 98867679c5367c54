"""Weighted directed graph over the attributes of a rule set.

The graph has three node kinds:

* ``attribute`` nodes, one per attribute appearing on either side of a rule;
* ``logic`` nodes (AND junctions), one per rule whose determinant count
  (LHS attributes plus condition literals) is at least two;
* ``condition`` nodes, one per distinct ``Attr=Literal`` constraint.

A rule with a single unconditional determinant contributes direct
attribute -> attribute edges carrying that edge's confidence.  A rule with a
logic node routes weight-1 structural edges from its determinants and
conditions into the junction, and the per-RHS confidence sits on the
junction -> attribute edge.  Condition nodes never have incoming edges.
The graph may contain cycles; nothing downstream assumes acyclicity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .rules import RuleSet

ATTRIBUTE = "attribute"
LOGIC = "logic"
CONDITION = "condition"


@dataclass(frozen=True)
class GraphNode:
    kind: str
    label: str


@dataclass(frozen=True)
class GraphEdge:
    src: GraphNode
    dst: GraphNode
    weight: float
    rule_id: str


@dataclass(frozen=True)
class RuleApplication:
    """One way a rule can supply a value for one attribute.

    ``weight`` is the confidence of the dependency edge into ``target``.
    """

    rule_id: str
    target: str
    determinants: tuple[str, ...]
    conditions: tuple[tuple[str, str], ...]
    weight: float


@dataclass
class DependencyGraph:
    nodes: list[GraphNode] = field(default_factory=list)
    edges: list[GraphEdge] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._node_set = set(self.nodes)
        self._apps: dict[str, list[RuleApplication]] = {}

    def _add_node(self, node: GraphNode) -> GraphNode:
        if node not in self._node_set:
            self._node_set.add(node)
            self.nodes.append(node)
        return node

    def _add_application(self, app: RuleApplication) -> None:
        self._apps.setdefault(app.target, []).append(app)

    def applications_into(self, attr: str) -> list[RuleApplication]:
        """Ways to derive ``attr``, in rule-declaration order."""
        return list(self._apps.get(attr, ()))

    def attribute_nodes(self) -> list[GraphNode]:
        return [n for n in self.nodes if n.kind == ATTRIBUTE]

    def logic_nodes(self) -> list[GraphNode]:
        return [n for n in self.nodes if n.kind == LOGIC]

    def condition_nodes(self) -> list[GraphNode]:
        return [n for n in self.nodes if n.kind == CONDITION]


def build_dependency_graph(ruleset: RuleSet) -> DependencyGraph:
    """Assemble the graph from a rule set with estimated confidences."""
    graph = DependencyGraph()
    for rule in ruleset.rules:
        for attr in rule.lhs + rule.rhs:
            graph._add_node(GraphNode(ATTRIBUTE, attr))
        dep_edge_src: GraphNode
        if len(rule.lhs) + len(rule.condition) >= 2:
            junction = graph._add_node(GraphNode(LOGIC, rule.id))
            for attr in rule.lhs:
                graph.edges.append(
                    GraphEdge(GraphNode(ATTRIBUTE, attr), junction, 1.0, rule.id)
                )
            for attr, literal in rule.condition:
                cond = graph._add_node(GraphNode(CONDITION, f"{attr}={literal}"))
                graph.edges.append(GraphEdge(cond, junction, 1.0, rule.id))
            dep_edge_src = junction
        else:
            dep_edge_src = GraphNode(ATTRIBUTE, rule.lhs[0])
        for attr in rule.rhs:
            weight = ruleset.confidence(rule.id, attr)
            graph.edges.append(
                GraphEdge(dep_edge_src, GraphNode(ATTRIBUTE, attr), weight, rule.id)
            )
            graph._add_application(
                RuleApplication(rule.id, attr, rule.lhs, rule.condition, weight)
            )
    return graph


_DOT_SHAPES = {ATTRIBUTE: "ellipse", LOGIC: "box", CONDITION: "diamond"}
_KIND_ORDER = {ATTRIBUTE: 0, LOGIC: 1, CONDITION: 2}


def _dot_id(node: GraphNode) -> str:
    return f"{node.kind[0]}_{node.label}"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: DependencyGraph) -> str:
    """Graphviz DOT rendering; node shape encodes the node kind."""
    lines = ["digraph sdg {"]
    for node in sorted(graph.nodes, key=lambda n: (_KIND_ORDER[n.kind], n.label)):
        lines.append(
            f"  {_quote(_dot_id(node))} "
            f"[label={_quote(node.label)} shape={_DOT_SHAPES[node.kind]}];"
        )
    for edge in sorted(
        graph.edges, key=lambda e: (_dot_id(e.src), _dot_id(e.dst), e.rule_id)
    ):
        lines.append(
            f"  {_quote(_dot_id(edge.src))} -> {_quote(_dot_id(edge.dst))} "
            f"[label={_quote(f'{edge.rule_id}:{edge.weight:g}')}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
