"""
Communication topologies for broadcast networks.

Topologies are immutable, vertex-ordered undirected graphs backed by a
networkx.Graph for the graph queries. Standard families (lines, stars,
cliques, word-coded trees), the CLI literal syntax, adjacency files, bounded
tree enumeration, and the tree unfolding used to move an execution from an
arbitrary graph onto a tree all live here.

Literals:
    line:N  star:N  clique:N  tree:{ε,1,2,1.1}   (undotted single digits such as 11 are accepted)
Families:
    lines:N  stars:N  trees:H,D,M
Adjacency file:
    edge u v        # one undirected edge per line
    vertex u        # optional isolated vertex
"""

import itertools
import os
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple, Union

import networkx as nx

from infra.logging_setup import get_logger

logger = get_logger("topology")

ROOT = "ε"
ROOT_ALIASES = {"ε", "eps", "e", "root"}


class TopologyError(ValueError):
    """Malformed topology literal, tree spec or adjacency file."""


class NotAStarError(TopologyError):
    """A star topology was required."""


class LiftError(Exception):
    """Tree lifting produced an execution that does not match the source (a bug)."""


# =============================================================================
# TREE WORDS
# =============================================================================

Word = Tuple[int, ...]


def word_id(word: Word) -> str:
    return ROOT if not word else ".".join(str(x) for x in word)


def parse_word(text: str) -> Word:
    """`ε` -> (), `1.2` -> (1, 2), `12` -> (1, 2) (undotted single digits)."""
    text = text.strip()
    if text in ROOT_ALIASES:
        return ()
    if "." in text:
        parts = text.split(".")
    else:
        parts = list(text)
    try:
        word = tuple(int(x) for x in parts)
    except ValueError:
        raise TopologyError(f"bad tree word {text!r}") from None
    if any(x < 1 for x in word):
        raise TopologyError(f"tree word {text!r} must use positive integers")
    return word


def word_of(vertex: str) -> Word:
    return parse_word(vertex)


def depth_of(vertex: str) -> int:
    return len(word_of(vertex))


# =============================================================================
# TOPOLOGY
# =============================================================================

@dataclass(frozen=True)
class Topology:
    """
    Undirected, irreflexive graph with a fixed vertex order.

    Attributes:
        name: Literal that rebuilds the topology (e.g. `line:3`)
        vertices: Vertex ids in canonical order
        edges: Undirected edges as frozensets of two vertices
        kind: line / star / clique / tree / graph
    """
    name: str
    vertices: Tuple[str, ...]
    edges: FrozenSet[FrozenSet[str]]
    kind: str = "graph"

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise TopologyError(f"duplicate vertex in {self.name}")
        known = set(self.vertices)
        for e in self.edges:
            if len(e) != 2:
                raise TopologyError(f"self-loop or malformed edge {set(e)} in {self.name}")
            if not e <= known:
                raise TopologyError(f"edge {sorted(e)} uses an unknown vertex")

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(tuple(e) for e in self.edges)
        return g

    @cached_property
    def index(self) -> Dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _neighbors(self) -> Dict[str, Tuple[str, ...]]:
        order = self.index
        return {v: tuple(sorted(self.graph.neighbors(v), key=order.__getitem__)) for v in self.vertices}

    @cached_property
    def neighbor_indices(self) -> Tuple[Tuple[int, ...], ...]:
        order = self.index
        return tuple(tuple(order[u] for u in self._neighbors[v]) for v in self.vertices)

    def neighbors(self, vertex: str) -> Tuple[str, ...]:
        """Neighbours in canonical vertex order."""
        return self._neighbors[vertex]

    def adjacent(self, u: str, v: str) -> bool:
        return self.graph.has_edge(u, v)

    def degree(self, vertex: str) -> int:
        return self.graph.degree(vertex)

    def max_degree(self) -> int:
        return max((d for _, d in self.graph.degree()), default=0)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def is_star(self) -> bool:
        if self.kind not in ("star", "tree") or ROOT not in self.index:
            return False
        return all(v == ROOT or depth_of(v) == 1 for v in self.vertices)

    def leaves_of_star(self) -> Tuple[str, ...]:
        if not self.is_star:
            raise NotAStarError(f"{self.name} is not a star")
        return tuple(v for v in self.vertices if v != ROOT)


def _edge(u: str, v: str) -> FrozenSet[str]:
    if u == v:
        raise TopologyError(f"self-loop on {u}")
    return frozenset((u, v))


def make_graph(vertices: Sequence[str], edges: Iterable[Tuple[str, str]], name: str = "graph") -> Topology:
    return Topology(name, tuple(vertices), frozenset(_edge(u, v) for u, v in edges), "graph")


def make_line(n: int) -> Topology:
    """v1 - v2 - ... - vn."""
    if n < 1:
        raise TopologyError("a line needs at least one vertex")
    vs = tuple(f"v{i}" for i in range(1, n + 1))
    return Topology(f"line:{n}", vs, frozenset(_edge(vs[i], vs[i + 1]) for i in range(n - 1)), "line")


def make_clique(n: int) -> Topology:
    if n < 1:
        raise TopologyError("a clique needs at least one vertex")
    vs = tuple(f"v{i}" for i in range(1, n + 1))
    return Topology(f"clique:{n}", vs, frozenset(_edge(u, v) for u, v in itertools.combinations(vs, 2)), "clique")


def make_star(n: int) -> Topology:
    """Root ε with leaves 1..n; n = 0 is the single root."""
    if n < 0:
        raise TopologyError("a star cannot have a negative number of leaves")
    vs = (ROOT,) + tuple(str(i) for i in range(1, n + 1))
    return Topology(f"star:{n}", vs, frozenset(_edge(ROOT, v) for v in vs[1:]), "star")


def make_tree(spec: Iterable[Union[str, Word]]) -> Topology:
    """
    Tree from a prefix-closed set of words.

    Args:
        spec: Words as tuples or strings (`ε`, `1`, `1.2`, `12`)

    Raises:
        TopologyError: missing root, not prefix-closed, or malformed word
    """
    words = set()
    for w in spec:
        words.add(tuple(w) if not isinstance(w, str) else parse_word(w))
    if () not in words:
        raise TopologyError("tree spec must contain the root ε")
    for w in words:
        if w and w[:-1] not in words:
            raise TopologyError(f"tree spec is not prefix-closed: {word_id(w)} lacks its parent")
    ordered = sorted(words)
    vs = tuple(word_id(w) for w in ordered)
    edges = frozenset(_edge(word_id(w[:-1]), word_id(w)) for w in ordered if w)
    name = "tree:{" + ",".join(vs) + "}"
    return Topology(name, vs, edges, "tree")


# =============================================================================
# LITERALS, FILES, FAMILIES
# =============================================================================

_LITERAL = re.compile(r"(line|star|clique):(\d+)\Z")
_TREE = re.compile(r"tree:\{(.*)\}\Z")


def load_adjacency(text: str, name: str = "graph") -> Topology:
    """Parse `edge u v` / `vertex u` lines (with # comments)."""
    vertices: List[str] = []
    edges: List[Tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if line[0] == "edge" and len(line) == 3:
            u, v = line[1], line[2]
            if u == v:
                raise TopologyError(f"line {lineno}: self-loop on {u}")
            for x in (u, v):
                if x not in vertices:
                    vertices.append(x)
            edges.append((u, v))
        elif line[0] == "vertex" and len(line) == 2:
            if line[1] not in vertices:
                vertices.append(line[1])
        else:
            raise TopologyError(f"line {lineno}: expected `edge u v` or `vertex u`")
    if not vertices:
        raise TopologyError("adjacency file declares no vertices")
    return make_graph(vertices, edges, name)


def parse_topology(literal: str) -> Topology:
    """Topology from a CLI literal or an adjacency file path."""
    literal = literal.strip()
    match = _LITERAL.match(literal)
    if match:
        kind, n = match.group(1), int(match.group(2))
        return {"line": make_line, "star": make_star, "clique": make_clique}[kind](n)
    match = _TREE.match(literal)
    if match:
        body = match.group(1)
        return make_tree([w for w in body.split(",") if w.strip()])
    if os.path.exists(literal):
        with open(literal, "r", encoding="utf-8") as f:
            return load_adjacency(f.read(), name=os.path.basename(literal))
    raise TopologyError(f"unrecognised topology {literal!r}")


def _tree_shapes(height: int, degree: int, nodes: int) -> List[Tuple]:
    """Canonical unordered rooted trees (nested sorted tuples) within the bounds."""
    if nodes < 1:
        return []
    if height == 0 or degree == 0 or nodes == 1:
        return [()]
    smaller = _tree_shapes(height - 1, degree, nodes - 1)
    sizes = {s: _shape_size(s) for s in smaller}
    shapes = []
    for count in range(0, degree + 1):
        for combo in itertools.combinations_with_replacement(sorted(smaller), count):
            if 1 + sum(sizes[s] for s in combo) <= nodes:
                shapes.append(tuple(sorted(combo)))
    return sorted(set(shapes), key=lambda s: (_shape_size(s), s))


def _shape_size(shape: Tuple) -> int:
    return 1 + sum(_shape_size(c) for c in shape)


def _shape_words(shape: Tuple, prefix: Word = ()) -> List[Word]:
    words = [prefix]
    for i, child in enumerate(shape, start=1):
        words.extend(_shape_words(child, prefix + (i,)))
    return words


def enumerate_trees(height: int, degree: int, nodes: int) -> List[Topology]:
    """Non-isomorphic rooted trees with height <= H, out-degree <= D, <= M vertices."""
    if min(height, degree, nodes) < 1:
        raise TopologyError("tree family bounds must be >= 1")
    return [make_tree(_shape_words(s)) for s in _tree_shapes(height, degree, nodes)]


def topology_family(spec: str) -> List[Topology]:
    """`lines:N`, `stars:N` or `trees:H,D,M` in increasing size."""
    spec = spec.strip()
    kind, _, bounds = spec.partition(":")
    try:
        values = [int(x) for x in bounds.split(",")]
    except ValueError:
        raise TopologyError(f"bad family bounds in {spec!r}") from None
    if kind == "lines" and len(values) == 1 and values[0] >= 1:
        return [make_line(n) for n in range(1, values[0] + 1)]
    if kind == "stars" and len(values) == 1 and values[0] >= 1:
        return [make_star(n) for n in range(0, values[0] + 1)]
    if kind == "trees" and len(values) == 3:
        return enumerate_trees(*values)
    raise TopologyError(f"unrecognised family {spec!r}")


# =============================================================================
# TREE UNFOLDING
# =============================================================================

def unfold_to_tree(g: Topology, v_f: str, n: int) -> Tuple[Topology, Dict[str, str]]:
    """
    Depth-n non-backtracking unfolding of g around v_f.

    The root ε is labelled v_f; its children are the neighbours of v_f; a
    vertex w.x of depth < n gets one child per neighbour of lambda(w.x) other
    than lambda(w). Children are numbered in canonical neighbour order.

    Returns:
        (tree topology, lambda mapping tree vertex id -> vertex of g)
    """
    if v_f not in g.index:
        raise TopologyError(f"unknown vertex {v_f}")
    if n < 0:
        raise TopologyError("unfolding depth must be >= 0")
    labels: Dict[Word, str] = {(): v_f}
    frontier: List[Word] = [()]
    for depth in range(n):
        nxt: List[Word] = []
        for w in frontier:
            here = labels[w]
            parent = labels[w[:-1]] if w else None
            kids = [u for u in g.neighbors(here) if u != parent]
            for i, u in enumerate(kids, start=1):
                child = w + (i,)
                labels[child] = u
                nxt.append(child)
        frontier = nxt
    tree = make_tree(labels.keys())
    return tree, {word_id(w): v for w, v in labels.items()}


def is_local_bijection(g: Topology, tree: Topology, labels: Dict[str, str], n: int) -> bool:
    """lambda maps Neigh(u) bijectively onto Neigh(lambda(u)) for every |u| < n."""
    for u in tree.vertices:
        if depth_of(u) >= n:
            continue
        image = [labels[x] for x in tree.neighbors(u)]
        if len(set(image)) != len(image) or set(image) != set(g.neighbors(labels[u])):
            return False
    return True


def lift_execution(protocol, execution, tree: Topology, labels: Dict[str, str]):
    """
    Replay an execution of a graph onto its tree unfolding.

    For original step i of n, every copy u of the acting vertex with
    depth(u) <= n-i performs the step (lexicographic order). A receiver
    whose state equals the original receiver's pre-state mirrors its choice;
    any other receiver takes its first reception in declaration order.

    Raises:
        LiftError: the lifted run does not end with the root in the final
            state of lambda(ε) (never expected for a valid unfolding)
    """
    from semantics import Configuration, Execution, Step, replay, replay_configurations

    n = len(execution.steps)
    g_configs = replay_configurations(protocol, execution)
    root_vertex = labels[ROOT]
    initial = Configuration(tree, tuple(execution.initial.state_of(labels[u]) for u in tree.vertices))

    current = list(initial.labels)
    t_index = tree.index
    steps: List[Step] = []
    for i, step in enumerate(execution.steps):
        reach = n - i
        before = g_configs[i]
        copies = [u for u in tree.vertices if labels[u] == step.vertex and depth_of(u) <= reach]
        copies.sort(key=word_of)
        chosen = dict(step.receivers)
        for u in copies:
            if current[t_index[u]] != step.transition.src:
                raise LiftError(f"copy {u} of {step.vertex} is not in {step.transition.src} at step {i}")
            receivers = []
            if step.transition.action.is_broadcast:
                m = step.transition.action.message
                for x in tree.neighbors(u):
                    state = current[t_index[x]]
                    if m not in protocol.receive_set(state):
                        continue
                    original = labels[x]
                    mirror = chosen.get(original)
                    if mirror is not None and before.state_of(original) == state:
                        receivers.append((x, mirror))
                    else:
                        receivers.append((x, protocol.receptions(state, m)[0]))
            lifted = Step(u, step.transition, tuple(receivers))
            steps.append(lifted)
            current[t_index[u]] = step.transition.dst
            for x, t in receivers:
                current[t_index[x]] = t.dst

    lifted_execution = Execution(initial, tuple(steps))
    final = replay(protocol, lifted_execution)
    expected = g_configs[-1].state_of(root_vertex)
    if final.state_of(ROOT) != expected:
        raise LiftError(f"root ends in {final.state_of(ROOT)}, expected {expected}")
    logger.debug("lifted %d steps onto %d tree vertices (%d steps)", n, len(tree), len(steps))
    return lifted_execution
