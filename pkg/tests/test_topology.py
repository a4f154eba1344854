"""
Topology test suite.

Tests for:
1. Standard families and literal parsing
2. Tree words, bounded tree enumeration, adjacency files
3. Tree unfolding and its local bijection
4. Lifting a graph execution onto the unfolding

Run: python tests/test_topology.py
"""

import sys

from harness import check, model_path, run_suite

from protocol_model import load_protocol
from semantics import brute_force_cover, replay
from topology import (
    ROOT,
    TopologyError,
    enumerate_trees,
    is_local_bijection,
    lift_execution,
    load_adjacency,
    make_clique,
    make_line,
    make_star,
    make_tree,
    parse_topology,
    parse_word,
    topology_family,
    unfold_to_tree,
)


def expect_topology_error(fn) -> bool:
    try:
        fn()
    except TopologyError:
        return True
    return False


def test_families():
    line = make_line(3)
    check("line:3 vertices", line.vertices == ("v1", "v2", "v3"))
    check("line:3 is a path", line.adjacent("v1", "v2") and not line.adjacent("v1", "v3"))
    clique = make_clique(4)
    check("clique:4 degree 3 everywhere", all(clique.degree(v) == 3 for v in clique.vertices))
    star = make_star(2)
    check("star:2 vertices", star.vertices == (ROOT, "1", "2"))
    check("star:2 is a star", star.is_star and star.leaves_of_star() == ("1", "2"))
    check("star:0 is the root alone", make_star(0).vertices == (ROOT,))
    check("line:3 is not a star", not line.is_star)
    check("networkx view agrees", clique.graph.number_of_edges() == 6)


def test_literals():
    check("line literal", parse_topology("line:5").name == "line:5")
    check("clique literal", len(parse_topology("clique:3")) == 3)
    tree = parse_topology("tree:{ε,1,2,1.1}")
    check("tree literal", tree.vertices == (ROOT, "1", "1.1", "2"), str(tree.vertices))
    check("tree name rebuilds the tree", parse_topology(tree.name) == tree)
    check("undotted words", parse_word("12") == (1, 2) and parse_word("1.12") == (1, 12))
    check("make_tree accepts 11", make_tree(["ε", "1", "11"]).vertices == (ROOT, "1", "1.1"))
    check("missing root rejected", expect_topology_error(lambda: make_tree(["1"])))
    check("non prefix-closed rejected", expect_topology_error(lambda: make_tree(["ε", "1.1"])))
    check("garbage literal rejected", expect_topology_error(lambda: parse_topology("ring:3")))


def test_adjacency_and_families():
    g = load_adjacency("# triangle minus an edge\nedge a b\nedge b c\nvertex d\n", name="g")
    check("adjacency vertices", g.vertices == ("a", "b", "c", "d"))
    check("isolated vertex", g.degree("d") == 0)
    check("self-loop rejected", expect_topology_error(lambda: load_adjacency("edge a a\n")))
    check("lines:3", [t.name for t in topology_family("lines:3")] == ["line:1", "line:2", "line:3"])
    check("stars:2", [t.name for t in topology_family("stars:2")] == ["star:0", "star:1", "star:2"])
    trees = enumerate_trees(1, 2, 3)
    check("height 1, degree 2, 3 nodes: 3 trees", len(trees) == 3, str([t.name for t in trees]))
    trees = enumerate_trees(2, 2, 4)
    sizes = sorted(len(t) for t in trees)
    check("trees up to 4 nodes with height 2", sizes == [1, 2, 3, 3, 4, 4], str(sizes))


def test_unfold_to_tree():
    clique = make_clique(3)
    tree, labels = unfold_to_tree(clique, "v1", 2)
    check("clique:3 depth 2 has 5 vertices", len(tree) == 5, str(tree.vertices))
    check("root labelled v1", labels[ROOT] == "v1")
    check("children are v2, v3", (labels["1"], labels["2"]) == ("v2", "v3"))
    check("no backtracking to the parent", labels["1.1"] == "v3" and labels["2.1"] == "v2")
    check("local bijection", is_local_bijection(clique, tree, labels, 2))

    line_tree, line_labels = unfold_to_tree(make_line(2), "v1", 3)
    check("line:2 depth 3 is {ε,1}", set(line_tree.vertices) == {ROOT, "1"})
    check("line:2 local bijection", is_local_bijection(make_line(2), line_tree, line_labels, 3))

    mid_tree, mid_labels = unfold_to_tree(make_line(3), "v2", 1)
    check("middle of line:3 gets two children", len(mid_tree) == 3)
    check("unknown vertex rejected", expect_topology_error(lambda: unfold_to_tree(clique, "v9", 1)))


def test_lift_running_example():
    p = load_protocol(model_path("p.bp"))
    clique = make_clique(3)
    verdict = brute_force_cover(p, "q5", clique)
    check("P covers q5 on clique:3", verdict.is_coverable)
    execution = verdict.witness
    tree, labels = unfold_to_tree(clique, verdict.vertex, len(execution))
    lifted = lift_execution(p, execution, tree, labels)
    final = replay(p, lifted)
    check("lifted run replays with the root at q5", final.state_of(ROOT) == "q5")
    check("lifted run acts only on tree vertices", all(s.vertex in tree.index for s in lifted.steps))


def run_all_tests():
    return run_suite("TOPOLOGY TEST SUITE", [
        ("Standard families", test_families),
        ("Literals and words", test_literals),
        ("Adjacency files and families", test_adjacency_and_families),
        ("Tree unfolding", test_unfold_to_tree),
        ("Lifting onto the unfolding", test_lift_running_example),
    ])


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
