"""Smoke test for the gst_trees extension.

Build and run from the repository root:

    cargo build --release -p gst-python
    cp target/release/libgst_trees.so python/gst_trees.so
    python3 python/smoke.py
"""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import gst_trees as gt

# Tree with vertices a..l encoded as 0..11.
EDGES = [(0, 2), (2, 1), (2, 3), (3, 6), (6, 5), (5, 4), (5, 7), (3, 8), (8, 9), (9, 10), (9, 11)]


def main():
    g = gt.Topology.from_edges(12, EDGES)
    assert g.n == 12
    assert g.path_between(2, 5) == [2, 3, 6, 5]
    assert sorted(g.convex_hull([2, 5, 9])) == [2, 3, 5, 6, 8, 9]
    assert g.direction(3, 11) == 8

    p = gt.reference_tree(g)
    assert gt.validate(g, p) is None
    assert p.height() <= 2 * 3.59 + 2
    assert gt.centroid_decomposition(g).height() == 3

    child = next(v for v in range(12) if p.parents()[v] is not None)
    r = gt.rotate(g, p, child)
    assert gt.validate(g, r) is None
    assert gt.rotate(g, r, p.parents()[child]) == p

    try:
        gt.Topology.parse("3\n0 1\n0 1\n")
    except ValueError:
        pass
    else:
        raise AssertionError("duplicate edge accepted")

    path3 = gt.Topology.parse("3\n0 1\n1 2\n")
    assert gt.exact_opt(path3, [0, 2, 0]) == 1
    balanced = gt.SearchTree.from_parents([1, None, 1])
    assert gt.interleave_bound(path3, balanced, [0, 2, 0]) == (2, 1, -2)

    t = gt.TangoTree(g, debug_audit=True)
    seq = gt.gen_seq("uniform", g, 300, seed=7)
    for v in seq:
        cost, changes = t.search(v)
        assert cost >= 0 and changes >= 0
    t.audit()
    assert gt.validate(g, t.tree()) is None
    assert sorted(v for path in t.paths() for v in path) == list(range(12))

    report = json.loads(gt.run(g, seq, "tango"))
    assert report["schema"] == 1
    assert report["total_cost"] == t.total_cost
    static = json.loads(gt.run(g, seq, "static"))
    assert static["total_cost"] == sum(gt.static_baseline(g, seq))
    print("ok: tango cost %d, static cost %d, I = %d" % (t.total_cost, static["total_cost"], report["I"]))


if __name__ == "__main__":
    main()
