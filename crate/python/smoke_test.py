"""Smoke test for the mmcut_py extension module.

Build first:  pip install --no-build-isolation ./crates/py
Then run:     python python/smoke_test.py
"""

import networkx as nx

import mmcut_py as mc


def cycle(n):
    return mc.Graph(n, [(i, (i + 1) % n, 1.0) for i in range(n)])


def main():
    g = cycle(6)
    assert (g.n, g.m) == (6, 6)
    assert g.cut([0, 1, 2]) == 2.0

    parts, value = mc.exact_minmax_kpart(g, 3)
    assert value == 2.0 and len(parts) == 3

    parts, report = mc.minmax_kpart(g, 3, backend="exact", eps=0.2, seed=1)
    assert sorted(v for p in parts for v in p) == list(range(6))
    worst, biggest = mc.evaluate(g, parts)
    assert worst == report["max_cut"]
    assert biggest <= report["size_cap"]

    # cross-check the cut of each part with networkx
    nxg = nx.cycle_graph(6)
    for p in parts:
        if p and len(p) < 6:
            assert nx.cut_size(nxg, p) == g.cut(p)

    parts, report = mc.minmax_multiway(g, [0, 3], seed=2)
    owner = {v: i for i, p in enumerate(parts) for v in p}
    assert owner[0] != owner[3]

    sol = mc.small_set_expansion(g, 0.5)
    assert sol["report"]["boundary"] == 2.0

    gap = mc.star_gap(3)
    assert gap["integral"] == 2.0 and gap["max_residual"] < 1e-9

    tree, labels = mc.Graph.from_edgelist("a b\nb c 2\n")
    assert labels == ["a", "b", "c"] and tree.edges() == [(0, 1, 1.0), (1, 2, 2.0)]

    try:
        mc.Graph(2, [(0, 5, 1.0)])
    except ValueError:
        pass
    else:
        raise AssertionError("bad edge accepted")

    print("smoke test ok")


if __name__ == "__main__":
    main()
