import math

import pytest

import sbmkit


def test_sample_and_bp_above_threshold():
    g, labels = sbmkit.sample_sbm(q=2, n=3000, c_in=5.0, c_out=1.0, seed=3)
    assert g.num_vertices == 3000
    assert len(labels) == 3000
    r = sbmkit.run_bp(g, q=2, c_in=5.0, c_out=1.0, init="random", seed=4)
    assert r["converged"]
    assert sbmkit.overlap(r["labels"], labels, 2) > 0.3


def test_regular_graph_leading_eigenvalue():
    g = sbmkit.sample_regular(n=200, d=4, seed=1)
    values = sbmkit.nb_spectrum(g, k=2)
    assert abs(values[0] - 3.0) < 1e-8


def test_triangle_graph():
    g = sbmkit.Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert sbmkit.count_triangles(g) == 1
    assert sorted(g.neighbors(0)) == [1, 2]


def test_bad_parameters_raise():
    with pytest.raises(ValueError):
        sbmkit.sample_sbm(q=1, n=10, c_in=1.0, c_out=1.0, seed=0)
    with pytest.raises(ValueError):
        sbmkit.Graph.from_edges(2, [(0, 0)])


def test_moments():
    assert sbmkit.second_moment_exact(6, 2, 2.0, 2.0) == pytest.approx(1.0, abs=1e-12)
    f_star, alpha = sbmkit.maximize_rate(1.0, 0.5, 2)
    assert f_star == 0.0
    assert alpha == pytest.approx([0.5] * 4)


def test_tree_and_bisection():
    curve = sbmkit.reconstruction_curve(2.0, 1.0, 2, [3], 100, 7)
    assert curve[0]["p_hat"] == 1.0
    g = sbmkit.sample_regular(n=40, d=3, seed=2)
    side, cut = sbmkit.min_bisection(g, seed=5)
    assert sum(side) == 20
    assert cut == sum(1 for u, v in g.edges() if side[u] != side[v])
    assert math.isfinite(cut)
