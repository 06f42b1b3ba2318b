import numpy as np
import pytest

from helpers import D1, D3, as_dict, diamond, random_instance, same_law
from stochroute import graph, oracle, sota
from stochroute.distribution import ZERO, from_pmf, leq_st, point_mass
from stochroute.errors import ZeroCircuit
from stochroute.graph import Arc, Instance


@pytest.fixture(scope="module")
def res():
    return sota.solve_sota(diamond())


def test_diamond_fixed_point(res):
    assert res.Z[3] == ZERO
    assert res.Z[1] == D1
    assert as_dict(res.Z[2]) == {1: 1.0}
    assert as_dict(res.Z[0]) == {2: 0.5, 3: 0.5}
    assert sota.fixed_point_residual(res) <= 1e-12


def test_single_arc():
    g = Instance(2, (Arc(0, 1, D3, 1.0),), 0, 1)
    assert sota.solve_sota(g).Z[0] == D3


def test_lower_bounds_on_diamond(res):
    lb = sota.extract_lower_bounds(res)
    g = diamond()
    for arcs in ([0, 1], [2, 3]):
        assert leq_st(lb[0], graph.path_distribution(g, graph.Path.from_arcs(g, arcs)))
    assert lb[3] == ZERO


def test_policy_arc(res):
    assert res.policy_arc(0, 3) == 2
    assert res.policy_arc(0, 2) == 0
    for t in range(8):
        assert res.policy_arc(1, t) == 1
    with pytest.raises(ValueError):
        res.policy_arc(3, 0)


def test_policy_table_covers_all_budgets(res):
    table = res.policy_table(0)
    assert table[0][0] == 0 and table[-1][1] == float("inf")
    for (lo, hi, _), (lo2, _, _) in zip(table, table[1:]):
        assert lo2 == hi + 1


def test_ub_lists_diamond(res):
    g = diamond()
    two = sota.build_upper_bound_lists(g, res, k=2)
    got = {e.path.vertices: as_dict(e.dist) for e in two[0]}
    assert got == {(0, 1, 3): {2: 0.5, 4: 0.5}, (0, 2, 3): {3: 1.0}}
    one = sota.build_upper_bound_lists(g, res, k=1)
    assert len(one[0]) == 1
    with pytest.raises(ValueError):
        sota.build_upper_bound_lists(g, res, k=0)


def test_ub_lists_chain():
    g = Instance(3, (Arc(0, 1, D1, 1), Arc(1, 2, D3, 2)), 0, 2)
    r = sota.solve_sota(g)
    lists = sota.build_upper_bound_lists(g, r, k=3)
    assert [e.path.vertices for e in lists[0]] == [(0, 1, 2)]
    assert [e.path.vertices for e in lists[1]] == [(1, 2)]
    assert lists[0][0].cost == 3


def test_zero_circuit_guard():
    z = point_mass(0)
    g = Instance(3, (Arc(0, 1, z, 0), Arc(1, 0, z, 0), Arc(1, 2, D1, 1)), 0, 2)
    with pytest.raises(ZeroCircuit):
        sota.solve_sota(g)


@pytest.mark.parametrize("seed", range(25))
def test_deterministic_collapse(seed):
    rng = np.random.default_rng(seed)
    g = random_instance(rng, min_one=True)
    g = Instance(g.n_vertices, tuple(Arc(a.tail, a.head, point_mass(a.travel.min_support), a.cost) for a in g.arcs),
                 g.origin, g.destination)
    r = sota.solve_sota(g)
    dist = graph.dijkstra_to_destination(g, "min_support").dist
    for v in range(g.n_vertices):
        if np.isfinite(dist[v]):
            assert r.Z[v] == point_mass(int(dist[v]))
        else:
            assert r.Z[v].is_infinite


@pytest.mark.parametrize("seed", range(40))
def test_oracle_equivalence(seed):
    rng = np.random.default_rng(1000 + seed)
    g = random_instance(rng, min_one=True)
    r = sota.solve_sota(g)
    tbar = sota.horizon_bounds(g)
    horizon = int(tbar[g.origin])
    F = oracle.oracle_sota(g, horizon)
    for v in range(g.n_vertices):
        got = [r.Z[v].cdf(t) if not r.Z[v].is_infinite else 0.0 for t in range(horizon + 1)]
        np.testing.assert_allclose(got, F[v], atol=1e-9, rtol=0)


@pytest.mark.parametrize("seed", range(40))
def test_properties_with_zero_mass(seed):
    """P(X = 0) > 0 is allowed as long as no arc is all-zero."""
    rng = np.random.default_rng(2000 + seed)
    g = random_instance(rng)
    r = sota.solve_sota(g)
    assert sota.fixed_point_residual(r) <= 1e-9
    tbar = sota.horizon_bounds(g)
    for v in range(g.n_vertices):
        if np.isfinite(tbar[v]):
            assert r.Z[v].cdf(int(tbar[v])) == pytest.approx(1.0, abs=1e-12)
    # Z_o below every o-d path
    for p in oracle.enumerate_elementary_paths(g):
        assert leq_st(r.Z[g.origin], oracle.path_law(g, p))
    # the proof bounds expansions by max_v T-bar_v per vertex, not by T-bar_o
    assert r.stats.expansions <= max(1, tbar[np.isfinite(tbar)].max()) * g.n_vertices
    lists = sota.build_upper_bound_lists(g, r, k=3)
    for v, entries in enumerate(lists):
        for e in entries:
            assert e.path.is_elementary and e.path.vertices[-1] == g.destination
            assert leq_st(r.Z[v], e.dist)
            assert same_law(e.dist, graph.path_distribution(g, e.path))


def test_add_cost_paths_appends_cheapest(res):
    g = diamond()
    lists = sota.add_cost_paths(g, sota.build_upper_bound_lists(g, res, k=1))
    assert (0, 1, 3) in [e.path.vertices for e in lists[0]]
    assert sota.lists_target(lists) == 3


def test_mass_limit():
    from stochroute.errors import BudgetExceeded

    x = from_pmf(1, np.full(50, 1 / 50))
    g = Instance(3, (Arc(0, 1, x, 1), Arc(1, 2, x, 1)), 0, 2)
    with pytest.raises(BudgetExceeded):
        sota.solve_sota(g, mass_limit=10)
