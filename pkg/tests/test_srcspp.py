import math

import numpy as np
import pytest

from helpers import diamond, random_instance
from stochroute import graph, oracle, risk, sota
from stochroute.distribution import point_mass
from stochroute.errors import PreconditionViolated
from stochroute.graph import Arc, Instance
from stochroute.srcspp import Status, solve_srcspp

TAU4 = risk.prob_geq(4)


def _prep(g, k=3):
    r = sota.solve_sota(g)
    lists = sota.add_cost_paths(g, sota.build_upper_bound_lists(g, r, k=k))
    return sota.extract_lower_bounds(r), lists


def _grid(g, rho, size=9):
    """rho0 values: every path risk, the midpoints, and one below the minimum."""
    risks = sorted({rho(oracle.path_law(g, p)) for p in oracle.enumerate_elementary_paths(g)})
    mids = [(a + b) / 2 for a, b in zip(risks, risks[1:])]
    full = [risks[0] - 0.5] + sorted(risks + mids)
    if len(full) <= size:
        return full
    return [full[i] for i in np.unique(np.linspace(0, len(full) - 1, size).round().astype(int))]


@pytest.mark.parametrize("rho0, cost, verts", [(0.1, 10, (0, 2, 3)), (0.6, 2, (0, 1, 3))])
def test_diamond(rho0, cost, verts):
    g = diamond()
    bounds, lists = _prep(g)
    res = solve_srcspp(g, TAU4, rho0, bounds, None, lists)
    assert res.status is Status.OPTIMAL
    assert res.cost == cost and res.path.vertices == verts
    assert res.lower_bound == cost and res.gap == 0.0
    assert res.risk <= rho0


def test_diamond_infeasible():
    res = solve_srcspp(diamond(), TAU4, -0.1)
    assert res.status is Status.INFEASIBLE
    assert res.final_ub == 13 and res.path is None and res.gap == math.inf


def test_time_limit_zero():
    res = solve_srcspp(diamond(), TAU4, 0.1, time_limit=0)
    assert res.status is Status.TIME_LIMIT
    assert res.lower_bound == 2 and res.cost is None and res.gap == math.inf


def test_zero_cost_zero_time_arc_rejected():
    g = Instance(2, (Arc(0, 1, point_mass(0), 0.0),), 0, 1)
    with pytest.raises(PreconditionViolated):
        solve_srcspp(g, TAU4, 0.5)


@pytest.mark.parametrize("seed", range(50))
def test_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    g = random_instance(rng)
    bounds, lists = _prep(g)
    for rho in (risk.prob_geq(6), risk.cvar(0.05), risk.value_at_risk(0.8)):
        last = math.inf
        for rho0 in _grid(g, rho):
            res = solve_srcspp(g, rho, rho0, bounds, None, lists)
            try:
                want, _ = oracle.oracle_srcspp(g, rho, rho0)
            except oracle.Infeasible:
                assert res.status is Status.INFEASIBLE
                assert res.final_ub == 1 + g.total_cost
                continue
            assert res.status is Status.OPTIMAL
            assert res.cost == pytest.approx(want, abs=1e-9)
            assert res.risk <= rho0
            assert graph.path_cost(g, res.path) == pytest.approx(res.cost)
            assert rho(graph.path_distribution(g, res.path)) == pytest.approx(res.risk, abs=1e-12)
            # a looser constraint never costs more
            assert res.cost <= last + 1e-9
            last = res.cost


def _positive_costs(g):
    return Instance(g.n_vertices, tuple(Arc(a.tail, a.head, a.travel, a.cost + 1) for a in g.arcs),
                    g.origin, g.destination)


@pytest.mark.parametrize("seed", range(25))
def test_pruning_switches_do_not_change_value(seed):
    """One test at a time: with both off the search runs over walks and need not stop."""
    rng = np.random.default_rng(300 + seed)
    g = _positive_costs(random_instance(rng, int(rng.integers(3, 8)), min_one=True))
    bounds, lists = _prep(g)
    rho = risk.prob_geq(6)
    for rho0 in _grid(g, rho)[::2]:
        ref = solve_srcspp(g, rho, rho0, bounds, None, lists)
        if ref.status is not Status.OPTIMAL:
            # without an incumbent, cost pruning alone walks every cycle below 1 + sum(c)
            continue
        for pf, pc in ((False, True), (True, False)):
            alt = solve_srcspp(g, rho, rho0, bounds, None, lists, prune_feasibility=pf, prune_cost=pc,
                               max_labels=200_000)
            assert alt.status is Status.OPTIMAL
            assert alt.cost == pytest.approx(ref.cost)
            assert alt.stats.labels_expanded >= ref.stats.labels_expanded


@pytest.mark.parametrize("seed", range(30))
def test_loose_constraint_gives_cheapest_path(seed):
    g = random_instance(np.random.default_rng(600 + seed))
    rho = risk.cvar(0.05)
    worst = max(rho(oracle.path_law(g, p)) for p in oracle.enumerate_elementary_paths(g))
    res = solve_srcspp(g, rho, worst)
    assert res.cost == graph.dijkstra_to_destination(g, "cost").dist[g.origin]


@pytest.mark.parametrize("seed", range(40))
def test_early_stop_bounds_bracket_optimum(seed):
    rng = np.random.default_rng(700 + seed)
    g = random_instance(rng, int(rng.integers(8, 13)), p_arc=0.5)
    rho = risk.prob_geq(6)
    grid = _grid(g, rho)
    rho0 = grid[len(grid) // 3]
    try:
        opt, _ = oracle.oracle_srcspp(g, rho, rho0)
    except oracle.Infeasible:
        opt = None
    for budget in (1, 3, 10, 40):
        res = solve_srcspp(g, rho, rho0, max_labels=budget, check_every=1)
        if opt is None:
            assert res.cost is None
            continue
        assert res.lower_bound <= opt + 1e-9
        if res.cost is not None:
            assert opt <= res.cost + 1e-9 and res.risk <= rho0
        if res.status is Status.OPTIMAL:
            assert res.cost == pytest.approx(opt)
