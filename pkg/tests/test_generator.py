import numpy as np
import pytest

from helpers import diamond
from stochroute import graph, risk, sota
from stochroute.distribution import expectation
from stochroute.generator import (
    T0_MAX,
    Family,
    GenSpec,
    derive_rho0,
    derive_tau,
    draw_arc,
    generate,
    generate_with_stats,
    grid_edges,
)


@pytest.mark.parametrize("family", list(Family))
def test_small_grid_shape(family):
    g = generate(GenSpec(2, family, 5))
    assert g.n_vertices == 4 and len(g.arcs) == 8
    assert (g.origin, g.destination) == (0, 3)


def test_width_10_counts():
    g = generate(GenSpec(10, Family.GENERIC, 1))
    assert g.n_vertices == 100 and len(g.arcs) == 360


@pytest.mark.slow
def test_width_100_counts():
    g = generate(GenSpec(100, Family.GENERIC, 1))
    assert g.n_vertices == 10_000 and len(g.arcs) == 39_600


def test_grid_edges_are_bidirected_neighbours():
    n = 4
    edges = grid_edges(n)
    assert len(set(edges)) == len(edges) == 4 * n * (n - 1)
    for u, v in edges:
        assert (v, u) in edges
        ru, cu = divmod(u, n)
        rv, cv = divmod(v, n)
        assert abs(ru - rv) + abs(cu - cv) == 1


@pytest.mark.parametrize("family", list(Family))
def test_same_seed_same_bytes(family):
    a = graph.save(generate(GenSpec(6, family, 11)))
    b = graph.save(generate(GenSpec(6, family, 11)))
    c = graph.save(generate(GenSpec(6, family, 12)))
    assert a == b and a != c


@pytest.mark.parametrize("family", list(Family))
@pytest.mark.parametrize("seed", range(3))
def test_generated_instances_validate(family, seed):
    g = generate(GenSpec(8, family, seed))
    assert graph.validate(g).warnings == []
    for a in g.arcs:
        assert not a.is_zero
        assert a.cost == int(a.cost) and 1 <= a.cost <= max(1, 2 * a.travel.min_support)
        assert a.travel.min_support <= T0_MAX + 1000 and abs(a.travel.pmf.sum() - 1) < 1e-12


def test_gamma_mean_band():
    spec = GenSpec(10, Family.GAMMA, 4)
    for i in range(len(grid_edges(10))):
        x, _ = draw_arc(spec, i)
        # the first draw of the per-arc stream is t0
        t0 = int(np.random.default_rng([spec.seed, i, 0]).integers(0, T0_MAX + 1))
        m = expectation(x) - t0
        assert 1 - 0.5 <= m <= 10 + 0.5


def test_redraws_are_counted():
    _, stats = generate_with_stats(GenSpec(10, Family.GENERIC, 3))
    assert stats.redraws == len(stats.redrawn_arcs)


def test_spec_checks_and_names():
    with pytest.raises(ValueError):
        GenSpec(1)
    with pytest.raises(ValueError):
        GenSpec(3, eps=0)
    assert GenSpec(40, Family.GAMMA).name == "g40G"
    assert GenSpec(10, "lognormal-long").name == "g10Ll"


def test_derive_tau_examples():
    r = sota.solve_sota(diamond())
    assert derive_tau(r, 0.5) == 2
    assert derive_tau(r, 0.95) == 3
    assert derive_tau(r, 1.0) == r.Z[0].max_support
    with pytest.raises(ValueError):
        derive_tau(r, 0.0)


def test_derive_rho0_examples():
    r = sota.solve_sota(diamond())
    g = diamond()
    q = graph.dijkstra_to_destination(g, "cost").path_from(g, 0)
    assert q.vertices == (0, 1, 3)
    xq = graph.path_distribution(g, q)
    rho = risk.prob_geq(4)
    assert derive_rho0(rho, r, xq, 0.5) == 0.25
    assert derive_rho0(rho, r, xq, 1.0) == rho(r.Z[0]) == 0.0
    assert derive_rho0(rho, r, xq, 0.0) == rho(xq) == 0.5
    with pytest.raises(ValueError):
        derive_rho0(rho, r, xq, 1.5)

