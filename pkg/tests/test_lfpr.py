import numpy as np
import pytest

from conftest import random_colored_graph
from fairpr.graph import from_edges
from fairpr.lfpr import (
    PolicyKind,
    build_fair_jump,
    build_neighborhood_model,
    build_residual_model,
    build_targeted_model,
    lfpr_pagerank,
    make_policy,
    optimize_residuals,
    residual_decompose,
    targeted_jump,
    targeted_lfpr,
)
from fairpr.pagerank import pagerank, power_iterate, standard_transition

KINDS = (PolicyKind.NEIGHBORHOOD, PolicyKind.UNIFORM, PolicyKind.PROPORTIONAL)


def make_star(out_red, out_blue):
    # node 0 points at out_red red nodes then out_blue blue nodes
    n = 1 + out_red + out_blue
    red = np.zeros(n, dtype=bool)
    red[1 : 1 + out_red] = True
    edges = [(0, v) for v in range(1, n)] + [(1, 0)]
    return from_edges(n, edges, red)


def test_residual_worked_example_is_exact():
    # one red and four blue out-neighbors at phi = 1/2: the node keeps
    # per-edge share 1/8 and owes 3/8 to the red side
    g = make_star(1, 4)
    dec = residual_decompose(g, 0.5)
    assert dec.rho_red[0] == 0.125
    assert dec.delta_red[0] == 0.375
    assert bool(dec.short_red[0]) is True
    assert dec.delta_blue[0] == 0.0


def test_decomposition_row_identities():
    rng = np.random.default_rng(0)
    for phi in (0.2, 0.5, 0.8):
        g = random_colored_graph(rng, 40, sink_frac=0.2)
        dec = residual_decompose(g, phi)
        base_red = dec.base @ g.red.astype(float)
        base_blue = dec.base @ (~g.red).astype(float)
        np.testing.assert_allclose(base_red + dec.delta_red, phi, atol=1e-12)
        np.testing.assert_allclose(base_blue + dec.delta_blue, 1.0 - phi, atol=1e-12)
        assert dec.delta_red.min() >= 0.0 and dec.delta_blue.min() >= 0.0
        # a node is short on exactly one side
        assert not (dec.short_red & dec.short_blue & ~g.sinks).any()


def test_exact_ratio_row_needs_no_residual():
    # one red + one blue neighbor at phi = 1/2 is already locally fair
    g = make_star(1, 1)
    dec = residual_decompose(g, 0.5)
    assert not dec.short_red[0]
    assert dec.delta_blue[0] == 0.0
    assert dec.rho_blue[0] == 0.5


def test_fair_jump_masses():
    rng = np.random.default_rng(1)
    g = random_colored_graph(rng, 23)
    for phi in (0.1, 0.6):
        v = build_fair_jump(g, phi)
        assert v.sum() == pytest.approx(1.0, abs=1e-12)
        assert v @ g.red == pytest.approx(phi, abs=1e-12)


def test_neighborhood_model_equals_decomposition_route():
    # spreading each node's residual over its own-side neighbors must
    # reproduce the directly built per-neighbor shares
    rng = np.random.default_rng(2)
    g = random_colored_graph(rng, 30)
    phi = 0.4
    dense = build_neighborhood_model(g, phi).to_dense()
    dec = residual_decompose(g, phi)
    alt = dec.base.toarray()
    for i in range(g.n):
        nbrs = g.out_neighbors(i)
        red_nbrs = nbrs[g.red[nbrs]]
        blue_nbrs = nbrs[~g.red[nbrs]]
        if red_nbrs.size and blue_nbrs.size:
            if dec.short_red[i]:
                alt[i, red_nbrs] += dec.delta_red[i] / red_nbrs.size
            else:
                alt[i, blue_nbrs] += dec.delta_blue[i] / blue_nbrs.size
            np.testing.assert_allclose(dense[i], alt[i], atol=1e-14)


@pytest.mark.parametrize("kind", KINDS)
def test_every_row_is_phi_fair(kind):
    rng = np.random.default_rng(3)
    for phi in (0.25, 0.5, 0.75):
        g = random_colored_graph(rng, 35, sink_frac=0.15)
        p_o = pagerank(standard_transition(g))
        model = build_residual_model(g, phi, make_policy(kind, g, p_o=p_o))
        model.validate()
        np.testing.assert_allclose(model.row_masses(g.red), phi, atol=1e-12)
        np.testing.assert_allclose(model.row_sums(), 1.0, atol=1e-12)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("phi", [0.1, 0.5, 0.9])
def test_lfpr_pagerank_hits_target_exactly(kind, phi):
    rng = np.random.default_rng(4)
    for _ in range(3):
        g = random_colored_graph(rng, int(rng.integers(10, 80)), sink_frac=0.1)
        p_o = pagerank(standard_transition(g))
        p = lfpr_pagerank(g, phi, make_policy(kind, g, p_o=p_o))
        assert p.sum() == pytest.approx(1.0, abs=1e-10)
        assert p @ g.red == pytest.approx(phi, abs=1e-10)


def test_lfpr_matches_dense_fixed_point():
    rng = np.random.default_rng(5)
    g = random_colored_graph(rng, 18, sink_frac=0.2)
    phi = 0.35
    policy = make_policy(PolicyKind.UNIFORM, g)
    model = build_residual_model(g, phi, policy)
    v = build_fair_jump(g, phi)
    gamma = 0.15
    a = np.eye(g.n) - (1.0 - gamma) * model.to_dense()
    expected = gamma * np.linalg.solve(a.T, v)
    np.testing.assert_allclose(power_iterate(model, v), expected, atol=1e-11)


def test_make_policy_validation():
    g = from_edges(3, [(0, 1), (1, 2), (2, 0)], [True, False, False])
    with pytest.raises(ValueError):
        make_policy(PolicyKind.PROPORTIONAL, g)
    with pytest.raises(ValueError):
        make_policy(PolicyKind.OPTIMIZED, g)
    with pytest.raises(ValueError):
        make_policy(PolicyKind.OPTIMIZED, g, x=np.array([1.0, 0, 0]), y=np.array([0, 0.5, 0.5]) * 2)
    with pytest.raises(ValueError):
        # x supported off the red group
        make_policy(PolicyKind.OPTIMIZED, g, x=np.array([0, 1.0, 0]), y=np.array([0, 0.5, 0.5]))
    p = make_policy(PolicyKind.OPTIMIZED, g, x=np.array([1.0, 0, 0]), y=np.array([0, 0.5, 0.5]))
    assert p.kind is PolicyKind.OPTIMIZED


def test_make_policy_accepts_string_kinds():
    g = from_edges(3, [(0, 1), (1, 2), (2, 0)], [True, False, False])
    assert make_policy("uniform", g).kind is PolicyKind.UNIFORM


def test_optimized_search_dominates_fixed_policies():
    rng = np.random.default_rng(6)
    for seed in range(3):
        g = random_colored_graph(np.random.default_rng(20 + seed), 50)
        phi = 0.45
        p_o = pagerank(standard_transition(g))
        loss_u = float(np.sum((lfpr_pagerank(g, phi, make_policy("uniform", g)) - p_o) ** 2))
        loss_p = float(
            np.sum((lfpr_pagerank(g, phi, make_policy("proportional", g, p_o=p_o)) - p_o) ** 2)
        )
        res = optimize_residuals(g, phi, p_o=p_o, iterations=25, directions=16, seed=seed)
        assert res.loss <= min(loss_u, loss_p) + 1e-12
        p = lfpr_pagerank(g, phi, res.policy)
        assert p @ g.red == pytest.approx(phi, abs=1e-9)
        assert res.penalty_residual <= 1e-6


def test_optimized_search_is_deterministic():
    rng = np.random.default_rng(7)
    g = random_colored_graph(rng, 30)
    a = optimize_residuals(g, 0.4, iterations=10, directions=8, seed=3)
    b = optimize_residuals(g, 0.4, iterations=10, directions=8, seed=3)
    assert a.loss == b.loss
    np.testing.assert_array_equal(a.policy.x, b.policy.x)
    np.testing.assert_array_equal(a.policy.y, b.policy.y)


def test_optimized_search_respects_dense_cap():
    rng = np.random.default_rng(8)
    g = random_colored_graph(rng, 25)
    with pytest.raises(ValueError):
        optimize_residuals(g, 0.5, dense_cap=10)


@pytest.mark.parametrize("kind", ["neighborhood", "uniform", "proportional"])
def test_targeted_share_is_exact(kind):
    rng = np.random.default_rng(9)
    for phi in (0.3, 0.5, 0.8):
        g = random_colored_graph(rng, 40, sink_frac=0.1)
        s = rng.choice(g.n, size=12, replace=False)
        s_r = s[g.red[s]]
        if s_r.size == 0 or s_r.size == s.size:
            continue
        p = targeted_lfpr(g, s, s_r, phi, kind=kind)
        pr_s = p[s].sum()
        assert pr_s > 0
        assert p[s_r].sum() == pytest.approx(phi * pr_s, abs=1e-12)


def test_targeted_model_rows_split_target_mass():
    rng = np.random.default_rng(10)
    g = random_colored_graph(rng, 30, sink_frac=0.2)
    s = np.arange(10)
    s_r = s[g.red[s]]
    if s_r.size == 0 or s_r.size == s.size:
        s_r = s[:1] if s_r.size == 0 else s_r[:-1]
        pytest.skip("degenerate random draw")
    phi = 0.6
    s_mask = np.isin(np.arange(g.n), s)
    sr_mask = np.isin(np.arange(g.n), s_r)
    model = build_targeted_model(g, s_mask, sr_mask, phi, "uniform")
    model.validate()
    in_s = model.row_masses(s_mask)
    in_sr = model.row_masses(sr_mask)
    np.testing.assert_allclose(in_sr, phi * in_s, atol=1e-13)
    # rows keep their out-of-target entries from the standard walk
    std = standard_transition(g).to_dense()
    dense = model.to_dense()
    nonsink = ~g.sinks
    np.testing.assert_allclose(dense[nonsink][:, ~s_mask], std[nonsink][:, ~s_mask], atol=1e-14)


def test_targeted_jump_masses():
    rng = np.random.default_rng(11)
    g = random_colored_graph(rng, 20)
    s_mask = np.zeros(g.n, dtype=bool)
    s_mask[:8] = True
    sr_mask = s_mask & g.red
    if not sr_mask.any() or not (s_mask & ~g.red).any():
        pytest.skip("degenerate random draw")
    v = targeted_jump(g, s_mask, sr_mask, 0.7)
    assert v.sum() == pytest.approx(1.0, abs=1e-12)
    assert v[s_mask].sum() == pytest.approx(8 / g.n, abs=1e-12)
    assert v[sr_mask].sum() == pytest.approx(0.7 * 8 / g.n, abs=1e-12)


def test_targeted_validation_errors():
    g = from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)], [True, True, False, False])
    with pytest.raises(ValueError):
        targeted_lfpr(g, [], [0], 0.5)
    with pytest.raises(ValueError):
        targeted_lfpr(g, [0, 1], [], 0.5)
    with pytest.raises(ValueError):
        targeted_lfpr(g, [0, 1], [2], 0.5)
    with pytest.raises(ValueError):
        targeted_lfpr(g, [0, 1], [0, 1], 0.5)
    with pytest.raises(ValueError):
        targeted_lfpr(g, [0, 9], [0], 0.5)
    with pytest.raises(ValueError):
        targeted_lfpr(g, [0, 1], [0], 0.5, kind="optimized")


@pytest.mark.parametrize("phi", [0.0, 1.0, -0.2, 1.5])
def test_phi_out_of_range_rejected(phi):
    g = from_edges(3, [(0, 1), (1, 2), (2, 0)], [True, False, False])
    with pytest.raises(ValueError):
        lfpr_pagerank(g, phi, make_policy("uniform", g))
