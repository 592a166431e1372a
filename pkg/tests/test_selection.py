import numpy as np
import pytest

from moead_astm.decomposition import simplex_lattice
from moead_astm.matching import (
    ContractViolation,
    many_one_match,
    stable_match_incomplete,
)
from moead_astm.selection import (
    _listed_by,
    SelectionContext,
    adaptive_set_r,
    build_preference_profile,
    matched_counts,
    representative_map,
    selection_amostm,
    selection_aoostm,
    selection_dra,
    selection_stm,
)

from oracles import adaptive_r_bruteforce, all_stable_one_one, left_optimal, perp


def ctx_of(weights, f, ell_max=20, normalized=None):
    f = np.asarray(f, dtype=float)
    return SelectionContext(np.asarray(weights, dtype=float),
                            f if normalized is None else normalized, f, ell_max)


def random_ctx(gen, m, n_sub, n_sol, ell_max=20):
    w = gen.dirichlet(np.ones(m), size=n_sub)
    f = gen.random((n_sol, m))
    return ctx_of(w, f, ell_max)


def dp(f, w):
    return max(abs(a) / max(b, 1e-6) for a, b in zip(f, w))


# ---- preference profile -------------------------------------------------------------

def test_subproblem_prefers_smaller_aggregation():
    ctx = ctx_of([[0.5, 0.5]], [[0.2, 0.2], [0.4, 0.4]])
    np.testing.assert_allclose(ctx.delta_p, [[0.4, 0.8]])
    prof = build_preference_profile(ctx)
    assert prof.left_lists[0] == [0, 1]


def test_colinear_solution_ranks_its_weight_first():
    w = [[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]]
    ctx = ctx_of(w, [[0.3, 0.3]])
    assert ctx.delta_x[0, 1] == pytest.approx(0.0, abs=1e-15)
    assert build_preference_profile(ctx).right_lists[0][0] == 1


def test_profile_shape_five_by_ten():
    gen = np.random.default_rng(0)
    ctx = random_ctx(gen, 2, 5, 10)
    prof = build_preference_profile(ctx, lengths=[3] * 10)
    assert len(prof.left_lists) == 5 and all(len(lst) == 10 for lst in prof.left_lists)
    assert len(prof.right_lists) == 10 and all(len(lst) <= 5 for lst in prof.right_lists)


def test_profile_matches_explicit_rankings():
    gen = np.random.default_rng(1)
    ctx = random_ctx(gen, 3, 7, 12)
    prof = build_preference_profile(ctx)
    w, f = ctx.weights.tolist(), ctx.normalized.tolist()
    for j in range(7):
        assert prof.left_lists[j] == sorted(range(12), key=lambda i: (dp(f[i], w[j]), i))
    for i in range(12):
        assert prof.right_lists[i] == sorted(range(7), key=lambda j: (perp(f[i], w[j]), j))


def test_bad_lengths_rejected():
    ctx = random_ctx(np.random.default_rng(2), 2, 3, 4)
    for bad in ("short", [0, 1, 1, 1], [1, 1, 1], [4, 1, 1, 1]):
        with pytest.raises(ContractViolation):
            build_preference_profile(ctx, lengths=bad)


def test_rankings_scale_invariant():
    gen = np.random.default_rng(3)
    ctx = random_ctx(gen, 3, 10, 25)
    for c in (0.5, 4.0, 1024.0):
        scaled = SelectionContext(ctx.weights, ctx.normalized * c, ctx.raw, ctx.ell_max)
        np.testing.assert_array_equal(scaled.sub_order, ctx.sub_order)
        np.testing.assert_array_equal(scaled.sol_order, ctx.sol_order)


def test_solution_side_prefix_matches_full_sort():
    gen = np.random.default_rng(4)
    ctx = random_ctx(gen, 2, 30, 60, ell_max=7)
    np.testing.assert_array_equal(ctx.sol_top, ctx.sol_order[:, :7])
    # heavy ties: many identical vectors
    f = np.repeat(gen.random((3, 2)), 10, axis=0)
    tied = ctx_of(simplex_lattice(2, 9), f, ell_max=4)
    np.testing.assert_array_equal(tied.sol_top, tied.sol_order[:, :4])


# ---- adaptive list length -------------------------------------------------------------

def test_nondominated_own_representatives_get_full_lists():
    w = simplex_lattice(2, 4)
    f = w.copy()  # each solution sits on its own weight, all mutually nondominated
    ctx = ctx_of(w, f, ell_max=5)
    rep = representative_map(ctx)
    np.testing.assert_array_equal(rep.representative, np.arange(5))
    np.testing.assert_array_equal(adaptive_set_r(ctx), [5] * 5)


def test_ell_max_equal_to_m_gives_m():
    gen = np.random.default_rng(5)
    ctx = random_ctx(gen, 3, 10, 20, ell_max=3)
    np.testing.assert_array_equal(adaptive_set_r(ctx), [3] * 20)


def test_ell_max_below_m_is_an_error():
    with pytest.raises(ContractViolation):
        random_ctx(np.random.default_rng(6), 3, 10, 20, ell_max=2)


def test_dominating_a_far_representative_stops_the_list():
    w = [[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]]
    f = [
        [0.1, 0.9],    # nearest w3, then w2, then w1
        [2.5, 0.95],   # nearest w1 and dominated by the first solution
        [0.5, 0.5],
        [0.3, 0.7],
    ]
    ctx = ctx_of(w, f)
    r = adaptive_set_r(ctx)
    assert r[0] == 2
    expected = adaptive_r_bruteforce(w, f, f, np.min(f, axis=0).tolist(), 20)
    assert r.tolist() == expected


def test_adaptive_r_matches_bruteforce_small():
    gen = np.random.default_rng(7)
    for _ in range(60):
        m = int(gen.integers(2, 4))
        n_sub = int(gen.integers(m, 12))
        n_sol = int(gen.integers(n_sub, 25))
        ell = int(gen.integers(m, 21))
        ctx = random_ctx(gen, m, n_sub, n_sol, ell_max=ell)
        r = adaptive_set_r(ctx)
        assert np.all(r >= m) and np.all(r <= ell)
        expected = adaptive_r_bruteforce(ctx.weights.tolist(), ctx.normalized.tolist(),
                                         ctx.raw.tolist(), ctx.ideal.tolist(), ell)
        assert r.tolist() == expected


# ---- one-one selection ----------------------------------------------------------------

def sequential_oracle(ctx, r):
    """First level: stable matching over truncated lists. Second level:
    complete lists over what is left. Both by exhaustive enumeration."""
    w, f = ctx.weights.tolist(), ctx.normalized.tolist()
    n_sub, n_sol = len(w), len(f)
    left = [sorted(range(n_sol), key=lambda i: (dp(f[i], w[j]), i)) for j in range(n_sub)]
    right = [sorted(range(n_sub), key=lambda j: (perp(f[i], w[j]), j)) for i in range(n_sol)]
    first = left_optimal(left, all_stable_one_one(left, right, list(r)))
    pu = [j for j in range(n_sub) if j not in {p for p, _ in first}]
    su = [i for i in range(n_sol) if i not in {x for _, x in first}]
    if not pu:
        return set(first)
    l2 = [[su.index(i) for i in left[j] if i in su] for j in pu]
    r2 = [[pu.index(j) for j in right[i] if j in pu] for i in su]
    second = left_optimal(l2, all_stable_one_one(l2, r2, [len(pu)] * len(su)))
    return set(first) | {(pu[p], su[x]) for p, x in second}


def test_aoostm_matches_sequential_oracle():
    gen = np.random.default_rng(8)
    for _ in range(40):
        ctx = random_ctx(gen, 2, 5, 10)
        r = adaptive_set_r(ctx)
        m = selection_aoostm(ctx, np.random.default_rng(0))
        assert set(m.pairs) == sequential_oracle(ctx, r.tolist())


def test_aoostm_is_perfect_on_subproblems():
    gen = np.random.default_rng(9)
    for _ in range(30):
        n_sub = int(gen.integers(2, 30))
        ctx = random_ctx(gen, 3, n_sub, int(gen.integers(n_sub, 2 * n_sub + 1)))
        m = selection_aoostm(ctx, gen)
        assert sorted(p for p, _ in m.pairs) == list(range(n_sub))
        assert len({x for _, x in m.pairs}) == n_sub


def test_aoostm_second_level_noop_when_first_is_perfect():
    w = simplex_lattice(2, 4)
    ctx = ctx_of(w, w.copy(), ell_max=5)
    m = selection_aoostm(ctx, np.random.default_rng(0))
    assert m.pairs == {(j, j) for j in range(5)}


def test_aoostm_identical_solutions():
    ctx = ctx_of(simplex_lattice(2, 5), np.full((8, 2), 0.4))
    m = selection_aoostm(ctx, np.random.default_rng(1))
    assert len(m) == 6 and len({x for _, x in m.pairs}) == 6


def test_unit_lists_match_nearest_subproblem():
    gen = np.random.default_rng(10)
    ctx = random_ctx(gen, 2, 8, 20)
    prof = build_preference_profile(ctx, lengths=[1] * 20)
    m = stable_match_incomplete(prof, gen)
    nearest = ctx.delta_x.argmin(axis=1)
    for p, x in m.pairs:
        assert p == nearest[x]


@pytest.mark.parametrize("fn", [selection_aoostm, selection_amostm, selection_stm])
def test_fewer_solutions_than_subproblems(fn):
    ctx = random_ctx(np.random.default_rng(11), 2, 5, 4)
    with pytest.raises(ContractViolation):
        fn(ctx, np.random.default_rng(0))


def test_stm_is_perfect_and_stable():
    gen = np.random.default_rng(12)
    ctx = random_ctx(gen, 2, 10, 20)
    m = selection_stm(ctx, gen)
    assert sorted(p for p, _ in m.pairs) == list(range(10))


# ---- many-one selection -----------------------------------------------------------------

def test_amostm_fills_quota():
    gen = np.random.default_rng(13)
    for _ in range(20):
        ctx = random_ctx(gen, 2, 10, int(gen.integers(10, 25)))
        m = selection_amostm(ctx, gen)
        assert len(m) == 10
        xs = [x for _, x in m.pairs]
        assert len(xs) == len(set(xs))


def test_amostm_wraps_many_one_engine():
    gen = np.random.default_rng(14)
    ctx = random_ctx(gen, 2, 6, 12)
    r = adaptive_set_r(ctx)
    expected = many_one_match(build_preference_profile(ctx, r), 6, np.random.default_rng(3))
    assert selection_amostm(ctx, np.random.default_rng(3)) == expected


def test_amostm_can_leave_a_subproblem_empty():
    w = [[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]]
    f = [[0.9, 0.05], [0.8, 0.1], [0.45, 0.5], [0.5, 0.45]]
    ctx = ctx_of(w, f)
    m = selection_amostm(ctx, np.random.default_rng(0), lengths=[1] * 4)
    counts = matched_counts(m, 3)
    assert counts[2] == 0 and counts.sum() == 3


def test_dra_keeps_each_subproblems_best():
    gen = np.random.default_rng(15)
    ctx = random_ctx(gen, 2, 5, 10)
    m = selection_dra(ctx)
    assert m.pairs == {(j, int(ctx.delta_p[j].argmin())) for j in range(5)}


def test_dra_concentrates_on_two_solutions():
    # two strong solutions near the extremes win every subproblem
    w = simplex_lattice(2, 4)
    f = np.array([[0.0, 0.05], [0.05, 0.0]] + [[0.5 + 0.1 * k, 0.5 + 0.1 * k] for k in range(8)])
    m = selection_dra(ctx_of(w, f))
    assert len({x for _, x in m.pairs}) == 2


def test_listed_by_ranks_match_full_ranking():
    gen = np.random.default_rng(31)
    for coarse in (True, False):
        raw = gen.random((40, 2))
        if coarse:
            raw = np.round(raw, 1)  # many exact ties
        ctx = SelectionContext(gen.dirichlet(np.ones(2), 25), raw, raw, 6)
        right = [row[:4] for row in ctx.sol_order.tolist()]
        lists, ranks = _listed_by(ctx, right)
        for p in range(ctx.n_sub):
            expected = sorted((x for x in range(ctx.n_sol) if p in right[x]),
                              key=lambda x: ctx.sub_rank[p, x])
            assert lists[p] == expected
            assert ranks[p] == {x: int(ctx.sub_rank[p, x]) for x in expected}
