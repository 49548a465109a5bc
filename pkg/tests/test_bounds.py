from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from bellforge.behavior import DeterministicStrategy, enumerate_deterministic, ns_box
from bellforge.bounds import (
    biseparable_bound_tripartite,
    bipartitions,
    count_potentially_positive_pairs,
    grouped_bound_sampled,
    groupings,
    local_bound,
)
from bellforge.functional import (
    BellFunctional,
    build_centered,
    build_m_separable,
    build_mu_family,
    build_symmetric,
    chsh_variant,
    correlator_chsh,
    evaluate,
    lift,
    tripartite_seed,
)

from test_behavior import _ns_polytope_equalities


def _brute_local(f):
    return max(evaluate(f, s.behavior()) for s in enumerate_deterministic(f.n_parties))


def test_correlator_chsh_local_bound_is_two():
    cert = local_bound(correlator_chsh())
    assert cert.value == 2
    assert evaluate(correlator_chsh(), cert.witness.behavior()) == 2


def test_local_bound_witness_and_tie_break():
    cert = local_bound(chsh_variant().functional)
    assert cert.value == 0
    assert cert.witness == DeterministicStrategy(((0, 0), (0, 0)))


coef = st.fractions(-3, 3, max_denominator=7)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.just(n),
    st.dictionaries(st.tuples(st.tuples(*[st.integers(0, 1)] * n), st.tuples(*[st.integers(0, 1)] * n)),
                    coef, max_size=12))))
def test_local_bound_matches_brute_force(arg):
    n, terms = arg
    f = BellFunctional(n, terms)
    cert = local_bound(f)
    assert cert.value == _brute_local(f)
    assert evaluate(f, cert.witness.behavior()) == cert.value


def test_local_cap():
    with pytest.raises(ValueError):
        local_bound(build_symmetric(chsh_variant(), 9))


def _lp_biseparable(f):
    """Oracle: per bipartition and single-party response, maximize over the NS polytope by LP."""
    A, b = _ns_polytope_equalities()
    best = -np.inf
    for pair, single in [((0, 1), 2), ((0, 2), 1), ((1, 2), 0)]:
        for s in enumerate_deterministic(1):
            c = np.zeros(16)
            for (x, a), v in f.terms.items():
                if s.outputs[0][x[single]] != a[single]:
                    continue
                xi = 2 * x[pair[0]] + x[pair[1]]
                ai = 2 * a[pair[0]] + a[pair[1]]
                c[xi * 4 + ai] += float(v)
            res = linprog(-c, A_eq=A, b_eq=b, bounds=[(0, None)] * 16, method="highs")
            best = max(best, -res.fun)
    return best


@pytest.mark.parametrize("f", [
    build_symmetric(chsh_variant(), 3),
    build_centered(chsh_variant(), 3),
    tripartite_seed().functional,
    build_mu_family(1, 1, 0),
    build_symmetric(correlator_chsh(), 3),
], ids=["sym", "centered", "tripartite", "mu110", "correlator-lift"])
def test_biseparable_matches_lp(f):
    cert = biseparable_bound_tripartite(f)
    assert float(cert.value) == pytest.approx(_lp_biseparable(f), abs=1e-9)
    assert evaluate(f, cert.witness) == cert.value
    assert cert.sample_count == 288


def test_biseparable_detects_pr_box_on_a_pair():
    f = lift(chsh_variant().functional, 3, (0, 1))
    cert = biseparable_bound_tripartite(f)
    assert cert.value == Fraction(1, 2)
    assert cert.grouping == ((0, 1), (2,))


def test_bipartitions():
    assert len(bipartitions(3)) == 3
    assert len(bipartitions(5)) == 2**4 - 1


def _stirling2(n, k):
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


@pytest.mark.parametrize("n,m", [(3, 2), (4, 2), (5, 3), (6, 4)])
def test_groupings_count(n, m):
    gs = list(groupings(n, m))
    assert len(gs) == _stirling2(n, m)
    assert len(set(gs)) == len(gs)


@pytest.mark.parametrize("n,m", [(4, 2), (4, 3), (5, 3), (6, 3), (6, 4)])
def test_most_pairs_in_one_group(n, m):
    best = max(count_potentially_positive_pairs(n, g) for g in groupings(n, m))
    assert best == comb(n + 1 - m, 2)


def test_sampled_bound_reproducible_and_nonpositive():
    f = build_m_separable(None, 5, 3)
    a = grouped_bound_sampled(f, 3, 500, rng_seed=4)
    b = grouped_bound_sampled(f, 3, 500, rng_seed=4)
    assert a.value == b.value and a.grouping == b.grouping
    assert a.value <= 1e-9


def test_sampler_finds_violation_with_fewer_groups():
    # with 2 groups a single group holds 4 parties, enough to violate the 3-group witness
    cert = grouped_bound_sampled(build_m_separable(None, 5, 3), 2, 2000, rng_seed=1)
    assert cert.value > 1e-3


def test_ns_box_breaks_msep_witness():
    assert evaluate(build_m_separable(None, 5, 3), ns_box(5)) > 0


def test_sampled_bad_m():
    with pytest.raises(ValueError):
        grouped_bound_sampled(build_m_separable(None, 4, 3), 4)


def test_certificate_json():
    d = local_bound(chsh_variant().functional).to_json()
    assert d["value"] == "0" and d["kind"] == "local"
