import math
import random

import pytest

from bilincover.model import Instance, Point, ValidationError
from bilincover.separation import (
    BoundViolation,
    Cut,
    chord_value,
    column_term,
    facet_coeffs,
    min_column_bounded,
    separate_bounded,
    separate_unbounded,
)
from bilincover.hull import enumerate_extreme_points, enumerate_facets


def brute_min_column(x, y, r, u):
    """Exhaustive column minimum over all u+1 candidate terms."""
    vals = [chord_value(x, y, w, r) for w in range(1, u + 1)]
    vals.append(y * u / r)
    return min(vals)


def brute_min_lhs(p, inst):
    """Minimum cut left-hand value over the full enumerated family."""
    return min(cut.value(p) for cut in enumerate_facets(inst))


# ---------------------------------------------------------------- coefficients


def test_facet_coeffs_first_index():
    fc = facet_coeffs(1, 20.0)
    assert (fc.a, fc.b) == (1.0, 0.0)


def test_facet_coeffs_closed_form():
    fc = facet_coeffs(2, 20.0)
    assert fc.a == pytest.approx(1 / 3, rel=1e-15)
    assert fc.b == pytest.approx(1 / 30, rel=1e-15)


def test_facet_coeffs_chord_through_hyperbola_points():
    # for r = 6 the k = 6 chord joins (5, 6/5) and (6, 1)
    fc = facet_coeffs(6, 6.0)
    assert fc.a == pytest.approx(1 / 11, rel=1e-15)
    assert fc.b == pytest.approx(5 / 11, rel=1e-15)
    assert fc.a * 5 + fc.b * (6 / 5) == pytest.approx(1.0, rel=1e-12)
    assert fc.a * 6 + fc.b * 1 == pytest.approx(1.0, rel=1e-12)


def test_facet_coeffs_rejects_nonpositive_index():
    with pytest.raises(ValidationError):
        facet_coeffs(0, 5.0)


def test_coefficient_monotonicity_up_to_1e4():
    r = 13.0
    prev = facet_coeffs(1, r)
    for k in range(2, 10_001):
        fc = facet_coeffs(k, r)
        assert fc.a < prev.a
        assert fc.b > prev.b
        assert fc.a > 0 and fc.b >= 0
        prev = fc


# ----------------------------------------------------------------- column term


def test_column_term_bound_entry():
    inst = Instance(2, 20.0, (5, 6))
    p = Point.from_flat([0, 1, 0, 0])
    assert column_term(0, 6, p, inst) == pytest.approx(0.25, rel=1e-15)


def test_column_term_first_chord_is_x():
    inst = Instance(1, 8.0, (6,))
    p = Point((5.0,), (3.0,))
    assert column_term(0, 1, p, inst) == 5.0


def test_column_term_direct_evaluation():
    inst = Instance(1, 20.0, (6,))
    p = Point((2.0,), (3.0,))
    assert column_term(0, 2, p, inst) == pytest.approx(2 / 3 + 3 / 30, rel=1e-12)


def test_column_term_out_of_range():
    inst = Instance(1, 20.0, (6,))
    p = Point((2.0,), (3.0,))
    with pytest.raises(ValidationError):
        column_term(0, 8, p, inst)
    with pytest.raises(ValidationError):
        column_term(0, 0, p, inst)


# ---------------------------------------------------------- bounded column min


def test_min_column_bound_term_wins():
    cm = min_column_bounded(5.0, 1.0, 20.0, 5)
    assert cm.w_hat == 6
    assert cm.xi == pytest.approx(0.25, rel=1e-12)


def test_min_column_zero_x():
    cm = min_column_bounded(0.0, 3.0, 8.0, 6)
    assert (cm.w_hat, cm.xi) == (1, 0.0)


def test_min_column_zero_y_takes_bound_index():
    cm = min_column_bounded(2.0, 0.0, 8.0, 6)
    assert (cm.w_hat, cm.xi) == (7, 0.0)


def test_min_column_tie_prefers_chord():
    cm = min_column_bounded(5.0, 4.0, 20.0, 5)
    assert cm.w_hat == 5
    assert cm.xi == pytest.approx(1.0, rel=1e-12)


def test_min_column_rejects_negative():
    with pytest.raises(ValidationError):
        min_column_bounded(-1.0, 0.0, 5.0, 3)


def test_min_column_matches_brute_force_random():
    rng = random.Random(11)
    for _ in range(3000):
        u = rng.randint(1, 5)
        r = rng.uniform(0.1, 100.0)
        x = rng.choice([0.0, rng.uniform(0, u)])
        y = rng.choice([0.0, rng.uniform(0, 3 * r)])
        cm = min_column_bounded(x, y, r, u)
        assert cm.xi == pytest.approx(brute_min_column(x, y, r, u), abs=1e-9)


# ----------------------------------------------------------- bounded separation


def test_separate_bounded_worked_example():
    inst = Instance(2, 20.0, (5, 6))
    p = Point.from_flat([5, 1, 6, 5 / 6])
    res = separate_bounded(p, inst)
    assert not res.feasible
    assert res.cut.alpha == (0.0, 0.0)
    assert res.cut.beta == pytest.approx((0.25, 0.3))
    assert res.violation == pytest.approx(0.5, abs=1e-12)
    assert res.cut.w == (6, 7)


def test_separate_bounded_feasible_at_integer_optimum():
    inst = Instance(2, 20.0, (5, 6))
    res = separate_bounded(Point.from_flat([5, 4, 6, 0]), inst)
    assert res.feasible
    assert res.xi_total == pytest.approx(1.0, rel=1e-12)


def test_separate_bounded_origin_gets_bound_term_cut():
    # at the origin every column has y = 0, so the bound-derived terms are
    # selected and the cut is sum_i u_i y_i / r >= 1
    inst = Instance(2, 20.0, (5, 6))
    res = separate_bounded(Point.from_flat([0, 0, 0, 0]), inst)
    assert not res.feasible
    assert res.violation == pytest.approx(1.0)
    assert res.cut.alpha == (0.0, 0.0)
    assert res.cut.beta == pytest.approx((0.25, 0.3))


def test_separate_bounded_raises_on_bound_violation():
    inst = Instance(2, 20.0, (5, 6))
    with pytest.raises(BoundViolation) as exc:
        separate_bounded(Point.from_flat([6, 4, 0, 0]), inst)
    assert exc.value.index == 0


def test_separate_bounded_dimension_mismatch():
    with pytest.raises(ValidationError):
        separate_bounded(Point((1.0,), (1.0,)), Instance(2, 5.0, (2, 2)))


def test_returned_cut_is_violated_and_known_to_family():
    rng = random.Random(23)
    for _ in range(400):
        n = rng.randint(1, 3)
        inst = Instance(
            n,
            rng.uniform(0.5, 100.0),
            tuple(rng.randint(1, 5) for _ in range(n)),
        )
        p = Point(
            tuple(rng.uniform(0, inst.u[i]) for i in range(n)),
            tuple(rng.uniform(0, 2 * inst.r / max(inst.u)) for _ in range(n)),
        )
        res = separate_bounded(p, inst)
        family = {cut.w: cut for cut in enumerate_facets(inst)}
        if res.feasible:
            continue
        assert res.cut.value(p) < 1 - 5e-10
        # same index vector appears in the enumerated family
        assert res.cut.w in family
        assert family[res.cut.w].alpha == res.cut.alpha
        assert family[res.cut.w].beta == res.cut.beta


def test_bounded_verdict_and_minimum_match_enumeration():
    rng = random.Random(31)
    for _ in range(60):
        n = rng.randint(1, 3)
        inst = Instance(
            n,
            rng.uniform(0.5, 100.0),
            tuple(rng.randint(1, 5) for _ in range(n)),
        )
        for _ in range(40):
            p = Point(
                tuple(rng.uniform(0, inst.u[i]) for i in range(n)),
                tuple(rng.uniform(0, 1.5 * inst.r) for _ in range(n)),
            )
            res = separate_bounded(p, inst)
            brute = brute_min_lhs(p, inst)
            assert res.xi_total == pytest.approx(brute, abs=1e-9)
            assert res.feasible == (brute >= 1 - 1e-9)


def test_maximal_violation_no_facet_deeper():
    rng = random.Random(41)
    inst = Instance(2, 30.0, (4, 3))
    cuts = enumerate_facets(inst)
    for _ in range(300):
        p = Point(
            (rng.uniform(0, 4), rng.uniform(0, 3)),
            (rng.uniform(0, 10), rng.uniform(0, 10)),
        )
        res = separate_bounded(p, inst)
        if res.feasible:
            continue
        best = min(c.value(p) for c in cuts)
        assert res.cut.value(p) == pytest.approx(best, abs=1e-9)


def test_cut_valid_at_every_extreme_point():
    rng = random.Random(43)
    for _ in range(50):
        n = rng.randint(1, 3)
        inst = Instance(
            n,
            rng.uniform(1.0, 50.0),
            tuple(rng.randint(1, 4) for _ in range(n)),
        )
        pts = enumerate_extreme_points(inst)
        p = Point(
            tuple(rng.uniform(0, inst.u[i]) for i in range(n)),
            tuple(rng.uniform(0, 0.5) for _ in range(n)),
        )
        res = separate_bounded(p, inst)
        if res.feasible:
            continue
        for ep in pts:
            assert res.cut.value(ep) >= 1 - 1e-9


# --------------------------------------------------------- unbounded separation


def test_separate_unbounded_feasible_at_midpoint():
    inst = Instance(2, 20.0)
    res = separate_unbounded(Point.from_flat([5, 1, 6, 5 / 6]), inst)
    assert res.feasible
    assert res.xi_total == pytest.approx(1.0, rel=1e-12)
    assert [c.xi for c in res.column_mins] == pytest.approx([0.5, 0.5])


def test_separate_unbounded_deferred_index_example():
    inst = Instance(2, 6.0)
    res = separate_unbounded(Point.from_flat([3, 0, 0, 0]), inst, gamma=1)
    assert not res.feasible
    assert res.cut.w == (3, 1)
    # x1/5 + y1/5 + x2 >= 1
    assert res.cut.alpha == pytest.approx((0.2, 1.0))
    assert res.cut.beta == pytest.approx((0.2, 0.0))
    assert res.cut.value(Point.from_flat([3, 0, 0, 0])) == pytest.approx(0.6)


def test_separate_unbounded_origin():
    inst = Instance(2, 6.0)
    res = separate_unbounded(Point.from_flat([0, 0, 0, 0]), inst)
    assert not res.feasible
    assert res.cut.alpha == (1.0, 1.0)
    assert res.cut.beta == (0.0, 0.0)


def test_separate_unbounded_column_minimum_matches_deep_scan():
    # brute force over w <= 1e5 confirms the stationary-point choice
    inst = Instance(2, 20.0)
    p = Point.from_flat([5, 1, 6, 5 / 6])
    for i in range(2):
        best = min(chord_value(p.x[i], p.y[i], w, 20.0) for w in range(1, 100_001))
        res = separate_unbounded(p, inst)
        assert res.column_mins[i].xi == pytest.approx(best, abs=1e-12)


@pytest.mark.parametrize("gamma", list(range(1, 11)))
def test_unbounded_cut_violated_for_any_gamma(gamma):
    rng = random.Random(100 + gamma)
    inst_cache = {}
    hits = 0
    while hits < 60:
        n = rng.randint(1, 3)
        r = rng.uniform(0.5, 60.0)
        inst = inst_cache.setdefault((n, round(r, 3)), Instance(n, r))
        p = Point(
            tuple(rng.choice([0.0, rng.uniform(0, 8)]) for _ in range(n)),
            tuple(rng.choice([0.0, rng.uniform(0, 0.4 * r)]) for _ in range(n)),
        )
        res = separate_unbounded(p, inst, gamma=gamma)
        if res.feasible:
            continue
        hits += 1
        assert res.cut.value(p) < 1.0
        # the cut is valid across the single-column hyperbola vertices
        for i in range(n):
            for k in range(1, 101):
                v = res.cut.alpha[i] * k + res.cut.beta[i] * (inst.r / k)
                assert v >= 1 - 1e-9


def test_separate_unbounded_rejects_bad_gamma():
    with pytest.raises(ValidationError):
        separate_unbounded(Point((0.0,), (0.0,)), Instance(1, 5.0), gamma=0)


def test_weighted_instances_must_be_transformed_first():
    inst = Instance(1, 5.0, (2,), (2.0,))
    with pytest.raises(ValidationError, match="transform"):
        separate_bounded(Point((1.0,), (1.0,)), inst)


def test_cut_pretty_format():
    cut = Cut((0.0, 0.0), (0.25, 0.3), (6, 7))
    assert cut.pretty() == "0.25*y1 + 0.3*y2 >= 1"
