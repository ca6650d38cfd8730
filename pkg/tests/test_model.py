import math
import random

import pytest

from bilincover.model import (
    Instance,
    LinearObjective,
    Point,
    TrimLossInstance,
    ValidationError,
    apply_delta_transform,
    eval_bilinear,
    validate_instance,
    validate_trimloss,
)


def test_validate_accepts_bounded_instance():
    inst = Instance(2, 20.0, (5, 6))
    assert validate_instance(inst) is inst
    assert inst.ubar == (4.0, 20.0 / 6.0)


def test_validate_rejects_zero_r():
    with pytest.raises(ValidationError, match="r must be positive"):
        validate_instance(Instance(1, 0.0, (3,)))


def test_validate_rejects_zero_bound():
    with pytest.raises(ValidationError, match="u_i >= 1"):
        validate_instance(Instance(2, 8.0, (6, 0)))


def test_validate_rejects_length_mismatch():
    with pytest.raises(ValidationError):
        validate_instance(Instance(3, 5.0, (1, 2)))
    with pytest.raises(ValidationError):
        validate_instance(Instance(2, 5.0, None, (1.0,)))


def test_validate_rejects_bad_delta():
    with pytest.raises(ValidationError, match="delta_i > 0"):
        validate_instance(Instance(1, 5.0, None, (-2.0,)))


def test_eval_bilinear_known_values():
    inst = Instance(2, 20.0, (5, 6))
    assert eval_bilinear(Point.from_flat([5, 4, 6, 0]), inst) == 20.0
    assert eval_bilinear(Point.from_flat([0, 0, 0, 0]), inst) == 0.0
    assert eval_bilinear(Point.from_flat([5, 1, 6, 5 / 6]), inst) == pytest.approx(10.0, abs=1e-12)


def test_eval_bilinear_with_weights():
    inst = Instance(2, 20.0, None, (2.0, 3.0))
    assert eval_bilinear(Point.from_flat([1, 1, 1, 1]), inst) == 5.0


def test_point_flat_round_trip():
    p = Point.from_flat([1, 2, 3, 4])
    assert p.x == (1.0, 3.0) and p.y == (2.0, 4.0)
    assert p.flat() == (1.0, 2.0, 3.0, 4.0)


def test_delta_transform_identity():
    inst = Instance(2, 20.0, (5, 6))
    unit, dmap = apply_delta_transform(inst)
    assert unit.delta is None
    p = Point.from_flat([5, 4, 6, 0])
    assert dmap.scale_point(p) == p
    assert dmap.unscale_point(p) == p


def test_delta_transform_scales_point_and_preserves_value():
    inst = Instance(1, 20.0, None, (2.0,))
    unit, dmap = apply_delta_transform(inst)
    p = Point((5.0,), (2.0,))
    q = dmap.scale_point(p)
    assert q == Point((5.0,), (4.0,))
    assert eval_bilinear(p, inst) == eval_bilinear(q, unit) == 20.0
    assert dmap.unscale_point(q) == p


def test_delta_transform_cut_pullback():
    from bilincover.separation import Cut

    inst = Instance(1, 20.0, (5,), (2.0,))
    _unit, dmap = apply_delta_transform(inst)
    cut = Cut((0.25,), (0.1,), (3,))
    back = dmap.pull_back_cut(cut)
    assert back.alpha == (0.25,)
    assert back.beta == (0.2,)
    # the pulled-back cut evaluates on the original point like the cut on
    # the scaled point
    p = Point((5.0,), (2.0,))
    assert back.value(p) == pytest.approx(cut.value(dmap.scale_point(p)), rel=1e-15)


def test_bilinear_invariant_under_transform_random():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(1, 4)
        inst = Instance(
            n,
            rng.uniform(0.5, 50.0),
            None,
            tuple(rng.uniform(0.1, 5.0) for _ in range(n)),
        )
        unit, dmap = apply_delta_transform(inst)
        p = Point(
            tuple(rng.uniform(0, 10) for _ in range(n)),
            tuple(rng.uniform(0, 10) for _ in range(n)),
        )
        a = eval_bilinear(p, inst)
        b = eval_bilinear(dmap.scale_point(p), unit)
        assert a == pytest.approx(b, rel=1e-12)
        # feasibility transfers both ways
        assert (a >= inst.r) == (b >= unit.r)


def test_objective_value_and_scaling():
    obj = LinearObjective((1, 2), (3, 4))
    p = Point.from_flat([1, 1, 1, 1])
    assert obj.value(p) == 10.0
    inst = Instance(2, 6.0, None, (2.0, 4.0))
    _unit, dmap = apply_delta_transform(inst)
    scaled = dmap.scale_objective(obj)
    assert scaled.d == (1.5, 1.0)
    assert scaled.value(dmap.scale_point(p)) == pytest.approx(obj.value(p), rel=1e-12)


def test_trimloss_implied_bounds():
    t = validate_trimloss(TrimLossInstance(10.0, (3.0, 4.0), (7.0, 5.0), 2))
    assert t.implied_bounds == (3, 2)
    assert t.n_finals == 2


def test_trimloss_rejects_long_final():
    with pytest.raises(ValidationError, match="exceeds the stock length"):
        validate_trimloss(TrimLossInstance(10.0, (11.0,), (1.0,), 1))


def test_trimloss_rejects_nonpositive_demand():
    with pytest.raises(ValidationError):
        validate_trimloss(TrimLossInstance(10.0, (5.0,), (0.0,), 1))


def test_point_requires_finite_components():
    inst = Instance(1, 5.0)
    with pytest.raises(ValidationError, match="finite"):
        Point((math.inf,), (0.0,)).check(inst)
