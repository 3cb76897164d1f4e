import math

import numpy as np
import pytest

from stabtopo.complexes import build_complex
from stabtopo.fields import circle_loop, icosphere
from stabtopo.interval import IntervalBox
from stabtopo.system import (
    FIBER_SAMPLED,
    HYPERSURFACE,
    ControlError,
    ControlSystemSpec,
    SystemError_,
    TargetSet,
    bounded_domain,
    certify_ray_avoidance,
    chi_of_target,
    evaluate_dynamics,
    fiber_min_norm,
)

BROCKETT = ControlSystemSpec("b", 3, ["u1", "u2", "u1*x2 - u2*x1"], IntervalBox.cube(-2, 2, 2))


def test_spec_validation():
    with pytest.raises(SystemError_, match="dynamics"):
        ControlSystemSpec("s", 2, ["u1", "u2", "x1"], IntervalBox.cube(-1, 1, 2))
    with pytest.raises(SystemError_):
        ControlSystemSpec("s", 1, ["u1"], [(0.5, 1.0)])
    with pytest.raises(SystemError_):
        ControlSystemSpec("s", 1, ["u1"], [(-1, 1)], bundle_kind="tangent")


def test_evaluate_checks_control_box():
    assert np.allclose(evaluate_dynamics(BROCKETT, [1, 2, 3], [1, 0]), [1, 0, 2])
    with pytest.raises(ControlError):
        evaluate_dynamics(BROCKETT, [0, 0, 0], [3, 0])


def test_fiber_norm_bounds():
    circle = ControlSystemSpec("c", 2, ["cos(u1)", "sin(u1)"], [(-math.pi, math.pi)], bundle_kind=FIBER_SAMPLED)
    fb = fiber_min_norm(circle, IntervalBox.cube(-1, 1, 2))
    assert 0.99 <= fb.bound <= 1.0
    assert fiber_min_norm(BROCKETT, IntervalBox.cube(-1, 1, 3)).bound == 0.0


def test_brockett_image_misses_the_vertical_rays():
    N = IntervalBox.cube(-2, 2, 3)
    assert certify_ray_avoidance(BROCKETT, N, [0, 0, 1]).proved
    assert certify_ray_avoidance(BROCKETT, N, [0, 0, -1]).proved
    assert not certify_ray_avoidance(BROCKETT, N, [1, 0, 0], depth_cap=4).proved


def test_target_euler_characteristics():
    assert chi_of_target(TargetSet.at_point([0, 0])) == 1
    circle = TargetSet(HYPERSURFACE, IntervalBox.cube(-2, 2, 2), complex=circle_loop(n=32).to_complex())
    assert chi_of_target(circle) == 0
    assert bounded_domain(circle).euler == 1
    sphere = TargetSet(HYPERSURFACE, IntervalBox.cube(-2, 2, 3), complex=icosphere(1).to_complex())
    assert chi_of_target(sphere) == 2
    assert bounded_domain(sphere, 12).euler == 1


def test_hypersurface_target_must_be_orientable_closed():
    path = build_complex([(0, 1), (1, 2)], [(0, 0), (1, 0), (1, 1)])
    with pytest.raises(Exception):
        TargetSet(HYPERSURFACE, IntervalBox.cube(-2, 2, 2), complex=path)
