import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import median_oracle, random_rotation
from incompat.fermat import ft_point, ft_sum, ft_sum_upper_batch, is_anchor_optimal, total_distance

TETRA = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)

coords = st.floats(-2, 2, allow_nan=False)
anchor_sets = st.lists(st.tuples(coords, coords, coords), min_size=4, max_size=4).map(np.array)


def lattice_optimal(anchors, point, value, h=1e-4, tol=1e-9):
    for d in product((-1, 0, 1), repeat=3):
        if d == (0, 0, 0):
            continue
        step = h * np.array(d) / np.linalg.norm(d)
        if total_distance(anchors, point + step) < value - tol:
            return False
    return True


class TestTotalDistance:
    def test_coincident(self):
        p = [0.3, -0.2, 0.1]
        assert total_distance([p] * 4, p) == 0.0

    def test_tetrahedron(self):
        assert total_distance(TETRA, [0, 0, 0]) == pytest.approx(4 * math.sqrt(3))

    def test_cross(self):
        assert total_distance([[0, 0, 1], [0, 0, -1], [1, 0, 0], [-1, 0, 0]], [0, 0, 0]) == 4.0


class TestAnchorOptimality:
    def test_triple_anchor_wins(self):
        anchors = [[1, 0, 0]] * 3 + [[0, 0, 0]]
        assert is_anchor_optimal(anchors, 0)
        # a single anchor pulled by a triple point is not optimal
        assert not is_anchor_optimal(anchors, 3)

    def test_tetrahedron_vertices_are_not_optimal(self):
        assert not any(is_anchor_optimal(TETRA, k) for k in range(4))

    def test_all_coincident(self):
        assert is_anchor_optimal([[0.1, 0.2, 0.3]] * 4, 0)

    def test_collinear_middle_anchor(self):
        anchors = [[-1, 0, 0], [0, 0, 0], [1, 0, 0], [3, 0, 0]]
        assert is_anchor_optimal(anchors, 1) and is_anchor_optimal(anchors, 2)
        assert not is_anchor_optimal(anchors, 0)


class TestFTPoint:
    def test_coincident(self):
        sol = ft_point([[0.1, 0.2, 0.3]] * 4)
        assert np.allclose(sol.point, [0.1, 0.2, 0.3]) and sol.total_distance == 0.0

    def test_tetrahedron(self):
        sol = ft_point(TETRA)
        assert np.allclose(sol.point, 0, atol=1e-10)
        assert sol.total_distance == pytest.approx(4 * math.sqrt(3), abs=1e-12)
        assert sol.at_anchor is None

    def test_anchor_case(self):
        sol = ft_point([[1, 0, 0]] * 3 + [[0, 0, 0]])
        assert np.array_equal(sol.point, [1, 0, 0])
        assert sol.total_distance == 1.0 and sol.at_anchor == 0

    def test_planar_square_centre(self):
        sol = ft_point([[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]])
        assert np.allclose(sol.point, 0, atol=1e-10) and sol.total_distance == pytest.approx(4)

    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            ft_point(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            ft_point([[np.nan, 0, 0]] + [[0, 0, 0]] * 3)

    def test_near_coincident_pair(self):
        # minimiser sits between two anchors 2e-9 apart
        eps = 1e-9
        anchors = np.array([[1.55, 0.61, 0.30], [eps, -0.61, -5 * eps], [-eps, -0.61, 5 * eps], [-1.55, 0.61, -0.30]])
        sol = ft_point(anchors)
        _, ref = median_oracle(anchors)
        assert sol.total_distance <= ref + 1e-8
        assert lattice_optimal(anchors, sol.point, sol.total_distance)

    @given(anchor_sets)
    def test_sum_is_consistent_and_locally_optimal(self, anchors):
        sol = ft_point(anchors)
        assert sol.total_distance == pytest.approx(total_distance(anchors, sol.point), abs=1e-9)
        assert lattice_optimal(anchors, sol.point, sol.total_distance)
        assert ft_sum(anchors) == sol.total_distance

    @given(anchor_sets)
    def test_never_worse_than_an_anchor_or_centroid(self, anchors):
        f = ft_point(anchors).total_distance
        for cand in list(anchors) + [anchors.mean(axis=0)]:
            assert f <= total_distance(anchors, cand) + 1e-12

    def test_agrees_with_cone_program(self, rng):
        for _ in range(25):
            anchors = rng.uniform(-2, 2, size=(4, 3))
            _, ref = median_oracle(anchors)
            assert ft_point(anchors).total_distance == pytest.approx(ref, abs=1e-7)

    @given(anchor_sets, st.tuples(coords, coords, coords))
    def test_translation_equivariance(self, anchors, shift):
        a, b = ft_point(anchors), ft_point(anchors + np.array(shift))
        assert b.total_distance == pytest.approx(a.total_distance, abs=1e-9)

    def test_point_equivariance_in_general_position(self, rng):
        for i in range(30):
            anchors = rng.normal(size=(4, 3))
            base = ft_point(anchors)
            shift = rng.normal(size=3)
            rot = random_rotation(i)
            assert np.allclose(ft_point(anchors + shift).point, base.point + shift, atol=1e-9)
            moved = ft_point(anchors @ rot.T)
            assert np.allclose(moved.point, rot @ base.point, atol=1e-9)
            assert moved.total_distance == pytest.approx(base.total_distance, abs=1e-9)


class TestUpperBatch:
    def test_bounds_the_exact_sum(self, rng):
        anchors = rng.normal(size=(200, 4, 3))
        upper = ft_sum_upper_batch(anchors)
        exact = np.array([ft_sum(a) for a in anchors])
        assert np.all(upper >= exact - 1e-12)
        assert np.max(upper - exact) < 1e-4

    def test_symmetric_configuration_is_exact(self):
        assert ft_sum_upper_batch(TETRA[None])[0] == pytest.approx(4 * math.sqrt(3), abs=1e-12)
