import numpy as np
import pytest

from cotransport.geometry import (
    Capsule,
    Pose,
    adjoint_of_pose,
    capsule_point_distance,
    skew,
    so3_exp,
    so3_log,
)


def random_pose(rng):
    return Pose(so3_exp(rng.normal(size=3)), rng.normal(size=3))


class TestPose:
    def test_identity_and_compose(self):
        p = Pose.planar(1.0, 2.0, 0.5)
        assert np.allclose((p @ p.inverse()).rotation, np.eye(3))
        assert np.allclose((p @ p.inverse()).translation, 0.0)

    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError):
            Pose(np.eye(3) * 1.01, np.zeros(3))
        with pytest.raises(ValueError):
            Pose(-np.eye(3), np.zeros(3))  # det = -1

    def test_compose_associative(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a, b, c = (random_pose(rng) for _ in range(3))
            left = (a @ b) @ c
            right = a @ (b @ c)
            assert np.allclose(left.rotation, right.rotation, atol=1e-12)
            assert np.allclose(left.translation, right.translation, atol=1e-12)


class TestSo3:
    def test_round_trip(self):
        # log returns the canonical representative, so keep |w| < pi
        rng = np.random.default_rng(2)
        for _ in range(50):
            w = rng.normal(size=3)
            w = w / np.linalg.norm(w) * rng.uniform(1e-4, np.pi - 1e-3)
            assert np.allclose(so3_log(so3_exp(w)), w, atol=1e-9)

    def test_near_pi(self):
        w = np.array([0.0, 0.0, np.pi - 1e-8])
        R = so3_exp(w)
        assert np.allclose(so3_exp(so3_log(R)), R, atol=1e-6)

    def test_tiny_angle(self):
        w = np.array([1e-14, 0.0, 0.0])
        assert np.allclose(so3_log(so3_exp(w)), w, atol=1e-15)


class TestAdjoint:
    def test_identity_pose(self):
        assert np.allclose(adjoint_of_pose(Pose.identity(), "world"), np.eye(6))
        assert np.allclose(adjoint_of_pose(Pose.identity(), "tool"), np.eye(6))

    def test_pure_translation_block(self):
        # world-style top-right block is the cross-product matrix of r
        p = Pose(np.eye(3), np.array([1.0, 0.0, 0.0]))
        A = adjoint_of_pose(p, "world")
        assert np.allclose(A[:3, 3:], skew([1.0, 0.0, 0.0]))
        assert np.allclose(A[:3, :3], np.eye(3))

    def test_compose_and_invert_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            p = random_pose(rng)
            prod = adjoint_of_pose(p, "world") @ adjoint_of_pose(p.inverse(), "world")
            assert np.max(np.abs(prod - np.eye(6))) < 1e-9

    def test_tool_style_is_world_of_inverse(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            p = random_pose(rng)
            assert np.allclose(adjoint_of_pose(p, "tool"),
                               adjoint_of_pose(p.inverse(), "world"), atol=1e-12)

    def test_bad_direction(self):
        with pytest.raises(ValueError):
            adjoint_of_pose(Pose.identity(), "sideways")


class TestCapsule:
    def test_perpendicular_mid_segment(self):
        cap = Capsule(np.zeros(3), np.array([1.0, 0.0, 0.0]), 0.1)
        d, x_c = capsule_point_distance(cap, np.array([0.5, 0.5, 0.0]))
        assert d == pytest.approx(0.4)
        assert np.allclose(x_c, [0.5, 0.0, 0.0])

    def test_beyond_endcap(self):
        cap = Capsule(np.zeros(3), np.array([1.0, 0.0, 0.0]), 0.1)
        d, x_c = capsule_point_distance(cap, np.array([2.0, 0.0, 0.0]))
        assert d == pytest.approx(0.9)
        assert np.allclose(x_c, [1.0, 0.0, 0.0])

    def test_sampling_oracle(self):
        # closest-axis-point distance vs dense sampling of the segment
        rng = np.random.default_rng(5)
        cap = Capsule(rng.normal(size=3), rng.normal(size=3), 0.15)
        ts = np.linspace(0.0, 1.0, 10_000)
        samples = cap.p1[None, :] + ts[:, None] * (cap.p2 - cap.p1)[None, :]
        for _ in range(50):
            point = rng.normal(scale=2.0, size=3)
            d, _ = capsule_point_distance(cap, point)
            dense = np.min(np.linalg.norm(samples - point, axis=1)) - cap.radius
            assert abs(d - dense) < 1e-4

    def test_lipschitz_in_query_point(self):
        rng = np.random.default_rng(6)
        cap = Capsule(np.array([0.0, 0.0, 0.0]), np.array([1.0, 1.0, 0.0]), 0.2)
        for _ in range(200):
            a = rng.normal(scale=2.0, size=3)
            b = a + rng.normal(scale=0.3, size=3)
            da, _ = capsule_point_distance(cap, a)
            db, _ = capsule_point_distance(cap, b)
            assert abs(da - db) <= np.linalg.norm(a - b) + 1e-12

    def test_inside_is_negative(self):
        cap = Capsule(np.zeros(3), np.array([1.0, 0.0, 0.0]), 0.3)
        d, _ = capsule_point_distance(cap, np.array([0.5, 0.1, 0.0]))
        assert d == pytest.approx(0.1 - 0.3)

    def test_rejects_bad_radius(self):
        with pytest.raises(ValueError):
            Capsule(np.zeros(3), np.ones(3), 0.0)
