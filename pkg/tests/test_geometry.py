import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomcuriosity.exceptions import DegenerateDirection, SingularPlane
from geomcuriosity.experiments.checks import random_frame
from geomcuriosity.geometry import (AffineMap, Frame, GeometryKind, HomTransform, apply,
                                    embedding, face_object_frame, frame_map, jacobian_det,
                                    projective_embedding, rho, rho_inverse, rho_transform,
                                    transition_map)

PROJ = GeometryKind.projective(1.0)
EUCL = GeometryKind.euclidean()

seeds = st.integers(0, 2 ** 32 - 1)
dims = st.sampled_from([2, 3])


def rot_z(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])


# --- types -------------------------------------------------------------------

def test_frame_rejects_reflection_and_non_orthonormal():
    with pytest.raises(ValueError):
        Frame(np.zeros(2), np.diag([1.0, -1.0]))
    with pytest.raises(ValueError):
        Frame(np.zeros(2), np.array([[1.0, 0.1], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        Frame(np.zeros(4), np.eye(4))


def test_frame_is_read_only():
    f = Frame.identity(3)
    with pytest.raises(ValueError):
        f.origin[0] = 1.0


def test_affine_map_rejects_singular():
    with pytest.raises(ValueError):
        AffineMap(np.zeros((2, 2)), np.zeros(2))


def test_hom_transform_canonical_and_singular():
    h = HomTransform(-3.0 * np.eye(3))
    assert np.max(np.abs(h.matrix)) == 1.0
    assert np.allclose(h.matrix, np.eye(3))
    with pytest.raises(ValueError):
        HomTransform(np.ones((3, 3)))


def test_geometry_kind_gamma_positive():
    with pytest.raises(ValueError):
        GeometryKind.projective(0.0)
    assert not GeometryKind.euclidean().is_projective


# --- frame_map -----------------------------------------------------------------

def test_frame_map_identity():
    m = frame_map(Frame.identity(3))
    assert m.isclose(AffineMap.identity(3))


def test_frame_map_translation():
    m = frame_map(Frame([0.0, 2.0, 0.0], np.eye(3)))
    assert np.allclose(m([0.0, 2.0, 0.0]), 0.0, atol=0)


def test_frame_map_rotation():
    m = frame_map(Frame(np.zeros(3), rot_z(math.pi / 2)))
    assert np.allclose(m([1.0, 0.0, 0.0]), [0.0, -1.0, 0.0], atol=1e-15)


# --- rho -----------------------------------------------------------------------

def test_rho_examples():
    assert np.array_equal(rho([0.0, 0.0, 0.0], 1.0), [0.0, 0.0, 0.0])
    assert np.allclose(rho([1.0, 0.0, 1.0], 1.0), [0.5, 0.0, 0.5], atol=0)
    with pytest.raises(SingularPlane):
        rho([2.0, 2.0, -0.5], 2.0)


def test_rho_2d():
    assert np.allclose(rho([1.0, 1.0], 1.0), [0.5, 0.5])


def test_rho_inverse_examples():
    assert np.array_equal(rho_inverse([0.0, 0.0, 0.0], 1.0), [0.0, 0.0, 0.0])
    assert np.allclose(rho_inverse([0.5, 0.0, 0.5], 1.0), [1.0, 0.0, 1.0], atol=0)
    with pytest.raises(SingularPlane):
        rho_inverse([0.0, 0.0, 1.0], 1.0)


@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
def test_rho_round_trip(gamma):
    rng = np.random.default_rng(1)
    # keep clear of both horizons z = -1/gamma and z = 1/gamma
    p = rng.uniform(-1, 1, (1000, 3)) * np.array([3.0, 3.0, 0.9 / gamma])
    assert np.max(np.abs(rho(rho_inverse(p, gamma), gamma) - p)) < 1e-10
    assert np.max(np.abs(rho_inverse(rho(p, gamma), gamma) - p)) < 1e-10


# --- projective_embedding ----------------------------------------------------------

def test_embedding_identity_frame():
    emb = projective_embedding(Frame.identity(3), 1.0)
    assert np.allclose(emb([1.0, 0.0, 1.0]), [0.5, 0.0, 0.5], atol=1e-15)
    assert np.allclose(apply(emb, [1.0, 0.0, 1.0]), [0.5, 0.0, 0.5], atol=1e-15)


@pytest.mark.parametrize("gamma", [0.3, 1.0, 7.0])
def test_embedding_fixes_depth_zero_plane(gamma):
    emb = projective_embedding(Frame.identity(3), gamma)
    assert np.allclose(emb([1.5, -2.0, 0.0]), [1.5, -2.0, 0.0], atol=1e-15)


def test_embedding_matches_composition_on_shifted_frame():
    frame = Frame([0.0, -1.0, 0.0], np.eye(3))
    emb = projective_embedding(frame, 1.0)
    obj = np.array([0.0, 2.0, 0.0])
    rng = np.random.default_rng(2)
    pts = np.vstack([obj, rng.uniform(-2, 2, (99, 3)) * [1, 1, 0.4]])
    assert np.max(np.abs(emb(pts) - rho(frame_map(frame)(pts), 1.0))) < 1e-12


def test_rho_transform_and_embedding_dispatch():
    f = random_frame(np.random.default_rng(3), 2)
    assert embedding(f, EUCL).isclose(frame_map(f))
    assert embedding(f, PROJ).isclose(projective_embedding(f, 1.0))
    assert rho_transform(2).isclose(projective_embedding(Frame.identity(2), 1.0))


@settings(max_examples=50, deadline=None)
@given(seeds, dims, st.floats(0.2, 5.0))
def test_embedding_factorization_property(seed, dim, gamma):
    rng = np.random.default_rng(seed)
    f = random_frame(rng, dim)
    local = rng.normal(size=(50, dim))
    local[:, -1] = rng.uniform(0.0, 5.0, 50)
    pts = f.origin + local @ f.basis.T
    got = projective_embedding(f, gamma)(pts)
    assert np.max(np.abs(got - rho(frame_map(f)(pts), gamma))) < 1e-12


# --- transition_map / apply ------------------------------------------------------------

@pytest.mark.parametrize("kind", [EUCL, PROJ])
def test_transition_same_frame_is_identity(kind):
    f = random_frame(np.random.default_rng(4), 3)
    t = transition_map(f, f, kind)
    ident = AffineMap.identity(3) if kind == EUCL else HomTransform.identity(3)
    assert t.isclose(ident)


def test_euclidean_pure_translation():
    before = Frame([1.0, 1.0], np.eye(2))
    after = Frame([1.0, 3.0], np.eye(2))
    t = transition_map(before, after, EUCL)
    assert np.allclose(t.linear, np.eye(2))
    assert np.allclose(t.offset, [0.0, -2.0])


def test_transition_rejects_mixed_dims():
    with pytest.raises(ValueError):
        transition_map(Frame.identity(2), Frame.identity(3), EUCL)


@settings(max_examples=60, deadline=None)
@given(seeds, dims, st.floats(0.2, 3.0))
def test_projective_group_composition(seed, dim, gamma):
    rng = np.random.default_rng(seed)
    kind = GeometryKind.projective(gamma)
    f0, f1, f2 = (random_frame(rng, dim) for _ in range(3))
    t01, t12 = transition_map(f0, f1, kind), transition_map(f1, f2, kind)
    assert (t12 @ t01).isclose(transition_map(f0, f2, kind), atol=1e-10)
    assert (t01.inverse() @ t01).isclose(HomTransform.identity(dim), atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(seeds, dims)
def test_euclidean_group_and_rigidity(seed, dim):
    rng = np.random.default_rng(seed)
    f0, f1, f2 = (random_frame(rng, dim) for _ in range(3))
    t01, t12 = transition_map(f0, f1, EUCL), transition_map(f1, f2, EUCL)
    assert (t12 @ t01).isclose(transition_map(f0, f2, EUCL))
    assert (t01.inverse() @ t01).isclose(AffineMap.identity(dim))
    p, q = rng.normal(size=(2, dim)) * 3
    assert abs(np.linalg.norm(t01(p) - t01(q)) - np.linalg.norm(p - q)) < 1e-10
    assert abs(t01.jacobian_det() - 1.0) < 1e-12


@settings(max_examples=60, deadline=None)
@given(seeds, dims)
def test_apply_inverse_round_trip(seed, dim):
    rng = np.random.default_rng(seed)
    t = transition_map(random_frame(rng, dim), random_frame(rng, dim), PROJ)
    p = rng.normal(size=dim)
    _, w = t.homogeneous_action(p)
    if abs(w) < 1e-3:
        return
    assert np.max(np.abs(apply(t.inverse(), apply(t, p)) - p)) < 1e-10 * max(1.0, np.abs(p).max())


def test_apply_identity():
    p = np.array([0.3, -1.2, 4.0])
    assert np.array_equal(apply(AffineMap.identity(3), p), p)
    assert np.allclose(apply(HomTransform.identity(3), p), p, atol=0)


def test_apply_batch_matches_single():
    t = transition_map(random_frame(np.random.default_rng(5), 3),
                       random_frame(np.random.default_rng(6), 3), PROJ)
    pts = np.random.default_rng(7).normal(size=(5, 3)) * 0.1
    assert np.allclose(t(pts), np.array([t(p) for p in pts]), atol=1e-15)


def test_apply_on_horizon_raises():
    with pytest.raises(SingularPlane):
        rho_transform(3)([0.0, 0.0, -1.0])


# --- jacobian_det ----------------------------------------------------------------

def test_affine_jacobian_scaling():
    a = AffineMap(2 * np.eye(3), np.zeros(3))
    assert math.isclose(jacobian_det(a, [1.0, 2.0, 3.0]), 8.0, rel_tol=1e-14)


def test_rho_jacobian_value():
    assert math.isclose(jacobian_det(rho_transform(3, 1.0), [0.0, 0.0, 1.0]), 1 / 16,
                        rel_tol=1e-14)


@pytest.mark.parametrize("dim", [2, 3])
def test_rho_jacobian_exponent(dim):
    p = np.zeros(dim)
    p[-1] = 0.7
    assert math.isclose(rho_transform(dim, 2.0).jacobian_det(p), 1 / 2.4 ** (dim + 1),
                        rel_tol=1e-13)


def _fd_det(t, p, h=1e-5):
    cols = [(t(p + h * e) - t(p - h * e)) / (2 * h) for e in np.eye(len(p))]
    return np.linalg.det(np.column_stack(cols))


@settings(max_examples=60, deadline=None)
@given(seeds, dims, st.floats(0.3, 3.0))
def test_jacobian_finite_difference(seed, dim, gamma):
    rng = np.random.default_rng(seed)
    t = transition_map(random_frame(rng, dim), random_frame(rng, dim),
                       GeometryKind.projective(gamma))
    p = rng.normal(size=dim)
    _, w = t.homogeneous_action(p)
    if abs(w) < 0.2 * np.max(np.abs(t.matrix)):
        return
    fd = _fd_det(t, p)
    assert abs(t.jacobian_det(p) - fd) <= 1e-5 * abs(fd)


@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(-1e3, 1e3).filter(lambda s: abs(s) > 1e-3))
def test_scale_invariance(seed, scale):
    rng = np.random.default_rng(seed)
    t = transition_map(random_frame(rng, 3), random_frame(rng, 3), PROJ)
    scaled = HomTransform(scale * t.matrix)
    p = rng.normal(size=3) * 0.1
    assert np.max(np.abs(scaled(p) - t(p))) < 1e-12
    assert abs(scaled.jacobian_det(p) - t.jacobian_det(p)) < 1e-12 * max(1, abs(t.jacobian_det(p)))


# --- face_object_frame -------------------------------------------------------------

def test_face_object_frame_depth_axis():
    f = face_object_frame([0.0, 0.0], [0.0, 2.0])
    assert np.allclose(f.depth_axis, [0.0, 1.0])
    assert np.allclose(frame_map(f)([0.0, 2.0]), [0.0, 2.0])
    assert math.isclose(np.linalg.det(f.basis), 1.0)


def test_face_object_frame_vertical_fallback():
    f = face_object_frame([0.0, 0.0, 0.0], [0.0, 0.0, 3.0])
    assert np.allclose(frame_map(f)([0.0, 0.0, 3.0]), [0.0, 0.0, 3.0])


def test_face_object_frame_degenerate():
    with pytest.raises(DegenerateDirection):
        face_object_frame([1.0, 1.0], [1.0, 1.0])


@settings(max_examples=100, deadline=None)
@given(seeds, dims)
def test_face_object_frame_property(seed, dim):
    rng = np.random.default_rng(seed)
    pos, obj = rng.uniform(-5, 5, (2, dim))
    f = face_object_frame(pos, obj)
    local = frame_map(f)(obj)
    assert np.max(np.abs(local[:-1])) < 1e-12
    assert math.isclose(local[-1], np.linalg.norm(obj - pos), rel_tol=1e-12)
    assert math.isclose(np.linalg.det(f.basis), 1.0, rel_tol=1e-12)
