"""Reference frames and the two families of internal-model transformations.

Points are numpy arrays whose last axis holds the coordinates; the last
coordinate is always the depth axis of a frame.  Every transform accepts a
single point of shape (d,) or a batch of shape (n, d).
"""

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from ._validation import check_dim, check_point, check_positive
from .exceptions import DegenerateDirection, SingularPlane

SINGULAR_TOL = 1e-9
ORTHO_TOL = 1e-10
DET_TOL = 1e-12
_UP_FALLBACK_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Frame:
    """Rigid reference frame: an origin and right-handed orthonormal axes.

    Parameters
    ----------
    origin : (d,) array_like
        Frame center in world coordinates.
    basis : (d, d) array_like
        Columns are the frame axes expressed in world coordinates.  The last
        column is the depth axis.
    """

    origin: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        origin = check_point(self.origin, name="origin")
        dim = check_dim(origin.shape[0])
        basis = np.asarray(self.basis, dtype=float)
        if basis.shape != (dim, dim):
            raise ValueError(f"basis must be {dim}x{dim}, got {basis.shape}")
        if np.max(np.abs(basis.T @ basis - np.eye(dim))) >= ORTHO_TOL:
            raise ValueError("basis is not orthonormal")
        if np.linalg.det(basis) <= 0:
            raise ValueError("basis must be right-handed (det = +1)")
        origin.setflags(write=False)
        basis = basis.copy()
        basis.setflags(write=False)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self):
        return self.origin.shape[0]

    @property
    def depth_axis(self):
        return self.basis[:, -1]

    @classmethod
    def identity(cls, dim=2):
        return cls(np.zeros(dim), np.eye(dim))


@dataclass(frozen=True, eq=False)
class AffineMap:
    """``x -> linear @ x + offset``."""

    linear: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        linear = np.array(self.linear, dtype=float)
        offset = np.array(self.offset, dtype=float)
        if linear.ndim != 2 or linear.shape[0] != linear.shape[1]:
            raise ValueError(f"linear part must be square, got {linear.shape}")
        if offset.shape != (linear.shape[0],):
            raise ValueError("offset length does not match linear part")
        if abs(np.linalg.det(linear)) <= DET_TOL:
            raise ValueError("affine map is not invertible")
        linear.setflags(write=False)
        offset.setflags(write=False)
        object.__setattr__(self, "linear", linear)
        object.__setattr__(self, "offset", offset)

    @property
    def dim(self):
        return self.offset.shape[0]

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim), np.zeros(dim))

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        return points @ self.linear.T + self.offset

    def __matmul__(self, other):
        """Composition ``self ∘ other``."""
        if not isinstance(other, AffineMap):
            return NotImplemented
        return AffineMap(self.linear @ other.linear, self.linear @ other.offset + self.offset)

    def inverse(self):
        inv = np.linalg.inv(self.linear)
        return AffineMap(inv, -inv @ self.offset)

    def jacobian_det(self, points=None):
        det = float(np.linalg.det(self.linear))
        if points is None:
            return det
        points = np.asarray(points, dtype=float)
        return np.full(points.shape[:-1], det) if points.ndim > 1 else det

    def to_homogeneous(self):
        """Embed as a :class:`HomTransform` with bottom row ``(0, ..., 0, 1)``."""
        d = self.dim
        mat = np.eye(d + 1)
        mat[:d, :d] = self.linear
        mat[:d, d] = self.offset
        return HomTransform(mat)

    def isclose(self, other, atol=1e-10):
        return (np.allclose(self.linear, other.linear, rtol=0, atol=atol)
                and np.allclose(self.offset, other.offset, rtol=0, atol=atol))


def _canonical(matrix):
    flat = matrix.ravel()
    idx = int(np.argmax(np.abs(flat)))
    return matrix / flat[idx]


@dataclass(frozen=True, eq=False)
class HomTransform:
    """Projective transformation given by a homogeneous matrix up to scale.

    The stored matrix is canonicalized so that its entry of largest absolute
    value equals +1.
    """

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] not in (3, 4):
            raise ValueError(f"homogeneous matrix must be 3x3 or 4x4, got {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ValueError("homogeneous matrix contains non-finite values")
        mat = _canonical(mat)
        if abs(np.linalg.det(mat)) <= DET_TOL:
            raise ValueError("homogeneous matrix is singular")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self):
        return self.matrix.shape[0] - 1

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim + 1))

    def homogeneous_action(self, points):
        """Return ``(numerators, w)`` of the action on ``(points, 1)``.

        The dehomogenized image is ``numerators / w[..., None]``.  No
        singularity check is made.
        """
        points = np.asarray(points, dtype=float)
        d = self.dim
        top = self.matrix[:d]
        bottom = self.matrix[d]
        num = points @ top[:, :d].T + top[:, d]
        w = points @ bottom[:d] + bottom[d]
        return num, w

    def __call__(self, points):
        num, w = self.homogeneous_action(points)
        if np.any(np.abs(w) <= SINGULAR_TOL):
            raise SingularPlane("point maps to the projective horizon")
        return num / np.expand_dims(w, -1)

    def __matmul__(self, other):
        if isinstance(other, AffineMap):
            other = other.to_homogeneous()
        if not isinstance(other, HomTransform):
            return NotImplemented
        return HomTransform(self.matrix @ other.matrix)

    def inverse(self):
        return HomTransform(np.linalg.inv(self.matrix))

    def jacobian_det(self, points):
        """Determinant of the differential of the dehomogenized map.

        For ``x -> (A x + b) / (c.x + e)`` this is ``det(H) / w**(d+1)``, which
        is invariant under rescaling of ``H``.
        """
        _, w = self.homogeneous_action(points)
        if np.any(np.abs(w) <= SINGULAR_TOL):
            raise SingularPlane("jacobian requested on the projective horizon")
        det = np.linalg.det(self.matrix) / w ** (self.dim + 1)
        return float(det) if np.ndim(det) == 0 else det

    def isclose(self, other, atol=1e-10):
        """Equality up to nonzero scale (sign included)."""
        a, b = self.matrix, other.matrix
        return (np.allclose(a, b, rtol=0, atol=atol)
                or np.allclose(a, -b, rtol=0, atol=atol))


Transform = Union[AffineMap, HomTransform]

EUCLIDEAN = "euclidean"
PROJECTIVE = "projective"


@dataclass(frozen=True)
class GeometryKind:
    """Which group structures the internal world model.

    ``gamma`` is the strictly positive contraction parameter of the
    projective embedding; it is ignored in the Euclidean case.
    """

    tag: str = PROJECTIVE
    gamma: float = field(default=1.0)

    def __post_init__(self):
        tag = str(self.tag).lower()
        if tag not in (EUCLIDEAN, PROJECTIVE):
            raise ValueError(f"unknown geometry {self.tag!r}")
        object.__setattr__(self, "tag", tag)
        if tag == PROJECTIVE:
            object.__setattr__(self, "gamma", check_positive(self.gamma, "gamma"))

    @classmethod
    def euclidean(cls):
        return cls(EUCLIDEAN, 1.0)

    @classmethod
    def projective(cls, gamma=1.0):
        return cls(PROJECTIVE, gamma)

    @property
    def is_projective(self):
        return self.tag == PROJECTIVE


def frame_map(frame):
    """World coordinates -> coordinates in ``frame`` (a rigid affine map)."""
    rt = frame.basis.T
    return AffineMap(rt, -rt @ frame.origin)


def _depth_denominator(p, gamma, sign):
    p = np.asarray(p, dtype=float)
    gamma = check_positive(gamma, "gamma")
    denom = 1.0 + sign * gamma * p[..., -1]
    if np.any(np.abs(denom) <= SINGULAR_TOL):
        raise SingularPlane("point lies on the singular plane of the depth contraction")
    return p, np.expand_dims(denom, -1)


def rho(p, gamma=1.0):
    """Depth contraction ``p -> p / (gamma * z + 1)`` with ``z = p[-1]``."""
    p, denom = _depth_denominator(p, gamma, +1.0)
    return p / denom


def rho_inverse(p, gamma=1.0):
    """Inverse of :func:`rho`: ``p -> p / (1 - gamma * z)``."""
    p, denom = _depth_denominator(p, gamma, -1.0)
    return p / denom


def projective_embedding(frame, gamma=1.0):
    """Homogeneous matrix of ``rho ∘ frame_map(frame)``.

    The product of the contraction matrix (identity with bottom row
    ``(0, ..., 0, gamma, 1)``) and the homogeneous rigid change of frame.  The
    top block is the change of frame; the bottom row is ``(0, ..., gamma, 1)``
    only for the identity frame.
    """
    gamma = check_positive(gamma, "gamma")
    d = frame.dim
    contraction = np.eye(d + 1)
    contraction[d, d - 1] = gamma
    return HomTransform(contraction @ frame_map(frame).to_homogeneous().matrix)


def rho_transform(dim, gamma=1.0):
    """:func:`rho` as a :class:`HomTransform`."""
    return projective_embedding(Frame.identity(dim), gamma)


def embedding(frame, kind):
    """World -> internal model map for ``frame`` under ``kind``."""
    if kind.is_projective:
        return projective_embedding(frame, kind.gamma)
    return frame_map(frame)


def transition_map(before, after, kind):
    """Change of internal coordinates induced by moving from ``before`` to ``after``."""
    if before.dim != after.dim:
        raise ValueError("frames have different dimensions")
    if kind.is_projective:
        return HomTransform(projective_embedding(after, kind.gamma).matrix
                            @ np.linalg.inv(projective_embedding(before, kind.gamma).matrix))
    return frame_map(after) @ frame_map(before).inverse()


def apply(t, p):
    """Action of a transform on a point (or batch of points)."""
    return t(p)


def jacobian_det(t, p):
    return t.jacobian_det(p)


def face_object_frame(position, obj):
    """Frame centered at ``position`` whose depth axis points at ``obj``.

    In 2-D the depth axis is the lateral axis rotated by +90°.  In 3-D the
    lateral axes come from Gram-Schmidt against the up vector ``(0, 0, 1)``,
    or ``(1, 0, 0)`` when the depth axis is nearly vertical.
    """
    position = check_point(position, name="position")
    obj = check_point(obj, dim=position.shape[0], name="object")
    dim = check_dim(position.shape[0])
    delta = obj - position
    norm = np.linalg.norm(delta)
    if norm <= SINGULAR_TOL:
        raise DegenerateDirection("agent position coincides with the object")
    depth = delta / norm
    if dim == 2:
        lateral = np.array([depth[1], -depth[0]])
        basis = np.column_stack([lateral, depth])
    else:
        up = np.array([0.0, 0.0, 1.0])
        if abs(abs(depth @ up) - 1.0) < _UP_FALLBACK_TOL:
            up = np.array([1.0, 0.0, 0.0])
        u1 = up - (up @ depth) * depth
        u1 /= np.linalg.norm(u1)
        u0 = np.cross(u1, depth)
        basis = np.column_stack([u0, u1, depth])
    return Frame(position, basis)
