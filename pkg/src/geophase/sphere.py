"""Oriented areas of geodesic polygons on the unit (Bloch) sphere.

Sign convention: a loop traversed counter-clockwise when viewed from
outside the sphere encloses a positive solid angle. The geometric phase of
a spin-1/2 state carried around the loop is ``-solid_angle / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateClosure

FOUR_PI = 4.0 * math.pi
ANTIPODE_TOL = 1e-9
UNIT_TOL = 1e-12


@dataclass(frozen=True)
class SpherePath:
    """Ordered points joined by shortest geodesics.

    A path whose last point equals its first is treated as closed.
    """

    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must have shape (n, 3), got {pts.shape}")
        if len(pts) < 2:
            raise ValueError("a path needs at least two points")
        norms = np.linalg.norm(pts, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise ValueError("all path points must be unit vectors")
        dots = np.einsum("ij,ij->i", pts[:-1], pts[1:])
        if np.any(dots < -1.0 + ANTIPODE_TOL):
            raise ValueError("consecutive points are antipodal; geodesic undefined")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, points, normalize: bool = True) -> "SpherePath":
        pts = np.asarray(points, dtype=float)
        if normalize:
            pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
        return cls(pts)

    @property
    def is_closed(self) -> bool:
        return bool(np.allclose(self.points[0], self.points[-1], rtol=0, atol=UNIT_TOL))

    def __len__(self):
        return len(self.points)


def triangle_solid_angle(a, b, c) -> np.ndarray:
    """Signed solid angle of geodesic triangles ``a -> b -> c``.

    Van Oosterom-Strackee formula; broadcasts over leading axes.
    """
    a, b, c = (np.asarray(v, dtype=float) for v in (a, b, c))
    num = np.einsum("...i,...i->...", a, np.cross(b, c))
    den = (1.0 + np.einsum("...i,...i->...", a, b)
           + np.einsum("...i,...i->...", b, c)
           + np.einsum("...i,...i->...", c, a))
    return 2.0 * np.arctan2(num, den)


def _wrap_4pi(omega: float) -> float:
    """Representative of a solid angle modulo 4 pi in (-2 pi, 2 pi]."""
    return float(omega - FOUR_PI * math.ceil((omega - 2.0 * math.pi) / FOUR_PI))


def _fan_anchor(loop: np.ndarray) -> np.ndarray:
    # anchor must not sit opposite any vertex, otherwise two fan triangles
    # are undefined; start from the first vertex as the plain fan does
    def clear(v):
        return float(np.max(-(loop @ v))) < 1.0 - 1e-6

    for v in loop:
        if clear(v):
            return v
    for v in np.eye(3).tolist() + (-np.eye(3)).tolist() + [[1, 1, 1], [1, -1, 1], [-1, 1, -1]]:
        v = np.asarray(v, dtype=float) / np.linalg.norm(v)
        if clear(v):
            return v
    raise DegenerateClosure("no usable fan anchor for this loop")  # pragma: no cover


def solid_angle(path: SpherePath) -> float:
    """Signed solid angle enclosed by ``path`` and its shortest geodesic closure.

    The result is defined modulo 4 pi and reported in (-2 pi, 2 pi].
    Raises :class:`DegenerateClosure` when an open path ends at the antipode
    of its start.
    """
    pts = path.points
    if path.is_closed:
        loop = pts[:-1]
    else:
        if float(pts[0] @ pts[-1]) < -1.0 + ANTIPODE_TOL:
            raise DegenerateClosure("endpoints are antipodal; closing geodesic ambiguous")
        loop = pts
    if len(loop) < 3:
        return 0.0
    anchor = _fan_anchor(loop)
    nxt = np.roll(loop, -1, axis=0)
    omega = float(np.sum(triangle_solid_angle(anchor, loop, nxt)))
    return _wrap_4pi(omega)


def geometric_phase_of_path(path: SpherePath) -> float:
    """``-solid_angle / 2`` wrapped onto (-pi, pi]."""
    from .spin import wrap_angle

    return wrap_angle(-0.5 * solid_angle(path))


def meridian(phi: float, theta_from: float, theta_to: float, npts: int = 17) -> np.ndarray:
    """Points along the meridian at azimuth ``phi`` between two polar angles."""
    t = np.linspace(theta_from, theta_to, npts)
    return np.column_stack([np.sin(t) * math.cos(phi), np.sin(t) * math.sin(phi), np.cos(t)])


def lune_path(phi_a: float, phi_b: float, npts: int = 17) -> SpherePath:
    """Closed loop south pole -> north pole along ``phi_a``, back down along ``phi_b``."""
    up = meridian(phi_a, math.pi, 0.0, npts)
    down = meridian(phi_b, 0.0, math.pi, npts)
    return SpherePath(np.vstack([up, down[1:]]))


def splice(first: SpherePath, second: SpherePath) -> SpherePath:
    """Concatenate two open paths that share an endpoint."""
    if not np.allclose(first.points[-1], second.points[0], rtol=0, atol=UNIT_TOL):
        raise ValueError("paths do not share an endpoint")
    return SpherePath(np.vstack([first.points, second.points[1:]]))
