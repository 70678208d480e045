"""The one-parameter family of regular spherical tetrahedra in S^3.

A member is fixed by any one of: edge length ``x``, face plane angle
``alpha`` or dihedral angle ``phi``.  The three are tied by

    cos(x/2)     * 2 sin(alpha/2) = 1
    cos(alpha/2) * 2 sin(phi/2)   = 1

(law of sines in the right triangles cut off by a face median and by a
median of the vertex figure).  Every conversion is strictly increasing on
its open domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import DomainError, SingularSimplex
from .hiprec import HiReal, RealLike, acos_clamped, digits_of, to_mpf


def x_star(digits: int | None = None) -> HiReal:
    """Largest edge length, arccos(-1/3); sigma(x_star) is a hemisphere."""
    d = digits or 50
    with mp.workdps(d):
        return HiReal(mp.acos(mp.mpf(-1) / 3), d)


def phi_min(digits: int | None = None) -> HiReal:
    """Dihedral angle of the Euclidean regular tetrahedron, arctan(2*sqrt 2)."""
    d = digits or 50
    with mp.workdps(d):
        return HiReal(mp.atan(2 * mp.sqrt(2)), d)


@dataclass(frozen=True)
class SimplexParams:
    x: HiReal
    alpha: HiReal
    phi: HiReal

    @classmethod
    def from_edge(cls, x: RealLike, digits: int | None = None) -> "SimplexParams":
        d = digits or digits_of(x)
        alpha = edge_to_face_angle(x, d)
        return cls(HiReal.of(x, d), alpha, face_angle_to_dihedral(alpha, d))

    @classmethod
    def from_dihedral(cls, phi: RealLike, digits: int | None = None) -> "SimplexParams":
        d = digits or digits_of(phi)
        x = dihedral_to_edge(phi, d)
        return cls(x, edge_to_face_angle(x, d), HiReal.of(phi, d))


def _half_angle_map(v: mp.mpf) -> mp.mpf:
    # 2*arcsin(1/(2*cos(v/2))): shared shape of the two law-of-sines steps
    return 2 * mp.asin(1 / (2 * mp.cos(v / 2)))


def edge_to_face_angle(x: RealLike, digits: int | None = None) -> HiReal:
    d = digits or digits_of(x)
    with mp.workdps(d):
        v = to_mpf(x)
        if not 0 < v < mp.acos(mp.mpf(-1) / 3):
            raise DomainError(f"edge length {mp.nstr(v, 15)} outside (0, arccos(-1/3))")
        return HiReal(_half_angle_map(v), d)


def face_angle_to_dihedral(alpha: RealLike, digits: int | None = None) -> HiReal:
    d = digits or digits_of(alpha)
    with mp.workdps(d):
        v = to_mpf(alpha)
        if not mp.pi / 3 < v < 2 * mp.pi / 3:
            raise DomainError(f"face angle {mp.nstr(v, 15)} outside (pi/3, 2pi/3)")
        return HiReal(_half_angle_map(v), d)


def edge_from_dihedral(phi: mp.mpf) -> mp.mpf:
    """Unchecked x(phi) on the current mpmath context (quadrature integrand)."""
    s = mp.sin(phi / 2)
    return 2 * acos_clamped(s / mp.sqrt(4 * s * s - 1))


def dihedral_to_edge(phi: RealLike, digits: int | None = None) -> HiReal:
    d = digits or digits_of(phi)
    with mp.workdps(d):
        v = to_mpf(phi)
        if not mp.atan(2 * mp.sqrt(2)) < v < mp.pi:
            raise DomainError(f"dihedral angle {mp.nstr(v, 15)} outside (arctan(2*sqrt2), pi)")
        return HiReal(edge_from_dihedral(v), d)


@dataclass(frozen=True)
class SphericalSimplex:
    """Four unit vectors of R^4 (rows of ``vertices``) and their Gram matrix."""

    vertices: tuple[tuple[mp.mpf, ...], ...]
    gram: tuple[tuple[mp.mpf, ...], ...]
    precision_digits: int

    @classmethod
    def from_vertices(cls, vertices, digits: int) -> "SphericalSimplex":
        with mp.workdps(digits):
            vs = tuple(tuple(to_mpf(c) for c in v) for v in vertices)
            gram = tuple(
                tuple(mp.fsum(a * b for a, b in zip(u, w)) for w in vs) for u in vs
            )
        return cls(vs, gram, digits)

    @property
    def membership_eps(self) -> mp.mpf:
        with mp.workdps(self.precision_digits):
            return mp.mpf(10) ** (-(self.precision_digits // 2))

    def gram_det(self) -> mp.mpf:
        with mp.workdps(self.precision_digits):
            return mp.det(mp.matrix(self.gram))

    def is_degenerate(self) -> bool:
        return abs(self.gram_det()) < self.membership_eps

    def as_array(self) -> np.ndarray:
        return np.array([[float(c) for c in v] for v in self.vertices])

    def barycentric(self, p) -> list[mp.mpf]:
        """Coefficients c with p = sum c_i v_i."""
        if self.is_degenerate():
            raise SingularSimplex("Gram matrix has rank < 4")
        with mp.workdps(self.precision_digits):
            vt = mp.matrix(self.vertices).T
            sol = mp.lu_solve(vt, mp.matrix([to_mpf(c) for c in p]))
            return [sol[i] for i in range(4)]


def make_vertices(x: RealLike, digits: int | None = None) -> SphericalSimplex:
    """Canonical realization of sigma(x): rows of the lower Cholesky factor of (1-c)I + cJ, c = cos x.

    The first vertex is e1, the second lies in the (e1, e2) plane with
    positive second coordinate, and so on.  At x = arccos(-1/3) the last
    diagonal entry vanishes and the vertices span a hyperplane.
    """
    d = digits or digits_of(x)
    with mp.workdps(d):
        c = mp.cos(to_mpf(x))
        band = mp.mpf(10) ** (-d + 5)
        if c < mp.mpf(-1) / 3 - band:
            raise DomainError("cos x < -1/3: no regular spherical simplex with this edge")
        gram = [[mp.mpf(1) if i == j else c for j in range(4)] for i in range(4)]
        low = [[mp.mpf(0)] * 4 for _ in range(4)]
        for i in range(4):
            for j in range(i + 1):
                acc = gram[i][j] - mp.fsum(low[i][k] * low[j][k] for k in range(j))
                if i == j:
                    low[i][i] = mp.sqrt(acc) if acc > 0 else mp.mpf(0)
                elif low[j][j] != 0:
                    low[i][j] = acc / low[j][j]
    return SphericalSimplex.from_vertices(low, d)


def contains(simplex: SphericalSimplex, p) -> bool:
    coeffs = simplex.barycentric(p)
    eps = simplex.membership_eps
    return all(c >= -eps for c in coeffs)


def centroid(simplex: SphericalSimplex) -> list[mp.mpf]:
    with mp.workdps(simplex.precision_digits):
        s = [mp.fsum(v[i] for v in simplex.vertices) for i in range(4)]
        n = mp.sqrt(mp.fsum(c * c for c in s))
        return [c / n for c in s]
