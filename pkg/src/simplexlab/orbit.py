"""Facet-reflection orbits of a regular spherical simplex.

Starting from one seed tile T_0, generation n+1 holds every simplex obtained
by reflecting a tile of an earlier generation in the hyperplane through one
of its facets, minus the ones already seen.  We report how many tiles and
vertices appear, whether generation stops producing new tiles, and how many
tiles cover sample points that avoid every tile boundary.

Whether the vertex set is finite, and whether the covering multiplicity is
constant off the boundaries, are open hypotheses in general.  The counts
below are evidence about them for the generated tiles only.  Tiles are
deduplicated by rounded coordinates, not exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np

from .errors import KeyUnstable, SingularSimplex
from .hiprec import PiMultiple
from .ratlab import SCHEMA
from .simplex import SphericalSimplex, dihedral_to_edge, make_vertices

DEFAULT_DIGITS = 60
DEFAULT_QUANTUM = 40
W_MARGIN = 1e-8


@dataclass(frozen=True)
class Isometry:
    matrix: tuple[tuple[mp.mpf, ...], ...]
    precision_digits: int

    def apply(self, v) -> tuple[mp.mpf, ...]:
        with mp.workdps(self.precision_digits):
            return tuple(mp.fsum(m * c for m, c in zip(row, v)) for row in self.matrix)

    def det(self) -> mp.mpf:
        with mp.workdps(self.precision_digits):
            return mp.det(mp.matrix(self.matrix))

    def orthogonality_defect(self) -> mp.mpf:
        """max |M^T M - I| entry."""
        with mp.workdps(self.precision_digits):
            m = mp.matrix(self.matrix)
            return mp.mnorm(m.T * m - mp.eye(4), 1)


@dataclass(frozen=True)
class Tile:
    simplex: SphericalSimplex
    depth: int
    parent_facet: int | None
    parent: int | None
    key: bytes


@dataclass
class OrbitReport:
    seed_phi: str
    tiles_per_depth: list[int]
    distinct_tiles: int
    distinct_vertices: int
    closed: bool
    stop_reason: str
    multiplicity_samples: list[tuple[list[float], int]]
    config: dict
    warnings: list[str] = field(default_factory=list)
    tiles: list[Tile] = field(default_factory=list, repr=False)

    @property
    def multiplicity_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for _, c in self.multiplicity_samples:
            hist[c] = hist.get(c, 0) + 1
        return dict(sorted(hist.items()))

    def evidence(self) -> dict:
        counts = {c for _, c in self.multiplicity_samples}
        return {
            "h1_finite_vertices": "closure reached" if self.closed else "not closed within caps",
            "h2_constant_multiplicity": (
                "constant over samples" if len(counts) == 1
                else "no samples" if not counts else "varies over samples"
            ),
        }

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "seed_phi": self.seed_phi,
            "config": self.config,
            "tiles_per_depth": self.tiles_per_depth,
            "distinct_tiles": self.distinct_tiles,
            "distinct_vertices": self.distinct_vertices,
            "closed": self.closed,
            "stop_reason": self.stop_reason,
            "multiplicity_histogram": {str(k): v for k, v in self.multiplicity_histogram.items()},
            "multiplicity_samples": [
                {"point": [float(f"{c:.17g}") for c in p], "count": n}
                for p, n in self.multiplicity_samples
            ],
            "evidence": self.evidence(),
            "warnings": self.warnings,
        }


def _det3(m) -> mp.mpf:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def _facet_normal(a, b, c) -> list[mp.mpf]:
    """Unit vector orthogonal to a, b, c in R^4 (signed 3x3 minors)."""
    rows = [a, b, c]
    n = []
    for i in range(4):
        cols = [j for j in range(4) if j != i]
        m = [[r[j] for j in cols] for r in rows]
        n.append((-1) ** i * _det3(m))
    norm = mp.sqrt(mp.fsum(x * x for x in n))
    if norm == 0:
        raise SingularSimplex("facet vertices are linearly dependent")
    return [x / norm for x in n]


def reflect_across_facet(s: SphericalSimplex, facet: int) -> tuple[SphericalSimplex, Isometry]:
    """Mirror ``s`` in the hyperplane through the facet opposite vertex ``facet``.

    The three facet vertices are copied unchanged, so parent and image share
    that facet exactly.
    """
    if facet not in range(4):
        raise ValueError("facet index must be 0..3")
    if s.is_degenerate():
        raise SingularSimplex("Gram matrix has rank < 4")
    d = s.precision_digits
    with mp.workdps(d):
        others = [s.vertices[i] for i in range(4) if i != facet]
        n = _facet_normal(*others)
        mat = tuple(
            tuple((1 if i == j else 0) - 2 * n[i] * n[j] for j in range(4)) for i in range(4)
        )
        v = s.vertices[facet]
        dot = mp.fsum(a * b for a, b in zip(v, n))
        moved = tuple(a - 2 * dot * b for a, b in zip(v, n))
        verts = list(s.vertices)
        verts[facet] = moved
    return SphericalSimplex(tuple(verts), s.gram, d), Isometry(mat, d)


def _round_coords(v, quantum: int, band: mp.mpf) -> tuple[int, ...] | None:
    scale = mp.mpf(10) ** quantum
    out = []
    for c in v:
        y = c * scale
        fl = mp.floor(y)
        if abs(y - fl - mp.mpf(1) / 2) < band * scale:
            return None
        out.append(int(mp.nint(y)))
    return tuple(out)


def _stable_round(v, quantum: int, digits: int) -> tuple[int, tuple[int, ...]]:
    q = quantum
    with mp.workdps(digits):
        while q <= digits - 10:
            band = mp.mpf(10) ** (-(q + digits) // 2)
            r = _round_coords(v, q, band)
            if r is not None:
                return q, r
            q += 2
    raise KeyUnstable(f"coordinate rounding unstable up to {digits - 10} digits")


def vertex_key(v, quantum: int, digits: int) -> tuple[int, ...]:
    q, r = _stable_round(v, quantum, digits)
    return (q,) + r


def canonical_key(s: SphericalSimplex, quantum: int = DEFAULT_QUANTUM) -> bytes:
    """Order-independent key of the vertex set at ``quantum`` decimal digits.

    A coordinate lying within 10**(-(quantum + precision)/2) of a rounding
    boundary forces the whole key to be recomputed at quantum + 2 digits.
    """
    d = s.precision_digits
    if quantum > d - 10:
        raise ValueError("quantum must be <= precision_digits - 10")
    q = quantum
    while True:
        with mp.workdps(d):
            band = mp.mpf(10) ** (-(q + d) // 2)
            rows = [_round_coords(v, q, band) for v in s.vertices]
        if all(r is not None for r in rows):
            break
        q += 2
        if q > d - 10:
            raise KeyUnstable(f"key refinement exhausted {d} working digits")
    body = ";".join(",".join(str(c) for c in r) for r in sorted(rows))
    return f"{q}|{body}".encode()


def _sample_multiplicities(tiles: list[Tile], samples: int, seed: int):
    invs = np.stack([np.linalg.inv(t.simplex.as_array()) for t in tiles])
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0x0B17])))
    out: list[tuple[list[float], int]] = []
    attempts = 0
    while len(out) < samples and attempts < 100 * samples:
        batch = rng.standard_normal((256, 4))
        batch /= np.linalg.norm(batch, axis=1, keepdims=True)
        attempts += len(batch)
        coeffs = np.einsum("pk,tkj->tpj", batch, invs)
        in_w = np.all(np.abs(coeffs) > W_MARGIN, axis=(0, 2))
        counts = np.sum(np.all(coeffs > 0, axis=2), axis=0)
        for p, ok, c in zip(batch, in_w, counts):
            if ok and len(out) < samples:
                out.append((p.tolist(), int(c)))
    return out


def seed_simplex(seed_phi, digits: int = DEFAULT_DIGITS) -> SphericalSimplex:
    if isinstance(seed_phi, (Fraction, int)):
        seed_phi = PiMultiple(seed_phi)
    x = dihedral_to_edge(seed_phi, digits)
    return make_vertices(x, digits)


def explore(
    seed_phi,
    max_depth: int,
    max_tiles: int = 5000,
    digits: int = DEFAULT_DIGITS,
    quantum: int = DEFAULT_QUANTUM,
    samples: int = 100,
    sample_seed: int = 1,
    strict: bool = True,
) -> OrbitReport:
    """Breadth-first facet-reflection orbit of sigma(seed_phi).

    ``seed_phi`` is a :class:`PiMultiple` (a bare Fraction is read as a
    multiple of pi).  Generation stops when a depth adds no new tile
    (``closed``), at ``max_depth``, or when ``max_tiles`` would be exceeded.
    With ``strict=False`` an unstable key skips that tile and adds a warning
    instead of raising KeyUnstable.
    """
    if max_depth < 0 or max_tiles < 1:
        raise ValueError("caps must be positive")
    if isinstance(seed_phi, (Fraction, int)):
        seed_phi = PiMultiple(seed_phi)
    s0 = seed_simplex(seed_phi, digits)
    t0 = Tile(s0, 0, None, None, canonical_key(s0, quantum))
    tiles = [t0]
    seen = {t0.key}
    per_depth = [1]
    frontier = [0]
    warnings: list[str] = []
    closed = False
    stop = "max_depth"
    for depth in range(1, max_depth + 1):
        new: list[int] = []
        capped = False
        for idx in frontier:
            parent = tiles[idx]
            for facet in range(4):
                img, _ = reflect_across_facet(parent.simplex, facet)
                try:
                    key = canonical_key(img, quantum)
                except KeyUnstable as e:
                    if strict:
                        raise
                    warnings.append(f"depth {depth}, tile {idx}, facet {facet}: {e}")
                    continue
                if key in seen:
                    continue
                if len(tiles) >= max_tiles:
                    capped = True
                    break
                seen.add(key)
                tiles.append(Tile(img, depth, facet, idx, key))
                new.append(len(tiles) - 1)
            if capped:
                break
        per_depth.append(len(new))
        if capped:
            stop = "max_tiles"
            break
        if not new:
            closed = True
            stop = "closed"
            break
        frontier = new

    vkeys = set()
    for t in tiles:
        for v in t.simplex.vertices:
            vkeys.add(vertex_key(v, quantum, digits))

    mult = _sample_multiplicities(tiles, samples, sample_seed) if samples else []
    config = {
        "max_depth": max_depth,
        "max_tiles": max_tiles,
        "digits": digits,
        "quantum": quantum,
        "samples": samples,
        "sample_seed": sample_seed,
        "w_margin": W_MARGIN,
    }
    return OrbitReport(
        seed_phi=str(seed_phi),
        tiles_per_depth=per_depth,
        distinct_tiles=len(tiles),
        distinct_vertices=len(vkeys),
        closed=closed,
        stop_reason=stop,
        multiplicity_samples=mult,
        config=config,
        warnings=warnings,
        tiles=tiles,
    )
