"""Exact low-dimensional polyhedral geometry over the rationals.

Supports the 1- and 2-dimensional convex regions needed for chamber
decompositions, broken-line tracing and scattering: H-representation with
derived vertices/rays, half-plane cuts, first-hit ray casting.  All
coordinates are Fractions; no floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

Pt = Tuple[Fraction, ...]
IVec = Tuple[int, ...]


def frac_pt(*coords) -> Pt:
    return tuple(Fraction(c) for c in coords)


def vadd(a: Sequence, b: Sequence) -> Pt:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence, b: Sequence) -> Pt:
    return tuple(x - y for x, y in zip(a, b))


def vscale(a: Sequence, s) -> Pt:
    return tuple(Fraction(s) * x for x in a)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def cross2(a: Sequence, b: Sequence):
    return a[0] * b[1] - a[1] * b[0]


def perp2(a: Sequence) -> Tuple:
    return (-a[1], a[0])


def primitive(v: Sequence[int]) -> IVec:
    """Divide an integer vector by the gcd of its entries (keeping direction)."""
    g = 0
    for x in v:
        g = gcd(g, abs(int(x)))
    if g == 0:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def rational_direction(v: Sequence[Fraction]) -> IVec:
    """Primitive integer vector positively proportional to v."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    return primitive(ints)


# ---------------------------------------------------------------------------
# convex regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfSpace:
    """normal . x >= const"""
    normal: Pt
    const: Fraction

    def value(self, p: Sequence) -> Fraction:
        return dot(self.normal, p) - self.const

    def contains(self, p: Sequence) -> bool:
        return self.value(p) >= 0


class ConvexRegion:
    """A convex polyhedron in dimension 1 or 2 given by half-space constraints.

    Vertices and rays are computed on demand.  Designed for the small,
    exact instances arising from walls and chambers, not for bulk geometry.
    """

    def __init__(self, dim: int, halfspaces: Sequence[HalfSpace]):
        self.dim = dim
        self.halfspaces = list(halfspaces)
        self._vrep: Optional[Tuple[List[Pt], List[IVec]]] = None

    # -- constructors ---------------------------------------------------------
    @staticmethod
    def from_vertices(dim: int, vertices: Sequence[Pt],
                      rays: Sequence[Sequence[int]] = ()) -> "ConvexRegion":
        vertices = [tuple(Fraction(c) for c in v) for v in vertices]
        rays = [tuple(int(c) for c in r) for r in rays]
        if dim == 1:
            return ConvexRegion._from_v_1d(vertices, rays)
        return ConvexRegion._from_v_2d(vertices, rays)

    @staticmethod
    def _from_v_1d(vertices, rays) -> "ConvexRegion":
        xs = [v[0] for v in vertices]
        hs = []
        lo_open = any(r[0] < 0 for r in rays)
        hi_open = any(r[0] > 0 for r in rays)
        if not lo_open:
            hs.append(HalfSpace((Fraction(1),), min(xs)))
        if not hi_open:
            hs.append(HalfSpace((Fraction(-1),), -max(xs)))
        return ConvexRegion(1, hs)

    @staticmethod
    def _from_v_2d(vertices, rays) -> "ConvexRegion":
        pts = list(vertices)
        if not pts:
            raise ValueError("need at least one vertex")
        # every supporting line is spanned by generators; enumerate candidates
        gens: List[Tuple[Pt, Optional[IVec]]] = [(p, None) for p in pts]
        cands: List[HalfSpace] = []
        n = len(pts)
        for i in range(n):
            for j in range(i + 1, n):
                d = vsub(pts[j], pts[i])
                if any(d):
                    nrm = perp2(d)
                    cands.append(HalfSpace(nrm, dot(nrm, pts[i])))
                    cands.append(HalfSpace(vscale(nrm, -1), -dot(nrm, pts[i])))
        for p in pts:
            for r in rays:
                nrm = perp2(r)
                cands.append(HalfSpace(nrm, dot(nrm, p)))
                cands.append(HalfSpace(vscale(nrm, -1), -dot(nrm, p)))
        for r1 in rays:
            for r2 in rays:
                d = vsub(r2, r1)
                if any(d):
                    for p in pts:
                        nrm = perp2(d)
                        cands.append(HalfSpace(nrm, dot(nrm, p)))
                        cands.append(HalfSpace(vscale(nrm, -1), -dot(nrm, p)))
        if len(pts) == 1 and not rays:
            # a point: cut it out exactly
            p = pts[0]
            cands = [HalfSpace((Fraction(1), Fraction(0)), p[0]),
                     HalfSpace((Fraction(-1), Fraction(0)), -p[0]),
                     HalfSpace((Fraction(0), Fraction(1)), p[1]),
                     HalfSpace((Fraction(0), Fraction(-1)), -p[1])]
        kept = []
        for h in cands:
            if all(h.contains(p) for p in pts) and \
               all(dot(h.normal, r) >= 0 for r in rays):
                kept.append(h)
        # prune duplicates
        seen = set()
        hs = []
        for h in kept:
            key = _canonical_halfspace(h)
            if key not in seen:
                seen.add(key)
                hs.append(h)
        return ConvexRegion(2, hs)

    # -- basic queries ----------------------------------------------------------
    def contains(self, p: Sequence) -> bool:
        return all(h.contains(p) for h in self.halfspaces)

    def strictly_contains(self, p: Sequence) -> bool:
        return all(h.value(p) > 0 for h in self.halfspaces
                   if not self._is_implicit_equality(h))

    def _is_implicit_equality(self, h: HalfSpace) -> bool:
        neg = _canonical_halfspace(HalfSpace(vscale(h.normal, -1), -h.const))
        return any(_canonical_halfspace(g) == neg for g in self.halfspaces)

    def intersect_halfspace(self, h: HalfSpace) -> "ConvexRegion":
        return ConvexRegion(self.dim, self.halfspaces + [h])

    def vrep(self) -> Tuple[List[Pt], List[IVec]]:
        if self._vrep is None:
            self._vrep = self._compute_vrep()
        return self._vrep

    def is_empty(self) -> bool:
        vs, rs = self.vrep()
        return not vs

    def dimension(self) -> int:
        vs, rs = self.vrep()
        if not vs:
            return -1
        if self.dim == 1:
            if len(vs) >= 2 or rs:
                return 1
            return 0
        dirs = []
        for v in vs[1:]:
            dirs.append(vsub(v, vs[0]))
        dirs.extend(rs)
        rank = 0
        base = None
        for d in dirs:
            if any(d):
                if base is None:
                    base = d
                    rank = 1
                elif cross2(base, d) != 0:
                    rank = 2
                    break
        return rank

    def interior_point(self) -> Optional[Pt]:
        """A rational point in the relative interior."""
        vs, rs = self.vrep()
        if not vs:
            return None
        acc = [Fraction(0)] * self.dim
        for v in vs:
            acc = list(vadd(acc, v))
        acc = [a / len(vs) for a in acc]
        for r in rs:
            acc = list(vadd(acc, vscale(r, Fraction(1, 7 * len(rs)))))
        return tuple(acc)

    def recession_rays(self) -> List[IVec]:
        return self.vrep()[1]

    def recession_contains(self, d: Sequence) -> bool:
        return all(dot(h.normal, d) >= 0 for h in self.halfspaces)

    # -- vrep computation --------------------------------------------------------
    def _compute_vrep(self):
        if self.dim == 1:
            return self._vrep_1d()
        return self._vrep_2d()

    def _vrep_1d(self):
        lo, hi = None, None
        for h in self.halfspaces:
            a = h.normal[0]
            if a == 0:
                if h.const > 0:
                    return [], []
                continue
            bound = Fraction(h.const, a)
            if a > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is not None and hi is not None and lo > hi:
            return [], []
        vs, rs = [], []
        if lo is None and hi is None:
            vs.append((Fraction(0),))
            rs = [(1,), (-1,)]
        elif lo is None:
            vs.append((hi,))
            rs = [(-1,)]
        elif hi is None:
            vs.append((lo,))
            rs = [(1,)]
        else:
            vs.append((lo,))
            if hi != lo:
                vs.append((hi,))
        return vs, rs

    def _vrep_2d(self):
        hs = self.halfspaces
        verts: List[Pt] = []
        n = len(hs)
        for i in range(n):
            for j in range(i + 1, n):
                a, b = hs[i], hs[j]
                det = cross2(a.normal, b.normal)
                if det == 0:
                    continue
                x = (a.const * b.normal[1] - b.const * a.normal[1]) / det
                y = (a.normal[0] * b.const - b.normal[0] * a.const) / det
                p = (x, y)
                if self.contains(p) and p not in verts:
                    verts.append(p)
        rays: List[IVec] = []
        # candidate recession rays: directions along constraint boundaries
        cand_dirs = []
        for h in hs:
            d = perp2(h.normal)
            cand_dirs.append(d)
            cand_dirs.append(vscale(d, -1))
        for d in cand_dirs:
            if any(d) and self.recession_contains(d):
                dd = rational_direction(d)
                if dd not in rays:
                    rays.append(dd)
        if not verts:
            if not hs:
                # whole plane; represent with one base point and four rays
                return ([(Fraction(0), Fraction(0))],
                        [(1, 0), (-1, 0), (0, 1), (0, -1)])
            # could be a halfplane/strip without constraint intersections
            p = self._any_feasible_point()
            if p is None:
                return [], []
            verts.append(p)
            if len({tuple(h.normal) for h in hs}) >= 1:
                for h in hs:
                    d = rational_direction(h.normal)
                    if self.recession_contains(d) and d not in rays:
                        rays.append(d)
        # prune rays: for a 2D region keep extreme ones only -- harmless to
        # keep extras for our uses (containment tests drive the logic).
        return verts, rays

    def _any_feasible_point(self) -> Optional[Pt]:
        # small exact LP via vertex enumeration on a big box fallback
        big = Fraction(1 << 20)
        box = [HalfSpace((Fraction(1), Fraction(0)), -big),
               HalfSpace((Fraction(-1), Fraction(0)), -big),
               HalfSpace((Fraction(0), Fraction(1)), -big),
               HalfSpace((Fraction(0), Fraction(-1)), -big)]
        clipped = ConvexRegion(2, self.halfspaces + box)
        vs, _ = clipped._vrep_2d_no_recursion()
        if not vs:
            return None
        acc = [Fraction(0), Fraction(0)]
        for v in vs:
            acc = list(vadd(acc, v))
        return (acc[0] / len(vs), acc[1] / len(vs))

    def _vrep_2d_no_recursion(self):
        hs = self.halfspaces
        verts = []
        n = len(hs)
        for i in range(n):
            for j in range(i + 1, n):
                a, b = hs[i], hs[j]
                det = cross2(a.normal, b.normal)
                if det == 0:
                    continue
                x = (a.const * b.normal[1] - b.const * a.normal[1]) / det
                y = (a.normal[0] * b.const - b.normal[0] * a.const) / det
                p = (x, y)
                if self.contains(p) and p not in verts:
                    verts.append(p)
        return verts, []

    # -- facets -------------------------------------------------------------------
    def facets(self) -> List[Tuple[HalfSpace, "ConvexRegion"]]:
        """Facet pieces (h, face) where face = region cut to the boundary of h."""
        out = []
        seen = set()
        for h in self.halfspaces:
            key = _canonical_halfspace(h)
            if key in seen:
                continue
            seen.add(key)
            eq = self.intersect_halfspace(
                HalfSpace(vscale(h.normal, -1), -h.const))
            if not eq.is_empty() and eq.dimension() == self.dim - 1:
                out.append((h, eq))
        return out

    def __repr__(self):
        vs, rs = self.vrep()
        return f"ConvexRegion(dim={self.dim}, verts={vs}, rays={rs})"


def _canonical_halfspace(h: HalfSpace):
    nums = list(h.normal) + [h.const]
    dens = [Fraction(x).denominator for x in nums]
    m = 1
    for d in dens:
        m = m * d // gcd(m, d)
    ints = [int(Fraction(x) * m) for x in nums]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g:
        ints = [x // g for x in ints]
    return tuple(ints)


# ---------------------------------------------------------------------------
# ray casting
# ---------------------------------------------------------------------------

@dataclass
class RayHit:
    """First boundary hit of a ray inside a region."""
    time: Fraction          # parameter of the hit along the ray
    point: Pt
    halfspace: HalfSpace    # facet constraint achieving the hit
    simple: bool            # True if a single facet is hit transversally


def first_exit(region: ConvexRegion, start: Pt, direction: Sequence,
               eps_from: Fraction = Fraction(0)) -> Optional[RayHit]:
    """First exit of start + t*direction, t > eps_from, from the region.

    Returns None if the ray stays inside forever (direction in the recession
    cone).  simple=False flags hits where two or more facets are reached at
    the same time (corner hit) -- callers treat that as non-generic.
    """
    best_t: Optional[Fraction] = None
    best_h: Optional[HalfSpace] = None
    count = 0
    for h in region.halfspaces:
        dv = dot(h.normal, direction)
        if dv >= 0:
            continue
        t = -h.value(start) / dv  # value + t*dv = 0
        if t <= eps_from:
            # already on/over this wall; treat touching as immediate exit
            if t == eps_from and h.value(start) == 0 and eps_from == 0:
                return RayHit(Fraction(0), tuple(start), h, False)
            continue
        if best_t is None or t < best_t:
            best_t, best_h, count = t, h, 1
        elif t == best_t:
            count += 1
    if best_t is None:
        return None
    pt = vadd(start, vscale(direction, best_t))
    return RayHit(best_t, pt, best_h, count == 1)


def segment_region(dim: int, a: Pt, b: Pt) -> ConvexRegion:
    return ConvexRegion.from_vertices(dim, [a, b])


def line_through(p: Pt, direction: Sequence[int]) -> Tuple[Pt, Fraction]:
    """Normal form (n, c) of the 2D line through p with the given direction."""
    n = perp2(direction)
    n = primitive(n)
    return tuple(Fraction(x) for x in n), dot(n, p)
