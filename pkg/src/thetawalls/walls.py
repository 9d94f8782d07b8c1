"""Wall structures: walls and slabs, chambers and joints, crossing maps,
slab rings with their localization homomorphisms, and the consistency checks
in codimensions zero, one and two.

Conventions fixed here and used everywhere else:

* a crossing from chamber u to u' applies z^m -> f^<n, lam(m)> z^T(m) with
  n the primitive conormal of the separating wall positive on the *source*
  side and T the chart transport (identity for codimension-zero walls, the
  piece transition plus kink shift for slabs);
* slab ring elements are written z^(lam, q) Z_+^a or z^(lam, q) Z_-^a,
  encoded as exponents (lam_coord, zpow) over the monoid part, with the
  relation Z_+ Z_- = f_slab z^kappa applied during multiplication;
* Z_+ lifts the chosen complement xi(rho) pointing into sigma(rho).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import Cyclo, Element, Exponent, TruncationSpec, Vec
from .complex import AffineComplex, MPAFunction
from .geometry import (ConvexRegion, HalfSpace, Pt, cross2, dot, perp2,
                       primitive, rational_direction, vadd, vscale, vsub)


class WallError(ValueError):
    pass


INF = object()   # marker for unbounded interval ends


# ---------------------------------------------------------------------------
# walls
# ---------------------------------------------------------------------------

@dataclass
class Wall:
    """A wall or slab inside one maximal cell.

    The support is the segment [support_base, support_end] or the ray
    support_base + R_{>=0} support_dir (support_end None), in the chart of
    `cell`.  Slabs (codim 1) record the piece of the codimension-one cell
    they sit in.
    """

    cell: str
    support_base: Pt
    support_dir: Vec
    support_end: Optional[Pt]
    function: Element
    codim: int = 0
    rho: Optional[Tuple[str, int]] = None

    def __post_init__(self):
        self.support_base = tuple(Fraction(c) for c in self.support_base)
        if self.support_end is not None:
            self.support_end = tuple(Fraction(c) for c in self.support_end)
        if self.support_dir:
            self.support_dir = primitive(self.support_dir)

    def line_key(self) -> Tuple:
        n = primitive(perp2(self.support_dir))
        c = dot(n, self.support_base)
        if n[0] < 0 or (n[0] == 0 and n[1] < 0):
            n = tuple(-x for x in n)
            c = -c
        return (self.cell, n, c)

    def line_dir(self) -> Vec:
        """Canonical direction shared by all walls on this line."""
        _, n, _ = self.line_key()
        return (-n[1], n[0])

    def contains_point(self, p: Pt) -> bool:
        if not self.support_dir:
            return tuple(p) == tuple(self.support_base)
        d = vsub(p, self.support_base)
        if cross2(self.support_dir, d) != 0:
            return False
        t = _param_on_line(d, self.support_dir)
        if t < 0:
            return False
        if self.support_end is None:
            return True
        tmax = _param_on_line(vsub(self.support_end, self.support_base),
                              self.support_dir)
        return t <= tmax

    def endpoints(self) -> List[Pt]:
        out = [tuple(self.support_base)]
        if self.support_end is not None:
            out.append(tuple(self.support_end))
        return out

    def interval_on(self, origin: Pt, direction: Vec):
        """(lo, hi) parameters of the support along the oriented line;
        INF marks an unbounded end."""
        t0 = _param_on_line(vsub(self.support_base, origin), direction)
        if self.support_end is not None:
            t1 = _param_on_line(vsub(self.support_end, origin), direction)
            return (t0, t1) if t0 <= t1 else (t1, t0)
        if dot(direction, self.support_dir) > 0:
            return (t0, INF)
        return (INF, t0)


def _param_on_line(delta, direction):
    for i, x in enumerate(direction):
        if x:
            return Fraction(delta[i], x)
    raise WallError("zero direction")


# ---------------------------------------------------------------------------
# chambers and joints
# ---------------------------------------------------------------------------

@dataclass
class Chamber:
    cid: str
    sigma: str
    region: ConvexRegion
    boundary_facets: List[Tuple[HalfSpace, str]] = field(default_factory=list)

    def interior_point(self) -> Pt:
        return self.region.interior_point()


@dataclass
class Joint:
    jid: str
    codim: int                    # 0, 1, 2 for interior; -1 for boundary
    boundary: bool
    charts: Dict[str, Pt]         # adjacent maximal cell -> location
    walls: List[int]              # indices into the structure wall list
    min_cell: str
    on_delta: bool = False


# ---------------------------------------------------------------------------
# angle utilities (exact)
# ---------------------------------------------------------------------------

def _angle_cmp(a: Vec, b: Vec) -> int:
    """Counterclockwise comparison, starting just above the +x axis."""
    ha = 0 if (a[1] > 0 or (a[1] == 0 and a[0] > 0)) else 1
    hb = 0 if (b[1] > 0 or (b[1] == 0 and b[0] > 0)) else 1
    if ha != hb:
        return -1 if ha < hb else 1
    cr = cross2(a, b)
    return -1 if cr > 0 else (1 if cr < 0 else 0)


def _angle_pos_from(base: Vec, v: Vec) -> Tuple:
    """Sortable position of v going counterclockwise from base (exclusive)."""
    cr = cross2(base, v)
    dt = dot(base, v)
    if cr == 0:
        cls = 4 if dt > 0 else 2    # along base sorts last, opposite mid
    elif cr > 0:
        cls = 1
    else:
        cls = 3
    return (cls, Fraction(-dt, abs(cr)) if cr != 0 else Fraction(0))


# ---------------------------------------------------------------------------
# the wall structure
# ---------------------------------------------------------------------------

class WallStructure:
    """A set of walls on a complex, with derived chambers and joints."""

    def __init__(self, cx: AffineComplex, phi: MPAFunction, spec: TruncationSpec,
                 walls: Sequence[Wall], coeff_order: int = 1,
                 gluing: Optional["OpenGluingData"] = None,
                 auto_slabs: bool = True):
        self.cx = cx
        self.phi = phi
        self.spec = spec
        self.coeff_order = coeff_order
        self.gluing = gluing
        self.log: List[str] = []
        self._chambers: Optional[List[Chamber]] = None
        self._joints: Optional[List[Joint]] = None
        ws = [replace(w) for w in walls]
        if auto_slabs:
            ws = self._complete_slab_coverage(ws)
        self.walls: List[Wall] = self._normalize(ws)

    def copy_with_walls(self, walls: Sequence[Wall]) -> "WallStructure":
        return WallStructure(self.cx, self.phi, self.spec, walls,
                             self.coeff_order, self.gluing, auto_slabs=True)

    # -- contexts ----------------------------------------------------------------
    def ctx(self, sigma: str) -> str:
        return f"{self.cx.name}/{sigma}"

    def slab_ctx(self, wall: Wall) -> str:
        b = ",".join(str(c) for c in wall.support_base)
        return f"{self.cx.name}/slab:{wall.rho[0]}:{wall.rho[1]}:{b}"

    def one(self, sigma: str) -> Element:
        return Element.one(self.spec, self.ctx(sigma), self._rank(),
                           self.coeff_order)

    def _rank(self) -> int:
        return self.cx.dim

    # -- normalization -------------------------------------------------------------
    def _complete_slab_coverage(self, walls: List[Wall]) -> List[Wall]:
        covered = {w.rho for w in walls if w.codim == 1}
        for key in self.cx.interior_pieces():
            if key in covered:
                continue
            p = self.cx.piece(key)
            sigma = p.sigma
            if self.cx.dim == 1:
                _, base = self.cx.rho_line(key[0], sigma)
                f = Element.one(self.spec, self.ctx(sigma), 1, self.coeff_order)
                walls.append(Wall(sigma, base, (), None, f, 1, key))
            else:
                reg = self.cx.piece_region(key, sigma)
                vs, rs = reg.vrep()
                base = vs[0]
                if rs:
                    d, end = rs[0], None
                elif len(vs) > 1:
                    end = vs[1]
                    d = rational_direction(vsub(end, base))
                else:
                    raise WallError(f"degenerate piece {key}")
                f = Element.one(self.spec, self.ctx(sigma), 2, self.coeff_order)
                walls.append(Wall(sigma, base, d, end, f, 1, key))
            self.log.append(f"inserted trivial slab on {key}")
        return walls

    def _normalize(self, walls: List[Wall]) -> List[Wall]:
        for w in walls:
            if w.function.context != self.ctx(w.cell):
                raise WallError(
                    f"wall function context {w.function.context} does not "
                    f"match cell {w.cell}")
        if self.cx.dim == 1:
            return self._merge_point_walls(walls)
        by_line: Dict[Tuple, List[Wall]] = {}
        by_cell: Dict[str, List[Wall]] = {}
        for w in walls:
            by_cell.setdefault(w.cell, []).append(w)
            by_line.setdefault(w.line_key(), []).append(w)
        out: List[Wall] = []
        for lk in sorted(by_line, key=str):
            group = by_line[lk]
            others = [w2 for w2 in by_cell[group[0].cell]
                      if w2.line_key() != lk]
            out.extend(self._rebuild_line(group, others))
        return out

    def _rebuild_line(self, group: List[Wall], others: List[Wall]) -> List[Wall]:
        origin = group[0].support_base
        direction = group[0].line_dir()
        n = perp2(direction)
        marks = set()
        lo_inf = hi_inf = False
        for w in group:
            lo, hi = w.interval_on(origin, direction)
            if lo is INF:
                lo_inf = True
            else:
                marks.add(lo)
            if hi is INF:
                hi_inf = True
            else:
                marks.add(hi)
        # cuts from transversal walls and endpoints of parallel ones
        for w2 in others:
            dv = dot(n, w2.support_dir) if w2.support_dir else None
            if w2.support_dir and dv != 0:
                t2 = Fraction(dot(n, vsub(origin, w2.support_base)) * -1, dv)
                p = vadd(w2.support_base, vscale(w2.support_dir, t2))
                if w2.contains_point(p):
                    t = _param_on_line(vsub(p, origin), direction)
                    marks.add(t)
            else:
                for p in w2.endpoints():
                    if cross2(direction, vsub(p, origin)) == 0:
                        marks.add(_param_on_line(vsub(p, origin), direction))
        ts = sorted(marks)
        intervals = []
        if lo_inf and ts:
            intervals.append((INF, ts[0]))
        intervals += list(zip(ts, ts[1:]))
        if hi_inf and ts:
            intervals.append((ts[-1], INF))
        out = []
        for (a, b) in intervals:
            if a is INF:
                mid = b - 1
            elif b is INF:
                mid = a + 1
            else:
                if a == b:
                    continue
                mid = a + (b - a) / 2
            pmid = vadd(origin, vscale(direction, mid))
            cover = [w for w in group if w.contains_point(pmid)]
            if not cover:
                continue
            f = cover[0].function
            for w in cover[1:]:
                f = f * w.function
            codim = max(w.codim for w in cover)
            rho = None
            for w in cover:
                if w.codim == 1:
                    rho = w.rho
            if a is INF:
                base = vadd(origin, vscale(direction, b))
                out.append(Wall(cover[0].cell, base,
                                tuple(-x for x in direction), None, f, codim, rho))
            else:
                base = vadd(origin, vscale(direction, a))
                end = None if b is INF else vadd(origin, vscale(direction, b))
                out.append(Wall(cover[0].cell, base, direction, end, f,
                                codim, rho))
        return out

    def _merge_point_walls(self, walls: List[Wall]) -> List[Wall]:
        grouped: Dict[Tuple, Wall] = {}
        for w in walls:
            key = (w.cell, tuple(w.support_base))
            if key in grouped:
                g = grouped[key]
                grouped[key] = replace(g, function=g.function * w.function,
                                       codim=max(g.codim, w.codim),
                                       rho=g.rho or w.rho)
            else:
                grouped[key] = w
        return [grouped[k] for k in sorted(grouped, key=str)]

    # -- chambers -------------------------------------------------------------------
    def chambers(self) -> List[Chamber]:
        if self._chambers is None:
            self._build_chambers()
        return self._chambers

    def _build_chambers(self):
        chambers: List[Chamber] = []
        for sigma in self.cx.maximal_cells():
            reg = self.cx.cell_region(sigma)
            if self.cx.dim == 1:
                chambers.append(Chamber(f"{sigma}#0", sigma, reg))
                continue
            lines = []
            seen = set()
            for w in self.walls:
                if w.cell != sigma or w.codim != 0:
                    continue
                _, n, c = w.line_key()
                if (n, c) not in seen:
                    seen.add((n, c))
                    lines.append((tuple(Fraction(x) for x in n), Fraction(c)))
            atoms = [reg]
            for (n, c) in lines:
                nxt = []
                for a in atoms:
                    for h in (HalfSpace(n, c),
                              HalfSpace(tuple(-x for x in n), -c)):
                        piece = a.intersect_halfspace(h)
                        if not piece.is_empty() and piece.dimension() == 2:
                            nxt.append(piece)
                atoms = nxt
            parent = list(range(len(atoms)))

            def find(i):
                while parent[i] != i:
                    parent[i] = parent[parent[i]]
                    i = parent[i]
                return i

            for i in range(len(atoms)):
                for j in range(i + 1, len(atoms)):
                    shared = self._shared_facet(atoms[i], atoms[j])
                    if shared is None:
                        continue
                    mid = shared.interior_point()
                    if not any(w.cell == sigma and w.codim == 0
                               and w.contains_point(mid) for w in self.walls):
                        parent[find(i)] = find(j)
            groups: Dict[int, List[ConvexRegion]] = {}
            for i in range(len(atoms)):
                groups.setdefault(find(i), []).append(atoms[i])
            regs = [self._merge_convex(sigma, groups[g]) for g in groups]
            regs.sort(key=lambda r: tuple(r.interior_point()))
            for i, r in enumerate(regs):
                ch = Chamber(f"{sigma}#{i}", sigma, r)
                self._find_boundary_facets(ch)
                chambers.append(ch)
        self._chambers = chambers

    def _shared_facet(self, a: ConvexRegion, b: ConvexRegion):
        inter = ConvexRegion(2, a.halfspaces + b.halfspaces)
        if inter.is_empty() or inter.dimension() != 1:
            return None
        return inter

    def _merge_convex(self, sigma: str, members: List[ConvexRegion]) -> ConvexRegion:
        if len(members) == 1:
            return members[0]
        hs: List[HalfSpace] = []
        for m in members:
            for (h, face) in m.facets():
                mid = face.interior_point()
                if not any(o is not m and o.contains(mid) for o in members):
                    hs.append(h)
        merged = ConvexRegion(2, hs)
        for m in members:
            vs, _ = m.vrep()
            for v in vs:
                if not merged.contains(v):
                    raise WallError(f"non-convex chamber in {sigma}")
        return merged

    def _find_boundary_facets(self, ch: Chamber):
        for (h, face) in ch.region.facets():
            mid = face.interior_point()
            cell, _ = self.cx.canonical_point(ch.sigma, mid)
            if self.cx.cells[cell].dim == self.cx.dim - 1 and \
               self.cx.is_boundary(cell):
                ch.boundary_facets.append((h, cell))

    def chamber_at(self, sigma: str, point: Pt) -> Chamber:
        for ch in self.chambers():
            if ch.sigma == sigma and ch.region.contains(point):
                return ch
        raise WallError(f"no chamber of {sigma} contains {point}")

    def walls_at(self, sigma: str, point: Pt) -> List[Wall]:
        return [w for w in self.walls
                if w.cell == sigma and w.contains_point(point)]

    # -- joints ---------------------------------------------------------------------
    def joints(self) -> List[Joint]:
        if self._joints is None:
            self._build_joints()
        return self._joints

    def _build_joints(self):
        joints: Dict[Tuple, Joint] = {}
        if self.cx.dim == 1:
            self._joints = []
            return
        for w in self.walls:
            for p in w.endpoints():
                self._register_joint(joints, w.cell, p)
        for key in self.cx.interior_pieces():
            pc = self.cx.piece(key)
            reg = self.cx.piece_region(key, pc.sigma)
            vs, _ = reg.vrep()
            for p in vs:
                self._register_joint(joints, pc.sigma, p)
        for j in joints.values():
            for wi, w in enumerate(self.walls):
                pt = j.charts.get(w.cell)
                if pt is not None and w.contains_point(pt) and wi not in j.walls:
                    j.walls.append(wi)
        self._joints = [joints[k] for k in sorted(joints, key=str)]

    def _register_joint(self, joints: Dict[Tuple, Joint], sigma: str, p: Pt):
        cell, coords = self.cx.canonical_point(sigma, p)
        key = (cell, tuple(coords))
        if key in joints:
            joints[key].charts.setdefault(sigma, tuple(p))
            return
        cdim = self.cx.cells[cell].dim
        if cdim == self.cx.dim:
            boundary = False
        elif cdim == self.cx.dim - 1:
            boundary = self.cx.is_boundary(cell)
        else:
            boundary = any(self.cx.is_boundary(r)
                           for r in self.cx.parents_of(cell, self.cx.dim - 1))
        codim = -1 if boundary else self.cx.dim - cdim
        on_delta = False
        if cdim == self.cx.dim - 1 and not boundary and \
           len(self.cx.pieces.get(cell, [])) == 2:
            bary = self.cx.barycenter(cell, sigma)
            if bary is not None and tuple(bary) == tuple(p):
                on_delta = True
        charts = {sigma: tuple(p)}
        if cdim < self.cx.dim:
            rhos = [cell] if cdim == self.cx.dim - 1 else \
                self.cx.parents_of(cell, self.cx.dim - 1)
            for rho in rhos:
                for s2 in self.cx.parents_of(rho, self.cx.dim):
                    if s2 in charts or (cell, s2) not in self.cx.faces:
                        continue
                    pre = self.cx._solve_embedding(self.cx.faces[(cell, sigma)], p)
                    if pre is not None:
                        charts[s2] = self.cx.faces[(cell, s2)].apply_pt(pre)
        jid = f"j:{cell}:" + ",".join(str(c) for c in coords)
        joints[key] = Joint(jid, codim, boundary, charts, [], cell, on_delta)

    # -- crossing maps ------------------------------------------------------------------
    def cross_wall(self, elem: Element, wall: Wall, n_source: Vec) -> Element:
        """Codimension-zero crossing inside one chart."""
        if wall.codim != 0:
            raise WallError("use cross_slab for slabs")
        out = Element.zero(self.spec, elem.context, self.coeff_order)
        powers: Dict[int, Element] = {}
        for e, c in elem.terms.items():
            a = dot(n_source, e.lam)
            if a not in powers:
                powers[a] = wall.function.power(a)
            out = out + powers[a].mul_monomial(e, c)
        return out

    def function_in_chart(self, wall: Wall, sigma: str) -> Element:
        """A slab function rewritten in the chart of an adjacent cell."""
        if wall.cell == sigma:
            return wall.function
        key = wall.rho
        if key is None:
            raise WallError("codimension-zero wall lives in a single chart")
        t = self.cx.transition(key, wall.cell)
        if self.cx.other_side(key, wall.cell) != sigma:
            raise WallError(f"slab {key} is not adjacent to {sigma}")
        out: Dict[Exponent, Cyclo] = {}
        for e, c in wall.function.terms.items():
            lam = tuple(int(x) for x in t.apply_vec(e.lam))
            out[Exponent(lam, e.q)] = c
        return Element(self.spec, self.ctx(sigma), out, self.coeff_order)

    def cross_slab(self, elem: Element, wall: Wall, source: str) -> Element:
        """Slab crossing from the chart `source` to the opposite chart.

        Defined on monomials pointing from the target into the source; with
        gluing data the canonical map is conjugated by the localization
        twists of the two sides.
        """
        if wall.codim != 1:
            raise WallError("not a slab")
        key = wall.rho
        target = self.cx.other_side(key, source)
        n_src = self.cx.rho_normal_into(key[0], source)
        f_t = self.function_in_chart(wall, target)
        out = Element.zero(self.spec, self.ctx(target), self.coeff_order)
        powers: Dict[int, Element] = {}
        for e, c in elem.terms.items():
            a = dot(n_src, e.lam)
            if a < 0:
                raise WallError(
                    "slab crossing undefined: monomial points away from source")
            e2 = self.cx.transport_exponent(e, source, key, self.phi)
            if a not in powers:
                powers[a] = f_t.power(a)
            c2 = c
            if self.gluing is not None:
                c2 = c * self.gluing.factor(source, key, e.lam).inverse()
            out = out + powers[a].mul_monomial(e2, c2)
        if self.gluing is not None:
            out = self.gluing.scale_element(out, target, key)
        return out

    # -- slab rings -------------------------------------------------------------------------
    def rho_frame(self, key: Tuple[str, int]):
        """(sigma(rho), rho direction, xi) in the sigma(rho) chart, plus the
        transported frame (direction, -xi image) on the other side."""
        rho = key[0]
        sig, xi = self.cx.xi[rho]
        if self.cx.dim == 1:
            d: Vec = ()
        else:
            d, _ = self.cx.rho_line(rho, sig)
        t = self.cx.transition(key, sig)
        xi_p = tuple(int(x) for x in t.apply_vec([-x for x in xi]))
        d_p = tuple(int(x) for x in t.apply_vec(d)) if d else ()
        other = self.cx.other_side(key, sig)
        return sig, d, tuple(xi), other, d_p, xi_p

    def slab_element(self, wall: Wall,
                     terms: Dict[Tuple[int, int, Vec], object]) -> Element:
        """Build a slab-ring element from {(lam_coord, zpow, q): coeff}."""
        ctx = self.slab_ctx(wall)
        out: Dict[Exponent, Cyclo] = {}
        for (lc, zp, q), c in terms.items():
            cc = c if isinstance(c, Cyclo) else Cyclo.rational(c, self.coeff_order)
            enc = (zp,) if self.cx.dim == 1 else (lc, zp)
            e = Exponent(enc, tuple(q))
            out[e] = out.get(e, Cyclo.zero(self.coeff_order)) + cc
        return Element(self.spec, ctx, out, self.coeff_order)

    def _lam_coord(self, d: Vec, lam: Vec) -> int:
        if self.cx.dim == 1:
            if any(lam):
                raise WallError("nonzero lattice part tangent to a point")
            return 0
        if cross2(d, lam) != 0:
            raise WallError("exponent not tangent to the slab")
        for i, x in enumerate(d):
            if x:
                return lam[i] // x
        raise WallError("degenerate slab direction")

    def slab_function_encoded(self, wall: Wall) -> Element:
        """The slab function in slab-ring coordinates (Z-power zero)."""
        key = wall.rho
        sig, d, xi, other, d_p, xi_p = self.rho_frame(key)
        f = self.function_in_chart(wall, sig)
        out: Dict[Exponent, Cyclo] = {}
        for e, c in f.terms.items():
            lc = self._lam_coord(d, e.lam)
            enc = Exponent((0,) if self.cx.dim == 1 else (lc, 0), e.q)
            out[enc] = out.get(enc, Cyclo.zero(self.coeff_order)) + c
        return Element(self.spec, self.slab_ctx(wall), out, self.coeff_order)

    def slab_mul(self, wall: Wall, a: Element, b: Element) -> Element:
        """Multiplication in R_slab, reducing Z+ Z- = f z^kappa."""
        ctx = self.slab_ctx(wall)
        if a.context != ctx or b.context != ctx:
            raise WallError("not elements of this slab ring")
        f = self.slab_function_encoded(wall)
        kap = self.phi.kink(wall.rho)
        out = Element.zero(self.spec, ctx, self.coeff_order)
        fz_pows: Dict[int, Element] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                z1, z2 = e1.lam[-1], e2.lam[-1]
                lam = tuple(x + y for x, y in zip(e1.lam, e2.lam))
                q = tuple(x + y for x, y in zip(e1.q, e2.q))
                term = Element.monomial(self.spec, ctx, Exponent(lam, q),
                                        c1 * c2, self.coeff_order)
                if z1 * z2 < 0:
                    cancel = min(abs(z1), abs(z2))
                    if cancel not in fz_pows:
                        zk = Element.monomial(
                            self.spec, ctx,
                            Exponent((0,) * len(lam), kap), 1, self.coeff_order)
                        fz_pows[cancel] = (f * zk).power(cancel)
                    term = term * fz_pows[cancel]
                out = out + term
        return out

    def chi(self, wall: Wall, side: str, elem: Element) -> Element:
        """Localization from the slab ring of `wall` into R_side."""
        key = wall.rho
        sig, d, xi, other, d_p, xi_p = self.rho_frame(key)
        kap = self.phi.kink(key)
        ctx_t = self.ctx(side)
        out = Element.zero(self.spec, ctx_t, self.coeff_order)
        f_local: Optional[Element] = None
        for e, c in elem.terms.items():
            zp = e.lam[-1]
            if side == sig:
                lam0 = self._lam_vec(d, e)
                base_lam = tuple(l + zp * x for l, x in zip(lam0, xi))
                neg = -zp if zp < 0 else 0
            elif side == other:
                lam0 = self._lam_vec(d_p, e)
                base_lam = tuple(l - zp * x for l, x in zip(lam0, xi_p))
                neg = zp if zp > 0 else 0
            else:
                raise WallError(f"{side} not adjacent to slab {key}")
            if neg == 0:
                out = out + Element.monomial(self.spec, ctx_t,
                                             Exponent(base_lam, e.q), c,
                                             self.coeff_order)
            else:
                if f_local is None:
                    f_local = self.function_in_chart(wall, side)
                q2 = tuple(q + neg * k for q, k in zip(e.q, kap))
                out = out + f_local.power(neg).mul_monomial(
                    Exponent(base_lam, q2), c)
        if self.gluing is not None:
            out = self.gluing.scale_element(out, side, key)
        return out

    def _lam_vec(self, d: Vec, e: Exponent) -> Vec:
        if self.cx.dim == 1:
            return (0,)
        return tuple(e.lam[0] * x for x in d)

    # -- codimension-zero check -----------------------------------------------------------
    def halfline_dirs(self, w: Wall, p: Pt) -> List[Vec]:
        dirs = []
        if tuple(w.support_base) == tuple(p):
            dirs.append(primitive(w.support_dir))
        elif w.support_end is not None and tuple(w.support_end) == tuple(p):
            dirs.append(primitive(tuple(-x for x in w.support_dir)))
        elif w.contains_point(p):
            dirs.append(primitive(w.support_dir))
            dirs.append(primitive(tuple(-x for x in w.support_dir)))
        return dirs

    def check_codim0(self, joint: Joint) -> Tuple[bool, Dict[Vec, Element]]:
        if joint.codim != 0:
            raise WallError("not a codimension-zero joint")
        sigma = next(iter(joint.charts))
        p = joint.charts[sigma]
        entries = []
        for wi in joint.walls:
            w = self.walls[wi]
            for dvec in self.halfline_dirs(w, p):
                entries.append((w, dvec))
        entries.sort(key=functools.cmp_to_key(
            lambda a, b: _angle_cmp(a[1], b[1])))
        rank = self._rank()
        gens = [tuple(1 if i == j else 0 for j in range(rank))
                for i in range(rank)]
        defect: Dict[Vec, Element] = {}
        ok = True
        for g in gens:
            e = Exponent(g, self.spec.zero_q())
            elem = Element.monomial(self.spec, self.ctx(sigma), e, 1,
                                    self.coeff_order)
            for (w, dvec) in entries:
                n_src = (dvec[1], -dvec[0])
                elem = self.cross_wall(elem, w, n_src)
            d_elem = elem.mul_monomial(-e) - self.one(sigma)
            defect[g] = d_elem
            ok = ok and d_elem.is_zero()
        return ok, defect

    # -- codimension-one check ---------------------------------------------------------------
    def side_walls(self, joint: Joint, sigma: str, start_dir: Vec,
                   ccw: bool) -> List[Tuple[Wall, Vec]]:
        p = joint.charts[sigma]
        entries = []
        for wi in joint.walls:
            w = self.walls[wi]
            if w.cell != sigma or w.codim != 0:
                continue
            for dvec in self.halfline_dirs(w, p):
                entries.append((w, dvec))
        base = start_dir if ccw else tuple(-x for x in start_dir)

        def pos(entry):
            v = entry[1] if ccw else tuple(-x for x in entry[1])
            return _angle_pos_from(base, v)

        entries.sort(key=pos)
        return entries

    def side_composition(self, joint: Joint, sigma: str, elem: Element,
                         start_dir: Vec, ccw: bool) -> Element:
        for (w, dvec) in self.side_walls(joint, sigma, start_dir, ccw):
            if ccw:
                n_src = (dvec[1], -dvec[0])
            else:
                n_src = (-dvec[1], dvec[0])
            elem = self.cross_wall(elem, w, n_src)
        return elem

    def slabs_at_codim1_joint(self, joint: Joint) -> Tuple[Wall, Wall]:
        slabs = [self.walls[i] for i in joint.walls if self.walls[i].codim == 1]
        if len(slabs) != 2:
            raise WallError(
                f"codim-1 joint {joint.jid}: expected two slabs, found "
                f"{len(slabs)}")
        return slabs[0], slabs[1]

    def check_codim1(self, joint: Joint) -> Tuple[bool, str]:
        """Transported slab-ring generators must lift to the far slab ring."""
        b1, b2 = self.slabs_at_codim1_joint(joint)
        key1 = b1.rho
        sig, d, xi, other, d_p, xi_p = self.rho_frame(key1)
        p_sig = joint.charts[sig]
        # direction from the joint along b1, in each side chart
        d1_sig = self._slab_dir_from(b1, key1, sig, p_sig)
        d1_oth = self._slab_dir_from(b1, key1, other, joint.charts[other])
        n_into_sig = self.cx.rho_normal_into(key1[0], sig)
        ccw_sig = cross2(d1_sig, n_into_sig) > 0
        gens: List[Element] = []
        zq = self.spec.zero_q()
        if self.cx.dim == 2:
            gens.append(self.slab_element(b1, {(1, 0, zq): 1}))
        gens.append(self.slab_element(b1, {(0, 1, zq): 1}))
        gens.append(self.slab_element(b1, {(0, -1, zq): 1}))
        for g in gens:
            a_sig = self.side_composition(joint, sig, self.chi(b1, sig, g),
                                          d1_sig, ccw_sig)
            a_oth = self.side_composition(joint, other, self.chi(b1, other, g),
                                          d1_oth, not ccw_sig)
            lift = self.lift_to_slab(b2, a_sig, a_oth)
            if lift is None:
                return False, (f"{joint.jid}: generator {g.render()} does not "
                               f"lift across the joint")
        return True, "ok"

    def _slab_dir_from(self, wall: Wall, key, side: str, p: Pt) -> Vec:
        if wall.cell == side:
            return self._dir_from_point(wall, p)
        d_src = self._dir_from_point(wall, self._point_in_chart(key, wall.cell, side, p))
        t = self.cx.transition(key, wall.cell)
        return primitive(tuple(int(x) for x in t.apply_vec(d_src)))

    def _point_in_chart(self, key, chart_from, chart_to, p_to):
        # p given in chart_to; return it in chart_from
        t = self.cx.transition(key, chart_from)  # chart_from -> chart_to
        return t.inverse().apply_pt(p_to)

    def _dir_from_point(self, wall: Wall, p: Pt) -> Vec:
        dirs = self.halfline_dirs(wall, p)
        if not dirs:
            raise WallError("joint not on the slab")
        return dirs[0]

    def lift_to_slab(self, wall: Wall, val_sig: Element,
                     val_other: Element) -> Optional[Element]:
        """Reconstruct a slab-ring element with the given localizations,
        splitting monomials by the sign of their xi-component."""
        key = wall.rho
        sig, d, xi, other, d_p, xi_p = self.rho_frame(key)
        n_into_sig = self.cx.rho_normal_into(key[0], sig)
        n_into_oth = self.cx.rho_normal_into(key[0], other)
        t = self.cx.transition(key, sig)
        ctx = self.slab_ctx(wall)
        val_sig_c = val_sig if self.gluing is None else \
            self.gluing.scale_element(val_sig, sig, key, invert=True)
        val_oth_c = val_other if self.gluing is None else \
            self.gluing.scale_element(val_other, other, key, invert=True)
        terms: Dict[Exponent, Cyclo] = {}
        tangent_sig: Dict[Exponent, Cyclo] = {}
        for e, c in val_sig_c.terms.items():
            a = dot(n_into_sig, e.lam)
            if a > 0:
                lam_res = tuple(l - a * x for l, x in zip(e.lam, xi))
                lc = self._lam_coord(d, lam_res) if self.cx.dim == 2 else 0
                enc = Exponent((a,) if self.cx.dim == 1 else (lc, a), e.q)
                terms[enc] = terms.get(enc, Cyclo.zero(self.coeff_order)) + c
            elif a == 0:
                tangent_sig[e] = c
            # a < 0: reproduced by the Z_- part, checked at the end
        tangent_oth: Dict[Exponent, Cyclo] = {}
        for e, c in val_oth_c.terms.items():
            a = dot(n_into_oth, e.lam)
            if a > 0:
                lam_res = tuple(l - a * x for l, x in zip(e.lam, xi_p))
                lc = self._lam_coord(d_p, lam_res) if self.cx.dim == 2 else 0
                enc = Exponent((-a,) if self.cx.dim == 1 else (lc, -a), e.q)
                terms[enc] = terms.get(enc, Cyclo.zero(self.coeff_order)) + c
            elif a == 0:
                tangent_oth[e] = c
            # a < 0: reproduced by the Z_+ part, checked at the end
        moved = {}
        for e, c in tangent_sig.items():
            lam2 = tuple(int(x) for x in t.apply_vec(e.lam))
            moved[Exponent(lam2, e.q)] = c
        if moved != tangent_oth:
            return None
        for e, c in tangent_sig.items():
            lc = self._lam_coord(d, e.lam) if self.cx.dim == 2 else 0
            enc = Exponent((0,) if self.cx.dim == 1 else (lc, 0), e.q)
            terms[enc] = terms.get(enc, Cyclo.zero(self.coeff_order)) + c
        cand = Element(self.spec, ctx, terms, self.coeff_order)
        if self.chi(wall, sig, cand) != val_sig:
            return None
        if self.chi(wall, other, cand) != val_other:
            return None
        return cand

    # -- local models at joints ----------------------------------------------------------------
    def chart_chain(self, joint: Joint, sigma: str, sigma0: str) -> List[Tuple]:
        """Pieces to cross from the chart of sigma to the chart of sigma0,
        walking around the joint."""
        if sigma == sigma0:
            return []
        frontier = [(sigma, [])]
        seen = {sigma}
        while frontier:
            cur, path = frontier.pop(0)
            rhos = [joint.min_cell] if self.cx.cells[joint.min_cell].dim == \
                self.cx.dim - 1 else self.cx.parents_of(joint.min_cell,
                                                        self.cx.dim - 1)
            for rho in rhos:
                if self.cx.is_boundary(rho):
                    continue
                if cur not in self.cx.parents_of(rho, self.cx.dim):
                    continue
                for pz in self.cx.pieces.get(rho, []):
                    key = pz.key()
                    if not self._piece_touches(key, joint):
                        continue
                    if cur not in (pz.sigma, pz.sigma_prime):
                        continue
                    nxt = self.cx.other_side(key, cur)
                    if nxt in seen:
                        continue
                    seen.add(nxt)
                    p2 = path + [(cur, key)]
                    if nxt == sigma0:
                        return p2
                    frontier.append((nxt, p2))
        raise WallError(f"no chart chain from {sigma} to {sigma0} at {joint.jid}")

    def _piece_touches(self, key: Tuple[str, int], joint: Joint) -> bool:
        pz = self.cx.piece(key)
        for s in (pz.sigma, pz.sigma_prime):
            if s in joint.charts:
                if self.cx.piece_region(key, s).contains(joint.charts[s]):
                    return True
        return False

    def transport_function(self, f: Element, source: str,
                           chain: List[Tuple]) -> Element:
        cur = f
        src = source
        for (s, key) in chain:
            out: Dict[Exponent, Cyclo] = {}
            for e, c in cur.terms.items():
                out[self.cx.transport_exponent(e, s, key, self.phi)] = c
            tgt = self.cx.other_side(key, s)
            cur = Element(self.spec, self.ctx(tgt), out, self.coeff_order)
            src = tgt
        return cur

    def transport_direction(self, dvec: Vec, chain: List[Tuple]) -> Vec:
        cur = tuple(dvec)
        for (s, key) in chain:
            t = self.cx.transition(key, s)
            cur = tuple(int(x) for x in t.apply_vec(cur))
        return cur

    def joint_local_walls(self, joint: Joint, sigma0: Optional[str] = None):
        """All wall germs at a joint, written in the chart of sigma0.

        Returns (sigma0, entries) with entries (direction, function, kink);
        the function is None for boundary rays of B, which are listed
        separately by joint_boundary_rays.
        """
        if sigma0 is None:
            sigma0 = sorted(joint.charts)[0]
        entries = []
        zero_kap = (0,) * self.spec.q_rank
        seen = set()
        for sigma in sorted(joint.charts):
            p = joint.charts[sigma]
            chain = self.chart_chain(joint, sigma, sigma0)
            for wi in joint.walls:
                w = self.walls[wi]
                if w.cell != sigma:
                    continue
                if w.codim == 1 and (wi, "s") in seen:
                    continue
                seen.add((wi, "s"))
                kap = self.phi.kink(w.rho) if w.codim == 1 else zero_kap
                f0 = self.transport_function(w.function, sigma, chain)
                for dvec in self.halfline_dirs(w, p):
                    d0 = primitive(self.transport_direction(dvec, chain))
                    entries.append((d0, f0, kap, w))
        return sigma0, entries

    def joint_boundary_rays(self, joint: Joint, sigma0: str) -> List[Vec]:
        rays = []
        for sigma in sorted(joint.charts):
            p = joint.charts[sigma]
            chain = self.chart_chain(joint, sigma, sigma0)
            rhos = self.cx.parents_of(joint.min_cell, self.cx.dim - 1) \
                if self.cx.cells[joint.min_cell].dim < self.cx.dim - 1 else \
                [joint.min_cell] if self.cx.cells[joint.min_cell].dim == self.cx.dim - 1 else []
            for rho in rhos:
                if not self.cx.is_boundary(rho):
                    continue
                if sigma not in self.cx.parents_of(rho, self.cx.dim):
                    continue
                vs, rs = self.cx.face_geometry(rho, sigma)
                reg = ConvexRegion.from_vertices(2, vs, rs)
                dline, _ = self.cx.rho_line(rho, sigma)
                probe = vadd(p, vscale(dline, Fraction(1, 9973)))
                d = dline if reg.contains(probe) else tuple(-x for x in dline)
                d0 = primitive(self.transport_direction(d, chain))
                if d0 not in rays:
                    rays.append(d0)
        return rays

    # -- boundary joints --------------------------------------------------------------------
    def boundary_convexity(self, joint: Joint) -> Tuple[bool, Fraction]:
        """Slope recursion at a boundary joint; True means convex (hence
        consistent)."""
        sigma0, entries = self.joint_local_walls(joint)
        b_rays = self.joint_boundary_rays(joint, sigma0)
        if len(b_rays) != 2:
            raise WallError(f"boundary joint {joint.jid}: need two boundary rays")
        p0 = joint.charts[sigma0]
        ip = self.cx.cell_region(sigma0).interior_point()
        interior = rational_direction(vsub(ip, p0))
        r1, r2 = b_rays
        rl, rr = (r1, r2) if cross2(r1, interior) > 0 else (r2, r1)
        m = _basis_sending(rl, (-1, 0), interior)

        def mapv(v):
            return (m[0][0] * v[0] + m[0][1] * v[1],
                    m[1][0] * v[0] + m[1][1] * v[1])

        walls_m = []
        for (d, f, kap, w) in entries:
            walls_m.append((mapv(d), f, m))
        walls_m.sort(key=lambda t: _angle_pos_from((-1, 0), t[0]))
        # counterclockwise from (-1,0) wraps down through (0,-1) ... so the
        # clockwise order from (-1,0) toward (a,b) is the reverse
        walls_m.reverse()
        lam = Fraction(0)
        for (dd, f, mm) in walls_m:
            aj, bj = dd
            delta = 0
            for e, _ in f.terms.items():
                lv = mapv(e.lam)
                if aj != 0:
                    dj = Fraction(-lv[0], aj)
                else:
                    dj = Fraction(-lv[1], bj)
                if dj.denominator == 1:
                    delta = max(delta, int(dj))
            if delta == 0:
                continue
            t = (bj - aj * lam) * delta
            lam = (lam + t * bj) / (1 + t * aj)
        rr_m = mapv(rr)
        v = (Fraction(1), lam)
        inside = cross2(rr_m, v) > 0 and cross2(v, (-1, 0)) > 0
        return (not inside), lam

    # -- homogeneity --------------------------------------------------------------------------
    def check_homogeneous(self, grading: "GradingData") -> Tuple[bool, List[str]]:
        issues = grading.validate(self)
        if issues:
            raise WallError("; ".join(issues))
        bad = []
        for w in self.walls:
            for e, _ in w.function.terms.items():
                deg = grading.degree(w.cell, e)
                if any(e.lam) or any(e.q):
                    if deg != grading.zero():
                        bad.append(
                            f"wall in {w.cell} at {w.support_base}: "
                            f"monomial degree {deg}")
                        break
        return (not bad), bad

    def theta_degrees(self, grading: "GradingData",
                      labels: Sequence[Tuple[str, Vec]]) -> Dict:
        out = {}
        for (sigma, lam) in labels:
            out[(sigma, lam)] = grading.degree(
                sigma, Exponent(lam, self.spec.zero_q()))
        return out


def _basis_sending(src: Vec, dst: Vec, interior: Vec):
    """A GL2(Z) matrix with M src = dst (both primitive) and M interior in the
    upper half plane; dst must be (-1, 0)."""
    a, b = primitive(src)
    c, d = _bezout_pair(a, b)       # a*d - b*c = 1
    # A = [[a, c], [b, d]], A^{-1} = [[d, -c], [-b, a]];  M = diag(-1,1) A^{-1}
    m = ((-d, c), (-b, a))
    mi = (m[0][0] * interior[0] + m[0][1] * interior[1],
          m[1][0] * interior[0] + m[1][1] * interior[1])
    if mi[1] < 0:
        m = (m[0], (-m[1][0], -m[1][1]))
    return m


def _bezout_pair(a: int, b: int) -> Tuple[int, int]:
    """(c, d) with a*d - b*c = 1, for coprime a, b."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r == -1:
        old_s, old_t = -old_s, -old_t
    elif old_r != 1:
        raise WallError("direction not primitive")
    # a*old_s + b*old_t = 1  ->  d = old_s, c = -old_t
    return -old_t, old_s


# ---------------------------------------------------------------------------
# open gluing data
# ---------------------------------------------------------------------------

class OpenGluingData:
    """Unit twists s_{sigma, piece}: Lambda_sigma -> A^x given on chart bases."""

    def __init__(self, values: Dict[Tuple[str, Tuple[str, int]], Tuple[Cyclo, ...]],
                 coeff_order: int = 1):
        self.values = dict(values)
        self.coeff_order = coeff_order

    def factor(self, sigma: str, key: Tuple[str, int], lam: Vec) -> Cyclo:
        vals = self.values.get((sigma, key))
        if vals is None:
            return Cyclo.one(self.coeff_order)
        out = Cyclo.one(self.coeff_order)
        for v, a in zip(vals, lam):
            out = out * (v ** a)
        return out

    def scale_element(self, elem: Element, sigma: str, key: Tuple[str, int],
                      invert: bool = False) -> Element:
        out: Dict[Exponent, Cyclo] = {}
        for e, c in elem.terms.items():
            f = self.factor(sigma, key, e.lam)
            out[e] = c * (f.inverse() if invert else f)
        return Element(elem.spec, elem.context, out, elem.coeff_order)


# ---------------------------------------------------------------------------
# grading data
# ---------------------------------------------------------------------------

class GradingData:
    """A grading of monomials by Z^g with optional cyclic torsion factors.

    delta_q acts on the monoid part; delta_b gives one matrix per maximal
    cell acting on the lattice part.  torsion[i] = 0 marks a free coordinate,
    n > 0 a Z/n coordinate.
    """

    def __init__(self, rank: int, delta_q: Sequence[Sequence[int]],
                 delta_b: Dict[str, Sequence[Sequence[int]]],
                 torsion: Optional[Sequence[int]] = None):
        self.rank = rank
        self.delta_q = [list(r) for r in delta_q]
        self.delta_b = {k: [list(r) for r in v] for k, v in delta_b.items()}
        self.torsion = list(torsion) if torsion is not None else [0] * rank

    def zero(self) -> Vec:
        return (0,) * self.rank

    def _norm(self, vec: List[int]) -> Vec:
        return tuple(v % t if t else v for v, t in zip(vec, self.torsion))

    def degree(self, sigma: str, e: Exponent) -> Vec:
        out = []
        for i in range(self.rank):
            val = sum(a * b for a, b in zip(self.delta_q[i], e.q))
            val += sum(a * b for a, b in zip(self.delta_b[sigma][i], e.lam))
            out.append(val)
        return self._norm(out)

    def validate(self, ws: WallStructure) -> List[str]:
        """deg(Z+) + deg(Z-) = deg(z^kappa) on every interior piece."""
        issues = []
        cx = ws.cx
        for key in cx.interior_pieces():
            sig, xi = cx.xi[key[0]]
            other = cx.other_side(key, sig)
            t = cx.transition(key, sig)
            xi_p = tuple(int(x) for x in t.apply_vec([-x for x in xi]))
            kap = ws.phi.kink(key)
            dz = [sum(a * b for a, b in zip(self.delta_b[sig][i], xi))
                  + sum(a * b for a, b in zip(self.delta_b[other][i], xi_p))
                  for i in range(self.rank)]
            dk = [sum(a * b for a, b in zip(self.delta_q[i], kap))
                  for i in range(self.rank)]
            if self._norm(dz) != self._norm(dk):
                issues.append(f"grading square fails at piece {key}")
        return issues
