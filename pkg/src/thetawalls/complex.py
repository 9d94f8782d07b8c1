"""Integral polyhedral pseudomanifolds of dimension 1 and 2.

A complex is a set of cells, each with integer vertex coordinates in its own
chart, glued along faces by integral affine embeddings.  Interior
codimension-one cells carry transition maps between the charts of the two
adjacent maximal cells; these define the affine structure away from the
singular set (barycenters of interior codimension-one cells with nontrivial
monodromy, plus the boundary skeleton).

Multi-valued piecewise affine data is stored as one kink vector per
codimension-one piece.  Monomial transport across pieces shifts the monoid
part by <n, lam> * kink with n the primitive normal positive on the source
side; the lattice part maps by the transition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import Exponent, TruncationSpec, Vec
from .geometry import (ConvexRegion, Pt, cross2, dot, frac_pt, perp2,
                       primitive, rational_direction, vadd, vscale, vsub)


class ComplexError(ValueError):
    pass


# ---------------------------------------------------------------------------
# integral affine maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffMap:
    """x -> lin @ x + off with integer linear part."""

    lin: Tuple[Tuple[int, ...], ...]
    off: Tuple[Fraction, ...]

    @staticmethod
    def identity(dim: int) -> "AffMap":
        return AffMap(tuple(tuple(1 if i == j else 0 for j in range(dim))
                            for i in range(dim)),
                      tuple(Fraction(0) for _ in range(dim)))

    @staticmethod
    def make(lin: Sequence[Sequence[int]], off: Sequence = None) -> "AffMap":
        lin_t = tuple(tuple(int(x) for x in row) for row in lin)
        n = len(lin_t)
        if off is None:
            off = [0] * n
        return AffMap(lin_t, tuple(Fraction(x) for x in off))

    @property
    def dim_out(self) -> int:
        return len(self.lin)

    @property
    def dim_in(self) -> int:
        return len(self.lin[0]) if self.lin else 0

    def apply_vec(self, v: Sequence) -> Tuple:
        return tuple(sum(r[j] * v[j] for j in range(len(v))) for r in self.lin)

    def apply_pt(self, p: Sequence) -> Pt:
        base = self.apply_vec(p)
        return tuple(Fraction(b) + o for b, o in zip(base, self.off))

    def compose(self, inner: "AffMap") -> "AffMap":
        lin = tuple(tuple(sum(self.lin[i][k] * inner.lin[k][j]
                              for k in range(inner.dim_out))
                          for j in range(inner.dim_in))
                    for i in range(self.dim_out))
        off = tuple(Fraction(x) + o
                    for x, o in zip(self.apply_vec(inner.off), self.off))
        return AffMap(lin, off)

    def det(self) -> int:
        m = self.lin
        if len(m) == 1:
            return m[0][0]
        if len(m) == 2:
            return m[0][0] * m[1][1] - m[0][1] * m[1][0]
        raise ComplexError("determinant only for dim <= 2")

    def inverse(self) -> "AffMap":
        d = self.det()
        if d not in (1, -1):
            raise ComplexError("transition is not in GL(Z)")
        m = self.lin
        if len(m) == 1:
            inv = ((d,),)
        else:
            inv = ((m[1][1] * d, -m[0][1] * d), (-m[1][0] * d, m[0][0] * d))
        invmap = AffMap(inv, tuple(Fraction(0) for _ in m))
        off = invmap.apply_vec(self.off)
        return AffMap(inv, tuple(-Fraction(x) for x in off))

    def homogenize(self) -> "AffMap":
        """Lift to the linear map (x, h) -> (lin x + h*off, h).

        Requires an integral translation part.
        """
        n = self.dim_out
        for o in self.off:
            if Fraction(o).denominator != 1:
                raise ComplexError("cannot homogenize non-integral translation")
        rows = [tuple(list(self.lin[i]) + [int(self.off[i])]) for i in range(n)]
        rows.append(tuple([0] * n + [1]))
        return AffMap(tuple(rows), tuple(Fraction(0) for _ in range(n + 1)))

    def is_identity(self) -> bool:
        return self == AffMap.identity(self.dim_out)


# ---------------------------------------------------------------------------
# cells, faces, pieces
# ---------------------------------------------------------------------------

@dataclass
class Cell:
    name: str
    dim: int
    vertices: List[Vec]
    rays: List[Vec] = field(default_factory=list)

    def region(self) -> ConvexRegion:
        if self.dim == 0:
            raise ComplexError("vertices have no chart region")
        return ConvexRegion.from_vertices(
            self.dim, [frac_pt(*v) for v in self.vertices], self.rays)

    def is_bounded(self) -> bool:
        return not self.rays


@dataclass
class Piece:
    """A codimension-one piece: one connected component of rho minus the
    singular set, together with the chart transition across it."""

    rho: str
    index: int
    sigma: str          # source chart for T
    sigma_prime: str    # target chart
    transition: AffMap  # sigma chart -> sigma_prime chart

    def key(self) -> Tuple[str, int]:
        return (self.rho, self.index)


@dataclass
class MPAFunction:
    """Kinks per piece, with values in Z^q_rank."""

    q_rank: int
    kinks: Dict[Tuple[str, int], Vec]

    def kink(self, key: Tuple[str, int]) -> Vec:
        return self.kinks.get(key, (0,) * self.q_rank)

    def is_convex(self) -> bool:
        return all(all(a >= 0 for a in v) for v in self.kinks.values())


class AffineComplex:
    """A polyhedral pseudomanifold with per-cell charts.

    cells: all cells by name.  faces[(child, parent)] embeds the child chart
    into the parent chart.  pieces[rho] lists the transition pieces of each
    interior codimension-one cell in chart order along rho.
    """

    def __init__(self, dim: int, cells: Sequence[Cell],
                 faces: Dict[Tuple[str, str], AffMap],
                 pieces: Dict[str, List[Piece]],
                 xi: Dict[str, Tuple[str, Vec]],
                 name: str = "B"):
        self.dim = dim
        self.name = name
        self.cells = {c.name: c for c in cells}
        self.faces = dict(faces)
        self.pieces = {r: list(ps) for r, ps in pieces.items()}
        self.xi = dict(xi)  # rho -> (sigma(rho), xi vector in that chart)
        self._check_minimum()

    # -- structural helpers ------------------------------------------------------
    def _check_minimum(self):
        for (child, parent), emb in self.faces.items():
            if child not in self.cells or parent not in self.cells:
                raise ComplexError(f"face {child}->{parent} names unknown cells")

    def maximal_cells(self) -> List[str]:
        return sorted(c.name for c in self.cells.values() if c.dim == self.dim)

    def codim1_cells(self) -> List[str]:
        return sorted(c.name for c in self.cells.values()
                      if c.dim == self.dim - 1)

    def vertex_cells(self) -> List[str]:
        return sorted(c.name for c in self.cells.values() if c.dim == 0)

    def parents_of(self, name: str, parent_dim: Optional[int] = None) -> List[str]:
        out = []
        for (child, parent) in self.faces:
            if child == name:
                if parent_dim is None or self.cells[parent].dim == parent_dim:
                    out.append(parent)
        return sorted(set(out))

    def children_of(self, name: str, child_dim: Optional[int] = None) -> List[str]:
        out = []
        for (child, parent) in self.faces:
            if parent == name:
                if child_dim is None or self.cells[child].dim == child_dim:
                    out.append(child)
        return sorted(set(out))

    def is_boundary(self, rho: str) -> bool:
        return len(self.parents_of(rho, self.dim)) == 1

    def interior_codim1(self) -> List[str]:
        return [r for r in self.codim1_cells() if not self.is_boundary(r)]

    def interior_pieces(self) -> List[Tuple[str, int]]:
        out = []
        for rho in self.interior_codim1():
            for p in self.pieces.get(rho, []):
                out.append(p.key())
        return sorted(out)

    def piece(self, key: Tuple[str, int]) -> Piece:
        for p in self.pieces.get(key[0], []):
            if p.index == key[1]:
                return p
        raise ComplexError(f"no piece {key}")

    # -- chart geometry ------------------------------------------------------------
    def cell_region(self, sigma: str) -> ConvexRegion:
        return self.cells[sigma].region()

    def embed(self, child: str, parent: str) -> AffMap:
        try:
            return self.faces[(child, parent)]
        except KeyError:
            raise ComplexError(f"no face map {child} -> {parent}")

    def face_geometry(self, child: str, parent: str) -> Tuple[List[Pt], List[Vec]]:
        """Vertices and rays of a face, written in the parent chart."""
        emb = self.embed(child, parent)
        c = self.cells[child]
        vs = [emb.apply_pt(v) for v in c.vertices]
        rs = [emb.apply_vec(r) for r in c.rays]
        return vs, rs

    def rho_line(self, rho: str, sigma: str) -> Tuple[Vec, Pt]:
        """(primitive tangent direction, base point) of rho in the sigma chart."""
        vs, rs = self.face_geometry(rho, sigma)
        if self.dim == 1:
            return (), vs[0]
        if len(vs) >= 2:
            d = rational_direction(vsub(vs[1], vs[0]))
        else:
            d = primitive(rs[0])
        return d, vs[0]

    def rho_normal_into(self, rho: str, sigma: str) -> Vec:
        """Primitive conormal of rho in the sigma chart, positive on sigma."""
        if self.dim == 1:
            _, base = self.rho_line(rho, sigma)
            reg = self.cell_region(sigma)
            ip = reg.interior_point()
            return (1,) if ip[0] > base[0] else (-1,)
        d, base = self.rho_line(rho, sigma)
        n = perp2(d)
        ip = self.cell_region(sigma).interior_point()
        if dot(n, vsub(ip, base)) < 0:
            n = tuple(-x for x in n)
        return primitive(n)

    def barycenter(self, rho: str, sigma: str) -> Optional[Pt]:
        """Barycenter of a bounded codim-one cell in the sigma chart."""
        c = self.cells[rho]
        if c.rays:
            return None
        vs, _ = self.face_geometry(rho, sigma)
        acc = vs[0]
        for v in vs[1:]:
            acc = vadd(acc, v)
        return vscale(acc, Fraction(1, len(vs)))

    def piece_region(self, key: Tuple[str, int], sigma: str) -> ConvexRegion:
        """The piece as a region in the sigma chart (split at the barycenter
        when the cell carries two pieces)."""
        rho = key[0]
        vs, rs = self.face_geometry(rho, sigma)
        npieces = len(self.pieces.get(rho, [])) or 1
        if npieces == 1 or self.dim == 1:
            return ConvexRegion.from_vertices(self.dim, vs, rs)
        bary = self.barycenter(rho, sigma)
        if key[1] == 0:
            return ConvexRegion.from_vertices(self.dim, [vs[0], bary])
        return ConvexRegion.from_vertices(self.dim, [bary] + vs[1:], rs)

    def piece_at_point(self, rho: str, point: Pt, sigma: str) -> Tuple[str, int]:
        for p in self.pieces.get(rho, []):
            reg = self.piece_region(p.key(), sigma)
            if reg.contains(point):
                return p.key()
        raise ComplexError(f"no piece of {rho} at {point}")

    def transition(self, key: Tuple[str, int], source: str) -> AffMap:
        """Chart transition across a piece, from the source chart."""
        p = self.piece(key)
        if source == p.sigma:
            return p.transition
        if source == p.sigma_prime:
            return p.transition.inverse()
        raise ComplexError(f"{source} is not adjacent to {key}")

    def other_side(self, key: Tuple[str, int], source: str) -> str:
        p = self.piece(key)
        if source == p.sigma:
            return p.sigma_prime
        if source == p.sigma_prime:
            return p.sigma
        raise ComplexError(f"{source} is not adjacent to {key}")

    # -- validation -------------------------------------------------------------
    def validate(self) -> List[str]:
        issues: List[str] = []
        dim = self.dim
        # cells are honest polyhedra with lattice vertices / primitive rays
        for c in self.cells.values():
            for r in c.rays:
                if primitive(r) != tuple(r):
                    issues.append(f"cell {c.name}: ray {r} not primitive")
            if c.dim > 0:
                reg = c.region()
                if reg.dimension() != c.dim:
                    issues.append(f"cell {c.name}: degenerate (dim {reg.dimension()})")
                if len(set(map(tuple, c.vertices))) != len(c.vertices):
                    issues.append(f"cell {c.name}: does not inject (repeated vertex)")
        # purity: every cell under some maximal cell
        for c in self.cells.values():
            if c.dim < dim:
                if not self.parents_of(c.name, dim):
                    anc = self._ancestors(c.name)
                    if not any(self.cells[a].dim == dim for a in anc):
                        issues.append(f"cell {c.name}: not contained in a maximal cell")
        # codim-one incidence
        for rho in self.codim1_cells():
            k = len(self.parents_of(rho, dim))
            if k not in (1, 2):
                issues.append(f"codim-1 cell {rho}: contained in {k} maximal cells")
        # pairwise intersections are single cells: common-face poset check
        maxs = self.maximal_cells()
        for i in range(len(maxs)):
            for j in range(i + 1, len(maxs)):
                common = self._common_faces(maxs[i], maxs[j])
                if len(common) > 1:
                    tops = [c for c in common
                            if not any(o != c and c in self._ancestors_strict(o)
                                       for o in common)]
                    tops = [c for c in common if all(
                        o == c or o in self._descendants(c) for o in common)]
                    if len(tops) != 1:
                        issues.append(
                            f"cells {maxs[i]},{maxs[j]}: intersection is not a "
                            f"single cell ({sorted(common)})")
        # transitions restrict to the identity on rho
        for rho, ps in self.pieces.items():
            if self.is_boundary(rho):
                issues.append(f"boundary cell {rho} carries transition pieces")
                continue
            for p in ps:
                emb_s = self.faces.get((rho, p.sigma))
                emb_t = self.faces.get((rho, p.sigma_prime))
                if emb_s is None or emb_t is None:
                    issues.append(f"piece {p.key()}: missing face maps")
                    continue
                lhs = p.transition.compose(emb_s)
                if lhs != emb_t:
                    issues.append(
                        f"piece {p.key()}: transition does not glue the charts "
                        f"of {p.sigma} and {p.sigma_prime} along {rho}")
                if abs(p.transition.det()) != 1:
                    issues.append(f"piece {p.key()}: transition not in GL(Z)")
        for rho in self.interior_codim1():
            ps = self.pieces.get(rho, [])
            if not ps:
                issues.append(f"interior cell {rho}: no transition data")
            if len(ps) == 2 and self.cells[rho].rays:
                issues.append(f"unbounded cell {rho}: must be a single piece")
        # xi choices
        for rho in self.interior_codim1():
            if rho not in self.xi:
                issues.append(f"interior cell {rho}: missing xi choice")
                continue
            sigma, xi = self.xi[rho]
            if sigma not in self.parents_of(rho, dim):
                issues.append(f"xi of {rho}: cell {sigma} not adjacent")
                continue
            n = self.rho_normal_into(rho, sigma)
            if dot(n, xi) != 1:
                issues.append(
                    f"xi of {rho}: not a lattice complement pointing into {sigma}")
        # link connectivity at interior vertices (S2 for surfaces)
        if dim == 2:
            for v in self.vertex_cells():
                maxcells = self._maximal_around(v)
                if not maxcells:
                    continue
                if any(self.is_boundary(r) for r in self.parents_of(v, 1)):
                    continue
                adj = {m: set() for m in maxcells}
                for rho in self.parents_of(v, 1):
                    ms = self.parents_of(rho, 2)
                    if len(ms) == 2:
                        adj[ms[0]].add(ms[1])
                        adj[ms[1]].add(ms[0])
                seen = set()
                stack = [maxcells[0]]
                while stack:
                    m = stack.pop()
                    if m in seen:
                        continue
                    seen.add(m)
                    stack.extend(adj[m] - seen)
                if set(maxcells) - seen:
                    issues.append(f"vertex {v}: link is disconnected (S2 fails)")
        return issues

    def _ancestors(self, name: str) -> List[str]:
        out = {name}
        frontier = [name]
        while frontier:
            nxt = []
            for n in frontier:
                for p in self.parents_of(n):
                    if p not in out:
                        out.add(p)
                        nxt.append(p)
            frontier = nxt
        return sorted(out)

    def _ancestors_strict(self, name):
        return [a for a in self._ancestors(name) if a != name]

    def _descendants(self, name: str) -> List[str]:
        out = {name}
        frontier = [name]
        while frontier:
            nxt = []
            for n in frontier:
                for c in self.children_of(n):
                    if c not in out:
                        out.add(c)
                        nxt.append(c)
            frontier = nxt
        return sorted(out)

    def _common_faces(self, a: str, b: str) -> List[str]:
        da = set(self._descendants(a))
        db = set(self._descendants(b))
        return sorted((da & db) - {a, b})

    def _maximal_around(self, v: str) -> List[str]:
        return [m for m in self.maximal_cells() if v in self._descendants(m)]

    # -- kinks and monodromy -----------------------------------------------------
    def kink_from_chart(self, phi_slopes: Dict[str, Tuple[Vec, ...]],
                        key: Tuple[str, int]) -> Vec:
        """Kink along a piece from chart slopes of a local representative.

        phi_slopes gives, per maximal cell, a tuple of q_rank integer
        covectors (the differentials of the representative in that cell's own
        chart).  Returns the unique kappa with n' - n = delta * kappa, delta
        the primitive conormal positive toward sigma_prime.
        """
        p = self.piece(key)
        ns = phi_slopes[p.sigma]
        ns_p = phi_slopes[p.sigma_prime]
        # pull the sigma_prime slopes into the sigma chart through the piece
        lin = p.transition.lin
        pulled = tuple(tuple(sum(row[i] * lin[i][j] for i in range(len(lin)))
                             for j in range(len(lin)))
                       for row in ns_p)
        delta = self.rho_normal_into(p.rho, p.sigma_prime)
        if self.dim == 2:
            # express delta in the sigma chart: conormals pull back through T
            delta = tuple(sum(delta[i] * lin[i][j] for i in range(2))
                          for j in range(2))
            delta = primitive(delta)
            ip = self.cell_region(p.sigma).interior_point()
            _, base = self.rho_line(p.rho, p.sigma)
            if dot(delta, vsub(ip, base)) > 0:
                delta = tuple(-x for x in delta)
        kappa = []
        for n_new, n_old in zip(pulled, ns):
            diff = tuple(a - b for a, b in zip(n_new, n_old))
            k = None
            for d, x in zip(delta, diff):
                if d != 0:
                    if x % d:
                        raise ComplexError("slope jump not proportional to the conormal")
                    k = x // d
                    break
            for d, x in zip(delta, diff):
                if x != (k or 0) * d:
                    raise ComplexError("slope jump not proportional to the conormal")
            kappa.append(k or 0)
        return tuple(kappa)

    def monodromy_map(self, key_a: Tuple[str, int], key_b: Tuple[str, int]) -> AffMap:
        """Loop transport for the vector m_{a b}: a path from piece a through
        sigma across piece b, returning through sigma_prime across piece a.
        The result acts on the sigma chart."""
        pa, pb = self.piece(key_a), self.piece(key_b)
        if pa.rho != pb.rho:
            raise ComplexError("pieces lie in different cells")
        out = self.transition(key_b, pa.sigma)          # sigma -> sigma'
        back = self.transition(key_a, pa.sigma_prime)   # sigma' -> sigma
        return back.compose(out)

    def monodromy_vector(self, key_a: Tuple[str, int],
                         key_b: Tuple[str, int]) -> Vec:
        """The shear vector m_{a b}: T(m) = m + dcheck(m) * m_{a b} with
        dcheck the conormal of rho non-negative on sigma."""
        pa = self.piece(key_a)
        loop = self.monodromy_map(key_a, key_b)
        if self.dim == 1:
            return ()
        dcheck = self.rho_normal_into(pa.rho, pa.sigma)
        probe = None
        for cand in ((1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, 1), (1, -1)):
            if dot(dcheck, cand) == 1:
                probe = cand
                break
        if probe is None:
            raise ComplexError("no probe vector found")
        img = loop.apply_vec(probe)
        mv = vsub(img, probe)
        d, _ = self.rho_line(pa.rho, pa.sigma)
        if cross2(d, mv) != 0:
            raise ComplexError("monodromy does not fix the cell direction")
        return tuple(int(x) for x in mv)

    # -- monomial transport --------------------------------------------------------
    def transport_exponent(self, exponent: Exponent, source: str,
                           key: Tuple[str, int], phi: MPAFunction) -> Exponent:
        """Carry a monomial exponent across one piece.

        The lattice part maps by the chart transition; the monoid part shifts
        by <n_source, lam> * kink with n_source the primitive conormal of rho
        positive on the source side.
        """
        p = self.piece(key)
        t = self.transition(key, source)
        n_src = self.rho_normal_into(p.rho, source)
        a = dot(n_src, exponent.lam)
        kap = phi.kink(key)
        new_lam = tuple(int(x) for x in t.apply_vec(exponent.lam))
        new_q = tuple(q + a * k for q, k in zip(exponent.q, kap))
        return Exponent(new_lam, new_q)

    def transport(self, exponent: Exponent, path: Sequence, phi: MPAFunction) -> Exponent:
        """Transport along [sigma0, piece1, sigma1, piece2, ...]."""
        cur = exponent
        source = path[0]
        i = 1
        while i < len(path):
            key = path[i]
            target = path[i + 1] if i + 1 < len(path) else self.other_side(key, source)
            if self.other_side(key, source) != target:
                raise ComplexError("path is not incidence-consistent")
            cur = self.transport_exponent(cur, source, key, phi)
            source = target
            i += 2
        return cur

    # -- universal monoid ----------------------------------------------------------
    def universal_mpa(self) -> Tuple[MPAFunction, List[Tuple[str, int]]]:
        """The universal convex function: kink e_i along the i-th interior piece."""
        keys = self.interior_pieces()
        r = len(keys)
        kinks = {}
        for i, k in enumerate(keys):
            v = [0] * r
            v[i] = 1
            kinks[k] = tuple(v)
        return MPAFunction(r, kinks), keys

    def specialization(self, user: MPAFunction) -> Dict[Tuple[str, int], Vec]:
        """The monoid map Q0 -> Q realizing a given convex function,
        as the assignment of each universal generator to its kink."""
        return {k: user.kink(k) for k in self.interior_pieces()}

    def universal_truncation(self, order: int,
                             weights: Optional[Vec] = None) -> TruncationSpec:
        keys = self.interior_pieces()
        r = len(keys)
        w = weights if weights is not None else (1,) * r
        return TruncationSpec(r, w, order)

    # -- point bookkeeping -----------------------------------------------------------
    def canonical_point(self, sigma: str, point: Pt) -> Tuple[str, Pt]:
        """Smallest cell containing a point of sigma, with chart coordinates."""
        best = (sigma, tuple(Fraction(c) for c in point))
        best_dim = self.cells[sigma].dim
        for child in self._descendants(sigma):
            if child == sigma:
                continue
            c = self.cells[child]
            if c.dim >= best_dim or c.dim == 0:
                if c.dim == 0:
                    vs, _ = self.face_geometry(child, sigma) if (child, sigma) in self.faces else (None, None)
                    if vs and tuple(vs[0]) == tuple(point):
                        return (child, ())
                continue
            if (child, sigma) not in self.faces:
                continue
            emb = self.faces[(child, sigma)]
            pre = self._solve_embedding(emb, point)
            if pre is not None and self.cells[child].region().contains(pre):
                best = (child, pre)
                best_dim = c.dim
        # re-check vertices last (dim 0 handled above)
        for child in self._descendants(sigma):
            if self.cells[child].dim == 0 and (child, sigma) in self.faces:
                vs = [self.faces[(child, sigma)].apply_pt(v)
                      for v in self.cells[child].vertices] or \
                     [self.faces[(child, sigma)].apply_pt(())]
                if vs and tuple(vs[0]) == tuple(Fraction(c) for c in point):
                    return (child, ())
        return best

    def _solve_embedding(self, emb: AffMap, target: Pt) -> Optional[Pt]:
        rhs = [Fraction(t) - o for t, o in zip(target, emb.off)]
        cols = list(zip(*emb.lin)) if emb.lin and emb.lin[0] else []
        if not cols:
            return () if all(x == 0 for x in rhs) else None
        if len(cols) == 1:
            col = cols[0]
            val = None
            for a, b in zip(col, rhs):
                if a != 0:
                    val = Fraction(b, a)
                    break
            if val is None:
                return None
            for a, b in zip(col, rhs):
                if a * val != b:
                    return None
            return (val,)
        det = cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0]
        if det == 0:
            return None
        x = (rhs[0] * cols[1][1] - rhs[1] * cols[1][0]) / det
        y = (cols[0][0] * rhs[1] - cols[0][1] * rhs[0]) / det
        return (x, y)

    def integral_points(self, d: int) -> List[Tuple[str, Pt]]:
        """1/d-integral points, deduplicated across faces.

        Each point is (minimal cell, chart coordinates in that cell).  All
        maximal cells must be bounded.
        """
        if d <= 0:
            raise ComplexError("d must be positive")
        seen = []
        for sigma in self.maximal_cells():
            cell = self.cells[sigma]
            if cell.rays:
                raise ComplexError("integral_points needs a compact complex")
            reg = cell.region()
            vs = [v for v in cell.vertices]
            los = [min(v[i] for v in vs) for i in range(self.dim)]
            his = [max(v[i] for v in vs) for i in range(self.dim)]
            ranges = [range(lo * d, hi * d + 1) for lo, hi in zip(los, his)]
            for combo in iproduct(*ranges):
                p = tuple(Fraction(c, d) for c in combo)
                if reg.contains(p):
                    cp = self.canonical_point(sigma, p)
                    if cp not in seen:
                        seen.append(cp)
        return sorted(seen, key=lambda t: (t[0], t[1]))

    def count_integral_points(self, d: int) -> int:
        return len(self.integral_points(d))

    # -- asymptotic directions ---------------------------------------------------
    def is_asymptotic_on(self, sigma: str, direction: Vec) -> bool:
        if not any(direction):
            return True
        return self.cell_region(sigma).recession_contains(direction)

    def cells_with_asymptotic(self, direction: Vec) -> List[str]:
        return [s for s in self.maximal_cells()
                if self.is_asymptotic_on(s, direction)]
