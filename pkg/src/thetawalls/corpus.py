"""Builders for the bundled example geometries.

Each builder returns the complex together with its kink data and, where
applicable, the initial wall structure.  The JSON files under data/ are
serialized from these builders; the CLI accepts either form.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Tuple

from .algebra import Element, Exponent, TruncationSpec
from .complex import AffMap, AffineComplex, Cell, MPAFunction, Piece
from .walls import Wall

ID2 = AffMap.identity(2)


# ---------------------------------------------------------------------------
# two triangles with a focus-focus point (kink example)
# ---------------------------------------------------------------------------

def build_kink_example() -> Tuple[AffineComplex, Dict[str, Tuple]]:
    """Two unit triangles glued along a vertical edge whose upper half glues
    with a shear; the singular point is the edge midpoint."""
    cells = [
        Cell("s1", 2, [(-1, 0), (0, 0), (0, 1)]),
        Cell("s2", 2, [(0, 0), (1, 0), (0, 1)]),
        Cell("r", 1, [(0,), (1,)]),
        Cell("e1", 1, [(0,), (1,)]),   # s1 bottom
        Cell("e2", 1, [(0,), (1,)]),   # s1 hypotenuse
        Cell("e3", 1, [(0,), (1,)]),   # s2 bottom
        Cell("e4", 1, [(0,), (1,)]),   # s2 hypotenuse
        Cell("v0", 0, [()]),
        Cell("v1", 0, [()]),
        Cell("vl", 0, [()]),
        Cell("vr", 0, [()]),
    ]
    faces = {
        ("r", "s1"): AffMap.make([[0], [1]]),
        ("r", "s2"): AffMap.make([[0], [1]]),
        ("e1", "s1"): AffMap.make([[-1], [0]]),
        ("e2", "s1"): AffMap.make([[1], [1]], [-1, 0]),
        ("e3", "s2"): AffMap.make([[1], [0]]),
        ("e4", "s2"): AffMap.make([[-1], [1]], [1, 0]),
        ("v0", "r"): AffMap.make([[]], [0]),
        ("v1", "r"): AffMap.make([[]], [1]),
        ("v0", "s1"): AffMap.make([[], []], [0, 0]),
        ("v1", "s1"): AffMap.make([[], []], [0, 1]),
        ("v0", "s2"): AffMap.make([[], []], [0, 0]),
        ("v1", "s2"): AffMap.make([[], []], [0, 1]),
        ("vl", "s1"): AffMap.make([[], []], [-1, 0]),
        ("vr", "s2"): AffMap.make([[], []], [1, 0]),
        ("vl", "e1"): AffMap.make([[]], [1]),
        ("v0", "e1"): AffMap.make([[]], [0]),
        ("vl", "e2"): AffMap.make([[]], [0]),
        ("v1", "e2"): AffMap.make([[]], [1]),
        ("v0", "e3"): AffMap.make([[]], [0]),
        ("vr", "e3"): AffMap.make([[]], [1]),
        ("vr", "e4"): AffMap.make([[]], [0]),
        ("v1", "e4"): AffMap.make([[]], [1]),
    }
    pieces = {
        "r": [Piece("r", 0, "s1", "s2", ID2),
              Piece("r", 1, "s1", "s2", AffMap.make([[1, 0], [-1, 1]]))],
    }
    xi = {"r": ("s2", (1, 0))}
    cx = AffineComplex(2, cells, faces, pieces, xi, name="kink")
    # the function that is y in the common chart of both cells
    phi_slopes = {"s1": ((0, 1),), "s2": ((0, 1),)}
    return cx, {"phi_slopes": phi_slopes}


# ---------------------------------------------------------------------------
# conical example with boundary
# ---------------------------------------------------------------------------

def build_conical_example(order: int = 4):
    """The cone spanned by (-1,0) and (1,1): two maximal cones, one interior
    ray with kink 1 carrying the slab function 1 + z^((0,-1),0)."""
    cells = [
        Cell("s1", 2, [(0, 0)], rays=[(-1, 0), (0, 1)]),
        Cell("s2", 2, [(0, 0)], rays=[(0, 1), (1, 1)]),
        Cell("r1", 1, [(0,)], rays=[(1,)]),
        Cell("r2", 1, [(0,)], rays=[(1,)]),
        Cell("r3", 1, [(0,)], rays=[(1,)]),
        Cell("v", 0, [()]),
    ]
    faces = {
        ("r1", "s1"): AffMap.make([[-1], [0]]),
        ("r2", "s1"): AffMap.make([[0], [1]]),
        ("r2", "s2"): AffMap.make([[0], [1]]),
        ("r3", "s2"): AffMap.make([[1], [1]]),
        ("v", "r1"): AffMap.make([[]], [0]),
        ("v", "r2"): AffMap.make([[]], [0]),
        ("v", "r3"): AffMap.make([[]], [0]),
        ("v", "s1"): AffMap.make([[], []], [0, 0]),
        ("v", "s2"): AffMap.make([[], []], [0, 0]),
    }
    pieces = {"r2": [Piece("r2", 0, "s1", "s2", ID2)]}
    xi = {"r2": ("s2", (1, 0))}
    cx = AffineComplex(2, cells, faces, pieces, xi, name="conical")
    phi = MPAFunction(1, {("r2", 0): (1,)})
    spec = TruncationSpec(1, (1,), order)
    f = (Element.one(spec, "conical/s1", 2)
         + Element.monomial(spec, "conical/s1", Exponent((0, -1), (0,))))
    slab = Wall(cell="s1", support_base=(0, 0), support_dir=(0, 1),
                support_end=None, function=f, codim=1, rho=("r2", 0))
    return cx, phi, spec, [slab]


# ---------------------------------------------------------------------------
# circle (degenerating elliptic curve)
# ---------------------------------------------------------------------------

def build_circle(n: int = 3) -> Tuple[AffineComplex, MPAFunction]:
    """R/nZ subdivided into n unit intervals; universal kinks (one parameter
    per vertex)."""
    if n < 3:
        raise ValueError("need at least three intervals for a valid circle")
    cells = [Cell(f"s{i}", 1, [(i,), (i + 1,)]) for i in range(n)]
    cells += [Cell(f"v{i}", 0, [()]) for i in range(n)]
    faces = {}
    pieces = {}
    xi = {}
    for i in range(n):
        lo, hi = f"s{(i - 1) % n}", f"s{i}"
        faces[(f"v{i}", hi)] = AffMap.make([[]], [i])
        faces[(f"v{i}", lo)] = AffMap.make([[]], [i if i > 0 else n])
        shift = 0 if i > 0 else -n
        pieces[f"v{i}"] = [Piece(f"v{i}", 0, lo, hi, AffMap.make([[1]], [shift]))]
        xi[f"v{i}"] = (hi, (1,))
    cx = AffineComplex(1, cells, faces, pieces, xi, name=f"circle{n}")
    phi = MPAFunction(n, {(f"v{i}", 0): tuple(1 if j == i else 0 for j in range(n))
                          for i in range(n)})
    return cx, phi


def circle_phi_single(cx: AffineComplex) -> MPAFunction:
    """All kinks specialized to the single parameter t."""
    return MPAFunction(1, {k: (1,) for k in cx.interior_pieces()})


# ---------------------------------------------------------------------------
# star-decomposed triangle (del Pezzo of degree 9)
# ---------------------------------------------------------------------------

P2_VERTS = {1: (-1, -1), 2: (-1, 2), 3: (2, -1)}


def build_p2_triangle(order: int = 5):
    """Star decomposition of conv{(-1,-1),(-1,2),(2,-1)} with the three
    standard slab functions through the origin."""
    v = P2_VERTS
    cells = [
        Cell("s12", 2, [(0, 0), v[1], v[2]]),
        Cell("s23", 2, [(0, 0), v[2], v[3]]),
        Cell("s31", 2, [(0, 0), v[3], v[1]]),
        Cell("r1", 1, [(0,), (1,)]),
        Cell("r2", 1, [(0,), (1,)]),
        Cell("r3", 1, [(0,), (1,)]),
        Cell("b12", 1, [(0,), (3,)]),
        Cell("b23", 1, [(0,), (3,)]),
        Cell("b31", 1, [(0,), (3,)]),
        Cell("o", 0, [()]),
        Cell("w1", 0, [()]), Cell("w2", 0, [()]), Cell("w3", 0, [()]),
    ]
    faces = {}
    adj = {1: ("s12", "s31"), 2: ("s12", "s23"), 3: ("s23", "s31")}
    for i in (1, 2, 3):
        for s in adj[i]:
            faces[(f"r{i}", s)] = AffMap.make([[v[i][0]], [v[i][1]]])
    for (b, s, a, c) in [("b12", "s12", 1, 2), ("b23", "s23", 2, 3),
                         ("b31", "s31", 3, 1)]:
        d = ((v[c][0] - v[a][0]) // 3, (v[c][1] - v[a][1]) // 3)
        faces[(b, s)] = AffMap.make([[d[0]], [d[1]]], [v[a][0], v[a][1]])
    for s in ("s12", "s23", "s31"):
        faces[("o", s)] = AffMap.make([[], []], [0, 0])
    for i in (1, 2, 3):
        for s in adj[i]:
            faces[(f"w{i}", s)] = AffMap.make([[], []], [v[i][0], v[i][1]])
        faces[(f"w{i}", f"r{i}")] = AffMap.make([[]], [1])
        faces[("o", f"r{i}")] = AffMap.make([[]], [0])
    faces[("w1", "b12")] = AffMap.make([[]], [0])
    faces[("w2", "b12")] = AffMap.make([[]], [3])
    faces[("w2", "b23")] = AffMap.make([[]], [0])
    faces[("w3", "b23")] = AffMap.make([[]], [3])
    faces[("w3", "b31")] = AffMap.make([[]], [0])
    faces[("w1", "b31")] = AffMap.make([[]], [3])
    pieces = {
        "r1": [Piece("r1", 0, "s31", "s12", ID2)],
        "r2": [Piece("r2", 0, "s12", "s23", ID2)],
        "r3": [Piece("r3", 0, "s23", "s31", ID2)],
    }
    xi = {"r1": ("s12", (0, 1)), "r2": ("s23", (0, 1)), "r3": ("s31", (-1, 0))}
    cx = AffineComplex(2, cells, faces, pieces, xi, name="p2")
    phi = MPAFunction(1, {("r1", 0): (1,), ("r2", 0): (1,), ("r3", 0): (1,)})
    spec = TruncationSpec(1, (1,), order)

    def slab(sig, i):
        ctx = f"p2/{sig}"
        f = (Element.one(spec, ctx, 2)
             + Element.monomial(spec, ctx, Exponent(v[i], (1,))))
        return Wall(cell=sig, support_base=(0, 0), support_dir=v[i],
                    support_end=v[i], function=f, codim=1, rho=(f"r{i}", 0))

    slabs = [slab("s12", 1), slab("s12", 2), slab("s23", 3)]
    return cx, phi, spec, slabs


# ---------------------------------------------------------------------------
# quartic degeneration (tetrahedron boundary)
# ---------------------------------------------------------------------------

K3_TRIS = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
_K3_CORNER = {0: (0, 0), 1: (1, 0), 2: (0, 1)}
_K3_FAN = {0: (1, 0), 1: (0, 1), 2: (-1, -1)}


def _k3_tri_name(t):
    return f"t{t[0]}{t[1]}{t[2]}"


def _k3_corner_in(t, vert):
    return _K3_CORNER[t.index(vert)]


def _k3_solve_map(d1, d2, r1, r2, p_v) -> AffMap:
    """Integral affine M with M d1 = r1, M d2 = r2, M(p_v) = 0."""
    det = d1[0] * d2[1] - d1[1] * d2[0]
    assert det in (1, -1)
    inv = ((d2[1] * det, -d2[0] * det), (-d1[1] * det, d1[0] * det))
    m = ((r1[0] * inv[0][0] + r2[0] * inv[1][0],
          r1[0] * inv[0][1] + r2[0] * inv[1][1]),
         (r1[1] * inv[0][0] + r2[1] * inv[1][0],
          r1[1] * inv[0][1] + r2[1] * inv[1][1]))
    mm = AffMap.make(m)
    img = mm.apply_vec(p_v)
    return AffMap.make(m, [-img[0], -img[1]])


def build_k3_quartic(order: int = 3):
    """Boundary of the tetrahedron with P^2 fan structure at the vertices and
    slab functions 1 + z^(4m) at the six edge-midpoint singularities."""
    tris = K3_TRIS
    cells = [Cell(_k3_tri_name(t), 2, [(0, 0), (1, 0), (0, 1)]) for t in tris]
    cells += [Cell(f"e{a}{b}", 1, [(0,), (1,)])
              for a in range(4) for b in range(a + 1, 4)]
    cells += [Cell(f"v{i}", 0, [()]) for i in range(4)]
    faces = {}
    pieces: Dict[str, List[Piece]] = {}
    xi = {}
    for t in tris:
        tn = _k3_tri_name(t)
        for vert in t:
            faces[(f"v{vert}", tn)] = AffMap.make(
                [[], []], list(_k3_corner_in(t, vert)))
        for i in range(3):
            for j in range(i + 1, 3):
                a, b = t[i], t[j]
                pa, pb = _k3_corner_in(t, a), _k3_corner_in(t, b)
                d = (pb[0] - pa[0], pb[1] - pa[1])
                faces[(f"e{a}{b}", tn)] = AffMap.make([[d[0]], [d[1]]], list(pa))
    for a in range(4):
        for b in range(a + 1, 4):
            faces[(f"v{a}", f"e{a}{b}")] = AffMap.make([[]], [0])
            faces[(f"v{b}", f"e{a}{b}")] = AffMap.make([[]], [1])

    def chart_dirs(t, vert, first, second):
        p_v = _k3_corner_in(t, vert)
        p_f = _k3_corner_in(t, first)
        p_s = _k3_corner_in(t, second)
        return ((p_f[0] - p_v[0], p_f[1] - p_v[1]),
                (p_s[0] - p_v[0], p_s[1] - p_v[1]), p_v)

    for a in range(4):
        for b in range(a + 1, 4):
            en = f"e{a}{b}"
            t1, t2 = [t for t in tris if a in t and b in t]
            c1 = [x for x in t1 if x not in (a, b)][0]
            c2 = [x for x in t2 if x not in (a, b)][0]
            d1, d2, pv = chart_dirs(t1, a, b, c1)
            m1 = _k3_solve_map(d1, d2, _K3_FAN[0], _K3_FAN[1], pv)
            d1b, d2b, pv2 = chart_dirs(t2, a, b, c2)
            m2 = _k3_solve_map(d1b, d2b, _K3_FAN[0], _K3_FAN[2], pv2)
            t_a = m2.inverse().compose(m1)
            d1c, d2c, pv3 = chart_dirs(t1, b, a, c1)
            m3 = _k3_solve_map(d1c, d2c, _K3_FAN[0], _K3_FAN[1], pv3)
            d1d, d2d, pv4 = chart_dirs(t2, b, a, c2)
            m4 = _k3_solve_map(d1d, d2d, _K3_FAN[0], _K3_FAN[2], pv4)
            t_b = m4.inverse().compose(m3)
            pieces[en] = [Piece(en, 0, _k3_tri_name(t1), _k3_tri_name(t2), t_a),
                          Piece(en, 1, _k3_tri_name(t1), _k3_tri_name(t2), t_b)]
            pa2, pb2 = _k3_corner_in(t2, a), _k3_corner_in(t2, b)
            pc2 = _k3_corner_in(t2, c2)
            xi[en] = (_k3_tri_name(t2), (pc2[0] - pa2[0], pc2[1] - pa2[1]))
    cx = AffineComplex(2, cells, faces, pieces, xi, name="k3")
    phi = MPAFunction(1, {(f"e{a}{b}", i): (1,)
                          for a in range(4) for b in range(a + 1, 4)
                          for i in (0, 1)})
    spec = TruncationSpec(1, (1,), order)
    slabs = []
    for a in range(4):
        for b in range(a + 1, 4):
            en = f"e{a}{b}"
            t1 = [t for t in tris if a in t and b in t][0]
            tn = _k3_tri_name(t1)
            emb = faces[(en, tn)]
            base = emb.apply_pt((Fraction(0),))
            tip = emb.apply_pt((Fraction(1),))
            mid = ((base[0] + tip[0]) / 2, (base[1] + tip[1]) / 2)
            d = (int(tip[0] - base[0]), int(tip[1] - base[1]))
            ctx = f"k3/{tn}"
            for idx, (p0, p1, mono) in enumerate(
                    [(base, mid, d), (mid, tip, (-d[0], -d[1]))]):
                f = (Element.one(spec, ctx, 2)
                     + Element.monomial(
                         spec, ctx, Exponent((4 * mono[0], 4 * mono[1]), (0,))))
                slabs.append(Wall(cell=tn, support_base=p0, support_dir=d,
                                  support_end=p1, function=f, codim=1,
                                  rho=(en, idx)))
    return cx, phi, spec, slabs
