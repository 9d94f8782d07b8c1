from fractions import Fraction

import pytest

from thetawalls.algebra import Cyclo, Element, Exponent, TruncationSpec
from thetawalls.complex import AffineComplex, Cell, MPAFunction
from thetawalls.corpus import (build_conical_example, build_k3_quartic,
                               build_p2_triangle)
from thetawalls.walls import OpenGluingData, Wall, WallStructure


def build_plane(order=6, q_rank=1, name="plane"):
    cells = [Cell("s", 2, [(0, 0)], rays=[(1, 0), (0, 1), (-1, 0), (0, -1)])]
    cx = AffineComplex(2, cells, {}, {}, {}, name=name)
    phi = MPAFunction(q_rank, {})
    spec = TruncationSpec(q_rank, (1,) * q_rank, order)
    return cx, phi, spec


def mono(spec, ctx, lam, q, coeff=1):
    return Element.monomial(spec, ctx, Exponent(tuple(lam), tuple(q)), coeff)


def line_walls(cx, spec, lam, q, direction, name="plane"):
    """A full line through the origin as its two closed half-lines."""
    ctx = f"{name}/s"
    f = Element.one(spec, ctx, 2) + mono(spec, ctx, lam, q)
    return [Wall("s", (0, 0), direction, None, f, 0, None),
            Wall("s", (0, 0), tuple(-x for x in direction), None, f, 0, None)]


# ---------------------------------------------------------------------------
# chambers
# ---------------------------------------------------------------------------

def test_conical_chambers():
    cx, phi, spec, slabs = build_conical_example()
    ws = WallStructure(cx, phi, spec, slabs)
    chs = ws.chambers()
    assert len(chs) == 2
    assert {c.sigma for c in chs} == {"s1", "s2"}
    # each chamber is a boundary chamber with exactly one boundary edge
    for c in chs:
        assert len(c.boundary_facets) == 1


def test_two_lines_chambers_and_joint():
    cx, phi, spec = build_plane()
    ws = WallStructure(cx, phi, spec,
                       line_walls(cx, spec, (1, 0), (1,), (1, 0))
                       + line_walls(cx, spec, (0, 1), (1,), (0, 1)))
    assert len(ws.chambers()) == 4
    js = ws.joints()
    assert len(js) == 1
    assert js[0].codim == 0
    # the two lines are atomized into four ray walls
    assert len(ws.walls) == 4


def test_empty_structure_chambers_are_cells():
    cx, phi, spec, _ = build_conical_example()
    ws = WallStructure(cx, phi, spec, [])  # trivial slab auto-inserted
    assert any("trivial slab" in line for line in ws.log)
    assert len(ws.chambers()) == 2


def test_p2_initial_chambers():
    cx, phi, spec, slabs = build_p2_triangle()
    ws = WallStructure(cx, phi, spec, slabs)
    # three slabs through the origin: each maximal cell is one chamber,
    # and around the origin joint there are the three slab germs
    assert len(ws.chambers()) == 3
    js = [j for j in ws.joints() if j.min_cell == "o"]
    assert len(js) == 1
    assert js[0].codim == 2 and not js[0].boundary


# ---------------------------------------------------------------------------
# crossing maps
# ---------------------------------------------------------------------------

def test_theta_wall_spec_example():
    # f = 1 + t x^-1 y^-1 on the ray through (-1,-1)
    cx, phi, spec = build_plane()
    ctx = "plane/s"
    f = Element.one(spec, ctx, 2) + mono(spec, ctx, (-1, -1), (1,))
    w = Wall("s", (0, 0), (-1, -1), None, f, 0, None)
    ws = WallStructure(cx, phi, spec, [w])
    x = mono(spec, ctx, (1, 0), (0,))
    out = ws.cross_wall(x, w, (1, -1))
    assert out == x + mono(spec, ctx, (0, -1), (1,))
    # tangent monomials are fixed
    tangent = mono(spec, ctx, (-2, -2), (0,))
    assert ws.cross_wall(tangent, w, (1, -1)) == tangent
    # crossing back is inverse
    back = ws.cross_wall(out, w, (-1, 1))
    assert back == x


def test_theta_wall_automorphism_multiplicative():
    cx, phi, spec = build_plane()
    ctx = "plane/s"
    f = Element.one(spec, ctx, 2) + mono(spec, ctx, (1, 0), (1,), 3)
    w = Wall("s", (0, 0), (1, 0), None, f, 0, None)
    ws = WallStructure(cx, phi, spec, [w])
    a = mono(spec, ctx, (2, 1), (0,)) + mono(spec, ctx, (0, -1), (1,), 5)
    b = mono(spec, ctx, (-1, 2), (2,)) + Element.one(spec, ctx, 2)
    n = (0, 1)
    assert ws.cross_wall(a * b, w, n) == \
        ws.cross_wall(a, w, n) * ws.cross_wall(b, w, n)


def test_cross_slab_conical_paper_value():
    cx, phi, spec, slabs = build_conical_example()
    ws = WallStructure(cx, phi, spec, slabs)
    slab = [w for w in ws.walls if w.codim == 1][0]
    x = mono(spec, "conical/s1", (-1, 0), (0,))
    out = ws.cross_slab(x, slab, "s1")
    # x |-> (1 + w) y^{-1} t in the s2 chart: y^{-1} = z^((-1,-1), q=1)...
    expect = (mono(spec, "conical/s2", (-1, 0), (1,))
              + mono(spec, "conical/s2", (-1, -1), (1,)))
    assert out == expect
    # Lambda_rho-tangent elements are fixed
    wmon = mono(spec, "conical/s1", (0, 1), (0,))
    assert ws.cross_slab(wmon, slab, "s1") == \
        mono(spec, "conical/s2", (0, 1), (0,))
    # monomials pointing away from the source are rejected
    y_s1 = mono(spec, "conical/s1", (1, 1), (1,))
    with pytest.raises(Exception):
        ws.cross_slab(y_s1, slab, "s1")


def test_chi_localizations_conical():
    cx, phi, spec, slabs = build_conical_example()
    ws = WallStructure(cx, phi, spec, slabs)
    slab = [w for w in ws.walls if w.codim == 1][0]
    zq = spec.zero_q()
    z_plus = ws.slab_element(slab, {(0, 1, zq): 1})
    z_minus = ws.slab_element(slab, {(0, -1, zq): 1})
    lam = ws.slab_element(slab, {(1, 0, zq): 1})
    # chi on the sigma(rho) = s2 side: Z+ -> z^xi = z^(1,0)
    assert ws.chi(slab, "s2", z_plus) == mono(spec, "conical/s2", (1, 0), (0,))
    # the relation maps to f z^kappa on both sides
    rel = ws.slab_mul(slab, z_plus, z_minus)
    img2 = ws.chi(slab, "s2", rel)
    f_k = ((Element.one(spec, "conical/s2", 2)
            + mono(spec, "conical/s2", (0, -1), (0,)))
           * mono(spec, "conical/s2", (0, 0), (1,)))
    assert img2 == f_k
    img1 = ws.chi(slab, "s1", rel)
    f_k1 = ((Element.one(spec, "conical/s1", 2)
             + mono(spec, "conical/s1", (0, -1), (0,)))
            * mono(spec, "conical/s1", (0, 0), (1,)))
    assert img1 == f_k1
    # tangent monomials map to z^lam on both sides
    assert ws.chi(slab, "s2", lam) == mono(spec, "conical/s2", (0, 1), (0,))
    assert ws.chi(slab, "s1", lam) == mono(spec, "conical/s1", (0, 1), (0,))
    # chi_{s1}(Z-): the x monomial
    assert ws.chi(slab, "s1", z_minus) == mono(spec, "conical/s1", (-1, 0), (0,))


def test_slab_mul_normal_form():
    cx, phi, spec, slabs = build_conical_example()
    ws = WallStructure(cx, phi, spec, slabs)
    slab = [w for w in ws.walls if w.codim == 1][0]
    zq = spec.zero_q()
    zp = ws.slab_element(slab, {(0, 1, zq): 1})
    zm = ws.slab_element(slab, {(0, -1, zq): 1})
    prod = ws.slab_mul(slab, ws.slab_mul(slab, zp, zp), zm)
    # Z+^2 Z- = Z+ f z^kappa: no mixed terms survive
    for e, _ in prod.terms.items():
        assert e.lam[-1] >= 0
    # associativity on a random triple
    a = zp + ws.slab_element(slab, {(2, 0, (1,)): 3})
    b = zm + ws.slab_element(slab, {(0, 0, (0,)): 1})
    c = ws.slab_element(slab, {(-1, -2, (0,)): 1})
    lhs = ws.slab_mul(slab, ws.slab_mul(slab, a, b), c)
    rhs = ws.slab_mul(slab, a, ws.slab_mul(slab, b, c))
    assert lhs == rhs


# ---------------------------------------------------------------------------
# codimension-zero consistency
# ---------------------------------------------------------------------------

def test_single_line_consistent():
    cx, phi, spec = build_plane()
    ctx = "plane/s"
    triv = [Wall("s", (0, 0), (0, 1), None, Element.one(spec, ctx, 2), 0, None),
            Wall("s", (0, 0), (0, -1), None, Element.one(spec, ctx, 2), 0, None)]
    ws = WallStructure(cx, phi, spec,
                       line_walls(cx, spec, (1, 0), (1,), (1, 0)) + triv)
    j = ws.joints()[0]
    ok, defect = ws.check_codim0(j)
    assert ok


def test_two_lines_defect():
    cx, phi, spec = build_plane(order=2)
    ws = WallStructure(cx, phi, spec,
                       line_walls(cx, spec, (1, 0), (1,), (1, 0))
                       + line_walls(cx, spec, (0, 1), (1,), (0, 1)))
    j = ws.joints()[0]
    ok, defect = ws.check_codim0(j)
    assert not ok
    # the defect lives at order 2 and involves t^2 x y
    orders = set()
    for g, d in defect.items():
        for e, c in d.terms.items():
            orders.add(spec.h(e.q))
    assert orders == {2}


# ---------------------------------------------------------------------------
# codimension-one consistency
# ---------------------------------------------------------------------------

def test_codim1_trivial_subdivision_passes():
    # one slab subdivided by a transversal trivial wall: the two halves carry
    # equal functions and the joint must pass
    cx, phi, spec, slabs = build_conical_example()
    ctx = "conical/s1"
    cut = Wall("s1", (0, 1), (-1, 0), None, Element.one(spec, ctx, 2), 0, None)
    ws = WallStructure(cx, phi, spec, slabs + [cut])
    js = [j for j in ws.joints() if j.codim == 1]
    assert len(js) == 1
    ok, msg = ws.check_codim1(js[0])
    assert ok, msg


def test_codim1_perturbed_fails():
    cx, phi, spec, slabs = build_conical_example()
    ctx = "conical/s1"
    cut = Wall("s1", (0, 1), (-1, 0), None, Element.one(spec, ctx, 2), 0, None)
    # break the upper half of the slab by an extra order-1 factor
    extra = Element.one(spec, ctx, 2) + mono(spec, ctx, (0, 1), (1,))
    bad = Wall("s1", (0, 1), (0, 1), None, extra, 0, None)
    ws = WallStructure(cx, phi, spec, slabs + [cut, bad], auto_slabs=True)
    js = [j for j in ws.joints() if j.codim == 1]
    assert len(js) == 1
    ok, msg = ws.check_codim1(js[0])
    assert not ok


def test_codim1_focus_focus_k3_midpoints():
    cx, phi, spec, slabs = build_k3_quartic(order=2)
    ws = WallStructure(cx, phi, spec, slabs)
    js = [j for j in ws.joints() if j.codim == 1 and j.on_delta]
    assert len(js) == 6
    for j in js:
        ok, msg = ws.check_codim1(j)
        assert ok, msg


# ---------------------------------------------------------------------------
# boundary joints
# ---------------------------------------------------------------------------

def test_boundary_convexity_conical():
    cx, phi, spec, slabs = build_conical_example()
    ws = WallStructure(cx, phi, spec, slabs)
    js = [j for j in ws.joints() if j.boundary]
    assert js
    for j in js:
        ok, lam = ws.boundary_convexity(j)
        assert ok


def test_boundary_convexity_repair_example():
    # sigma2 spanned by (0,1),(1,-1); wall z^{(0,1),0} on the interior ray
    cells = [
        Cell("s1", 2, [(0, 0)], rays=[(-1, 0), (0, 1)]),
        Cell("s2", 2, [(0, 0)], rays=[(0, 1), (1, -1)]),
        Cell("r1", 1, [(0,)], rays=[(1,)]),
        Cell("r2", 1, [(0,)], rays=[(1,)]),
        Cell("r3", 1, [(0,)], rays=[(1,)]),
        Cell("v", 0, [()]),
    ]
    from thetawalls.complex import AffMap
    faces = {
        ("r1", "s1"): AffMap.make([[-1], [0]]),
        ("r2", "s1"): AffMap.make([[0], [1]]),
        ("r2", "s2"): AffMap.make([[0], [1]]),
        ("r3", "s2"): AffMap.make([[1], [-1]]),
        ("v", "r1"): AffMap.make([[]], [0]),
        ("v", "r2"): AffMap.make([[]], [0]),
        ("v", "r3"): AffMap.make([[]], [0]),
        ("v", "s1"): AffMap.make([[], []], [0, 0]),
        ("v", "s2"): AffMap.make([[], []], [0, 0]),
    }
    from thetawalls.complex import Piece
    pieces = {"r2": [Piece("r2", 0, "s1", "s2", AffMap.identity(2))]}
    xi = {"r2": ("s2", (1, 0))}
    cx = AffineComplex(2, cells, faces, pieces, xi, name="repair")
    phi = MPAFunction(1, {("r2", 0): (1,)})
    spec = TruncationSpec(1, (1,), 3)
    f = Element.monomial(spec, "repair/s1", Exponent((0, 1), (0,)))
    slab = Wall("s1", (0, 0), (0, 1), None, f, 1, ("r2", 0))
    ws = WallStructure(cx, phi, spec, [slab])
    js = [j for j in ws.joints() if j.boundary]
    for j in js:
        ok, lam = ws.boundary_convexity(j)
        assert ok


# ---------------------------------------------------------------------------
# gluing twists of crossings
# ---------------------------------------------------------------------------

def test_cross_slab_with_gluing():
    cx, phi, spec, slabs = build_conical_example()
    two = Cyclo.rational(2)
    g = OpenGluingData({("s1", ("r2", 0)): (Cyclo.one(), Cyclo.one()),
                        ("s2", ("r2", 0)): (two, Cyclo.one())})
    ws = WallStructure(cx, phi, spec, slabs, gluing=g)
    slab = [w for w in ws.walls if w.codim == 1][0]
    x = mono(spec, "conical/s1", (-1, 0), (0,))
    out = ws.cross_slab(x, slab, "s1")
    # each target term is rescaled by s_{s2}(lam)
    expect = (mono(spec, "conical/s2", (-1, 0), (1,), Fraction(1, 2))
              + mono(spec, "conical/s2", (-1, -1), (1,), Fraction(1, 2)))
    assert out == expect
