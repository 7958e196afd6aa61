"""Local unitary and orthogonal special cycles as divisors on the
tree: multiplicities, full decompositions, local equations, F-point
classification, and the orthogonal/unitary comparison.

Special homomorphisms are identified with their image vectors in C;
units in Z_p^x are dropped throughout, since all the outputs below
depend only on valuations and on the line spanned by the vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from cyclelift.bttree import (
    VertexLattice,
    central_lattice,
    distance,
    standard_lattices,
    tree_ball,
)
from cyclelift.errors import (
    EmptyIntersectionError,
    NotAdjacentError,
    SearchRadiusExceededError,
)
from cyclelift.padic import QuadLocalElem, VectorC, epsilon, ord_qform

PLUS = "plus"
MINUS = "minus"


@dataclass(frozen=True)
class SpecialHom:
    """A special homomorphism of sign +/-, identified with its image
    vector; ord_qpm is the valuation of its norm form q^+/q^-.

    Norm relations: q(vec) = p^-1 q^+ for the linear (+) case and
    q(vec) = q^- for the antilinear (-) case.
    """

    sign: str
    vec: VectorC
    ord_qpm: int

    @classmethod
    def from_vector(cls, sign: str, vec: VectorC) -> "SpecialHom":
        if sign not in (PLUS, MINUS):
            raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")
        ord_q = ord_qform(vec)  # DegenerateVectorError on isotropic
        ord_qpm = ord_q + 1 if sign == PLUS else ord_q
        if ord_qpm < 0:
            raise ValueError(
                f"special homomorphism must have integral norm; ord q^+- = {ord_qpm}"
            )
        return cls(sign=sign, vec=vec, ord_qpm=ord_qpm)

    @property
    def t_value(self) -> int:
        """t with ord_qpm = 2t (even) or 2t - 1 (odd)."""
        return -((-self.ord_qpm) // 2)

    def central(self) -> VertexLattice:
        return central_lattice(self.vec)


@dataclass(frozen=True)
class OrthEndo:
    """A traceless quasi-endomorphism with square u^2 p^(2 alpha) Delta,
    stored through an eigenvector of the positive eigenvalue.

    The eigenvector is rescaled so ord q lies in {0, -1}; nu_p = 1 iff
    that valuation is odd (i.e. -1), else nu_p = p.
    """

    alpha: int
    eigvec: VectorC
    nu_p: int

    @classmethod
    def from_eigenvector(cls, alpha: int, vec: VectorC) -> "OrthEndo":
        if alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {alpha}")
        ord_q = ord_qform(vec)
        t = -((-ord_q) // 2)
        scaled = vec.scale_p_power(-t)
        nu_p = 1 if ord_q % 2 != 0 else vec.ctx.p
        return cls(alpha=alpha, eigvec=scaled, nu_p=nu_p)

    def central(self) -> VertexLattice:
        return central_lattice(self.eigvec)


@dataclass(frozen=True)
class HorizontalComponent:
    central: VertexLattice
    count: int


@dataclass(frozen=True)
class LocalCycle:
    """Divisor data: vertical projective lines with multiplicities plus
    horizontal-component descriptors."""

    vertical: dict[VertexLattice, int]
    horizontal: tuple[HorizontalComponent, ...]

    def vertical_multiplicity(self, lat: VertexLattice) -> int:
        return self.vertical.get(lat, 0)

    def horizontal_count(self, lat: VertexLattice) -> int:
        return sum(c.count for c in self.horizontal if c.central == lat)


def _mult_from_depth(ord_qpm: int, d: int) -> int:
    t = -((-ord_qpm) // 2)
    if ord_qpm % 2 == 0:
        return t - d // 2
    return t - (d + 1) // 2


def multiplicity(hom: SpecialHom, lat: VertexLattice) -> int:
    """Vertical multiplicity m(b, Lambda): zero unless the vector lies
    in the lattice, else t - floor(d/2) or t - floor((d+1)/2) by the
    parity of ord q^+-, with d the tree distance to the central
    lattice."""
    if lat.r_invariant(hom.vec) < 0:
        return 0
    d = distance(lat, hom.central())
    m = _mult_from_depth(hom.ord_qpm, d)
    if m < 0:
        raise AssertionError("negative multiplicity with membership; formula bug")
    return m


def unitary_cycle(hom: SpecialHom) -> LocalCycle:
    """Full decomposition of the unitary cycle: one horizontal
    component through the central lattice plus the vertical lines given
    by the multiplicity formula, enumerated over the radius-ord_qpm
    ball."""
    center = hom.central()
    vertical: dict[VertexLattice, int] = {}
    for lat, d in tree_ball(center, hom.ord_qpm):
        m = _mult_from_depth(hom.ord_qpm, d)
        if m > 0:
            vertical[lat] = m
    return LocalCycle(
        vertical=vertical,
        horizontal=(HorizontalComponent(central=center, count=1),),
    )


def orthogonal_cycle(j: OrthEndo) -> LocalCycle:
    """Decomposition of the orthogonal cycle: vertical multiplicity
    max(alpha - d, 0) around the central lattice, and two horizontal
    components there."""
    center = j.central()
    vertical: dict[VertexLattice, int] = {}
    if j.alpha > 0:
        for lat, d in tree_ball(center, j.alpha - 1):
            vertical[lat] = j.alpha - d
    return LocalCycle(
        vertical=vertical,
        horizontal=(HorizontalComponent(central=center, count=2),),
    )


def orthogonal_multiplicity(j: OrthEndo, lat: VertexLattice) -> int:
    """max(alpha - d(Lambda, Lambda_0), 0)."""
    return max(j.alpha - distance(lat, j.central()), 0)


def split_pair(j: OrthEndo) -> tuple[SpecialHom, SpecialHom]:
    """The pair of special homomorphisms whose cycles sum to the
    orthogonal cycle.

    For alpha >= 1 the vectors are the eigenvector scaled by
    nu^-1 p^(alpha/2) / p^(alpha/2) (alpha even), resp.
    p^((alpha-1)/2) / nu^-1 p^((alpha+1)/2) (alpha odd); exactly one of
    the two norms has valuation alpha, the other alpha - 1.  For
    alpha = 0 both homomorphisms share a sign and use the eigenvector
    and its conjugate.
    """
    b0 = j.eigvec
    nu_exp = 1 if j.nu_p != 1 else 0  # nu = p^nu_exp
    if j.alpha == 0:
        sign = PLUS if j.nu_p == 1 else MINUS
        return (
            SpecialHom.from_vector(sign, b0),
            SpecialHom.from_vector(sign, epsilon(b0)),
        )
    if j.alpha % 2 == 0:
        half = j.alpha // 2
        vec_plus = b0.scale_p_power(half - nu_exp)
        vec_minus = b0.scale_p_power(half)
    else:
        vec_plus = b0.scale_p_power((j.alpha - 1) // 2)
        vec_minus = b0.scale_p_power((j.alpha + 1) // 2 - nu_exp)
    return (
        SpecialHom.from_vector(PLUS, vec_plus),
        SpecialHom.from_vector(MINUS, vec_minus),
    )


class FiberKind(Enum):
    EMPTY = "empty"
    SINGLE_POINT = "single_point"
    FULL_LINE = "full_line"


@dataclass(frozen=True)
class FiberPoints:
    kind: FiberKind
    superspecial: bool | None = None  # set only for SINGLE_POINT


def fiber_points(hom: SpecialHom, lat: VertexLattice) -> FiberPoints:
    """Classification of the F-points of the cycle on one projective
    line: empty / a single special point / the full line, by the
    r-invariant, the lattice type, and the sign."""
    vt = lat.require_vertex()
    r = lat.r_invariant(hom.vec)
    if r < 0:
        return FiberPoints(FiberKind.EMPTY)
    if r >= 1:
        return FiberPoints(FiberKind.FULL_LINE)
    # r == 0: primitive membership
    if hom.sign == MINUS:
        if vt == 0:
            return FiberPoints(FiberKind.SINGLE_POINT, superspecial=hom.ord_qpm > 0)
        return FiberPoints(FiberKind.EMPTY)
    if vt == 0:
        return FiberPoints(FiberKind.FULL_LINE)
    return FiberPoints(FiberKind.SINGLE_POINT, superspecial=hom.ord_qpm > 0)


@dataclass(frozen=True)
class OrdinaryEquation:
    """Local equation of the cycle on the ordinary chart of one
    projective line: p^p_exp * (c0 T + c1) on a type-0 line and
    p^p_exp * (c0 + c1 T) on a type-2 line, in a hyperbolic basis.

    The coefficient pair is primitive; it is a unit of the chart ring
    exactly away from the central lattice, so p_exp equals the vertical
    multiplicity.
    """

    p_exp: int
    c0: QuadLocalElem
    c1: QuadLocalElem
    vtype: int

    def residual_is_unit(self) -> bool:
        """Whether the linear factor is a unit of the ordinary chart:
        within precision this is detected by p | (c0 c1' - c0' c1)."""
        c0, c1 = self.c0, self.c1
        cross = c0.mul(c1.conj()).sub(c0.conj().mul(c1))
        v = cross.valuation_or_none()
        return v is None or v >= 1


def _solve_coordinates(lat: VertexLattice, basis: tuple[VectorC, VectorC], vec: VectorC):
    """Coordinates of vec in an o-basis of lat (exact; assumes vec in
    the span over k)."""
    ctx = lat.ctx
    p = ctx.p
    u, w = basis
    e = max(u.denom_exp, w.denom_exp)
    m00 = u.a0.mul_int(p ** (e - u.denom_exp))
    m10 = u.a1.mul_int(p ** (e - u.denom_exp))
    m01 = w.a0.mul_int(p ** (e - w.denom_exp))
    m11 = w.a1.mul_int(p ** (e - w.denom_exp))
    det = m00.mul(m11).sub(m01.mul(m10))
    dv = det.valuation()
    dunit_inv = det.divide_p_power(dv).unit_inverse()
    c0, c1 = vec.a0, vec.a1
    # adj(M) * c, then divide by p^dv and shift denominators.
    x0 = m11.mul(c0).sub(m01.mul(c1)).mul(dunit_inv)
    x1 = m00.mul(c1).sub(m10.mul(c0)).mul(dunit_inv)
    shift = e - vec.denom_exp - dv
    out = []
    for x in (x0, x1):
        if shift >= 0:
            out.append(x.mul_int(p**shift))
        else:
            out.append(x.divide_p_power(-shift))
    return out[0], out[1]


def ordinary_equation(hom: SpecialHom, lat: VertexLattice) -> OrdinaryEquation:
    """The local equation of the cycle on the ordinary chart at a
    vertex lattice the vector lies in.

    Type 0: f = p^r (a0 T + a1) for the antilinear sign and
    p^(r+1) (a0' T + a1') for the linear sign; type 2: f = p^r (a0 + a1 T)
    for the linear sign, conjugated coefficients for the antilinear
    sign.  Raises EmptyIntersectionError when the vector is outside.
    """
    vt = lat.require_vertex()
    r = lat.r_invariant(hom.vec)
    if r < 0:
        raise EmptyIntersectionError("vector not in the lattice; cycle misses chart")
    basis = lat.hyperbolic_basis()
    a0, a1 = _solve_coordinates(lat, basis, hom.vec)
    alpha0 = a0.divide_p_power(r) if not a0.is_zero() else a0
    alpha1 = a1.divide_p_power(r) if not a1.is_zero() else a1
    if hom.sign == MINUS:
        if vt == 0:
            return OrdinaryEquation(p_exp=r, c0=alpha0, c1=alpha1, vtype=vt)
        return OrdinaryEquation(p_exp=r, c0=alpha0.conj(), c1=alpha1.conj(), vtype=vt)
    if vt == 0:
        return OrdinaryEquation(p_exp=r + 1, c0=alpha0.conj(), c1=alpha1.conj(), vtype=vt)
    return OrdinaryEquation(p_exp=r, c0=alpha0, c1=alpha1, vtype=vt)


def superspecial_exponents(
    hom: SpecialHom, lat0: VertexLattice, lat2: VertexLattice
) -> tuple[int, int]:
    """Vanishing exponents (e_T0, e_T1) of the cycle at the
    superspecial point of an adjacent pair (type 0, type 2):
    (r', r) for the antilinear sign and (r', r+1) for the linear sign,
    clamped at zero when the point misses the cycle."""
    if lat0.require_vertex() != 0 or lat2.require_vertex() != 2:
        raise NotAdjacentError("expected a (type 0, type 2) pair")
    if not any(nb == lat2 for nb in lat0.neighbors()):
        raise NotAdjacentError("lattices are not tree neighbours")
    r = lat0.r_invariant(hom.vec)
    rp = lat2.r_invariant(hom.vec)
    if hom.sign == MINUS:
        return (max(rp, 0), max(r, 0))
    return (max(rp, 0), max(r + 1, 0))


# -- serialization -----------------------------------------------------------


DEFAULT_LABEL_RADIUS = 8


def path_words(
    ctx, keys: set, radius_cap: int = DEFAULT_LABEL_RADIUS
) -> dict:
    """Label tree vertices by neighbour-index paths from Lambda0.

    The root gets the empty word; a child reached as neighbour i of a
    word w gets w + '.' + str(i).  Deterministic because neighbour
    enumeration is."""
    lam0, _ = standard_lattices(ctx)
    words = {lam0.key: ""}
    missing = set(keys) - set(words)
    frontier = [(lam0, None, "")]
    depth = 0
    while missing and depth < radius_cap:
        depth += 1
        nxt = []
        for node, parent_key, word in frontier:
            for i, nb in enumerate(node.neighbors()):
                k = nb.key
                if k == parent_key:
                    continue
                child_word = f"{word}.{i}" if word else str(i)
                if k not in words:
                    words[k] = child_word
                    missing.discard(k)
                nxt.append((nb, node.key, child_word))
        frontier = nxt
    if missing:
        raise SearchRadiusExceededError(
            f"{len(missing)} vertices beyond labelling radius {radius_cap}"
        )
    return words


def cycle_to_json_dict(cycle: LocalCycle, radius_cap: int = DEFAULT_LABEL_RADIUS) -> dict:
    """JSON form with path-word vertex labels and a table of the
    vertices' canonical-form pivot data; deterministic ordering."""
    lattices = [c.central for c in cycle.horizontal] + list(cycle.vertical)
    if not lattices:
        return {"horizontal": [], "vertical": [], "vertices": {}}
    ctx = lattices[0].ctx
    keys = {lat.key for lat in lattices}
    words = path_words(ctx, keys, radius_cap=radius_cap)
    horizontal = sorted(
        ({"vertex": words[c.central.key], "count": c.count} for c in cycle.horizontal),
        key=lambda d: d["vertex"],
    )
    vertical = sorted(
        ({"vertex": words[lat.key], "mult": m} for lat, m in cycle.vertical.items()),
        key=lambda d: d["vertex"],
    )
    vertices = {words[lat.key]: lat.describe() for lat in lattices}
    return {"horizontal": horizontal, "vertical": vertical, "vertices": vertices}
