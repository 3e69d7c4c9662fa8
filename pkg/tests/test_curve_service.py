import pytest
from hypothesis import given
from hypothesis import strategies as st

from curve_service import (CurveKind, EllipticModel, EllipticPoint, FiberedCurveSpec, WeierstrassCurve, check_gamma,
                           curve_service, ec_add, ec_neg, elliptic_fiber_curve, is_two_torsion, riemann_roch_coords)
from errors import DegreeMismatch, GammaCheckFailure, NotEnoughFibers, PointNotOnCurve, PreconditionViolation
from galois_field import make_field
from poly_algebra import HomogForm

GF13 = make_field(13)
# y² = x³ - x sobre GF(13)
CURVE = WeierstrassCurve.from_coefficients(GF13, a4=-1)
POINTS = [EllipticPoint.infinity()] + [
    EllipticPoint(GF13.element(x), GF13.element(y))
    for x in range(13) for y in range(13)
    if CURVE.contains(EllipticPoint(GF13.element(x), GF13.element(y)))
]


def test_discriminant():
    assert CURVE.is_smooth()
    assert CURVE.discriminant().enc == 64 % 13
    assert not WeierstrassCurve.from_coefficients(GF13).is_smooth()


def test_two_torsion_sums_to_third():
    p, q = EllipticPoint(GF13.element(0), GF13.zero), EllipticPoint(GF13.one, GF13.zero)
    assert ec_add(CURVE, p, q) == EllipticPoint(GF13.element(12), GF13.zero)
    assert is_two_torsion(CURVE, p)
    assert is_two_torsion(CURVE, EllipticPoint.infinity())


@given(st.sampled_from(POINTS), st.sampled_from(POINTS), st.sampled_from(POINTS))
def test_group_law(p, q, r):
    assert ec_add(CURVE, p, q) == ec_add(CURVE, q, p)
    assert ec_add(CURVE, ec_add(CURVE, p, q), r) == ec_add(CURVE, p, ec_add(CURVE, q, r))
    assert ec_add(CURVE, p, EllipticPoint.infinity()) == p
    assert ec_add(CURVE, p, ec_neg(CURVE, p)).is_infinity
    assert CURVE.contains(ec_add(CURVE, p, p))


def test_point_not_on_curve():
    with pytest.raises(PointNotOnCurve):
        ec_add(CURVE, EllipticPoint(GF13.one, GF13.one), EllipticPoint.infinity())


def test_general_weierstrass_negation():
    # y² + xy = x³ + 3: -P = (x, -y - x)
    curve = WeierstrassCurve.from_coefficients(GF13, a1=1, a6=3)
    point = next(EllipticPoint(GF13.element(x), GF13.element(y)) for x in range(1, 13) for y in range(13)
                 if curve.contains(EllipticPoint(GF13.element(x), GF13.element(y))))
    negated = ec_neg(curve, point)
    assert negated.y == -point.y - point.x
    assert ec_add(curve, point, negated).is_infinity


def test_graph_of_g_fibers(gf13):
    curve = FiberedCurveSpec(CurveKind.GRAPH_OF_G, gf13, 3)
    fibers = curve_service.split_fibers(curve)
    assert [fiber.t.enc for fiber in fibers] == [1, 3, 9]
    assert [point.x.enc for point in fibers[0].points] == [1, 5, 8, 12]
    assert [c.enc for c in fibers[0].points[1].coords] == [5, 25 % 13]


def test_cyclic_cover_fiber_counts(gf5, gf13):
    assert [f.t.enc for f in curve_service.split_fibers(FiberedCurveSpec(CurveKind.CYCLIC_COVER, gf5, 3, c=2))] == [2, 3]
    fibers = curve_service.split_fibers(FiberedCurveSpec(CurveKind.CYCLIC_COVER, gf13, 3, c=2))
    assert [f.t.enc for f in fibers] == [1, 5, 8, 12]
    assert curve_service.split_fibers(FiberedCurveSpec(CurveKind.CYCLIC_COVER, gf13, 3, c=2), max_fibers=2)[-1].t.enc == 5


def test_default_forms_match_cyclic_cover(gf9):
    ruled = curve_service.split_fibers(FiberedCurveSpec(CurveKind.P1XP1_CURVE, gf9, 3, alpha=2))
    cyclic = curve_service.split_fibers(FiberedCurveSpec(CurveKind.CYCLIC_COVER, gf9, 3, alpha=2))
    assert [f.t.enc for f in ruled] == [f.t.enc for f in cyclic] == [0, 1, 2]
    assert ruled == cyclic


def test_user_forms_skip_fiber_through_infinity():
    field = make_field(7)
    # t·x³ - t·y³: em t = 0 a fibra passa por x = ∞
    forms = (HomogForm(field, 1, (0, 6)), HomogForm(field, 1, (0, 0)), HomogForm(field, 1, (0, 0)),
             HomogForm(field, 1, (0, 1)))
    curve = FiberedCurveSpec(CurveKind.P1XP1_CURVE, field, 2, alpha=1, forms=forms)
    fibers = curve_service.split_fibers(curve)
    assert [f.t.enc for f in fibers] == [1, 2, 3, 4, 5, 6]
    assert [p.x.enc for p in fibers[0].points] == [1, 2, 4]


def test_curve_spec_validation(gf13):
    with pytest.raises(PreconditionViolation):
        FiberedCurveSpec(CurveKind.CYCLIC_COVER, gf13, 1)
    with pytest.raises(DegreeMismatch):
        FiberedCurveSpec(CurveKind.GRAPH_OF_G, gf13, 3, g=(0, 0, 1))
    with pytest.raises(DegreeMismatch):
        FiberedCurveSpec(CurveKind.P1XP1_CURVE, gf13, 3, alpha=1, forms=(HomogForm(gf13, 1, (1, 1)),))
    with pytest.raises(PreconditionViolation):
        FiberedCurveSpec(CurveKind.ELLIPTIC_MULTISECTION, gf13, 3)


def test_fiber_at_rejects_invalid_base_point(gf13):
    curve = FiberedCurveSpec(CurveKind.CYCLIC_COVER, gf13, 3, c=2)
    with pytest.raises(NotEnoughFibers):
        curve_service.fiber_at(curve, gf13.zero)
    assert len(curve_service.fiber_at(curve, gf13.element(5))) == 4


def test_elliptic_r3_fibers_pass_gamma_check(gf13):
    curve = FiberedCurveSpec(CurveKind.ELLIPTIC_MULTISECTION, gf13, 3, model=EllipticModel.XY_CUBIC)
    fibers = curve_service.split_fibers(curve)
    assert [f.t.enc for f in fibers] == [1, 5, 8, 12]
    for fiber in fibers:
        fiber_curve = elliptic_fiber_curve(curve, fiber.t)
        assert fiber_curve.is_smooth()
        assert check_gamma(fiber_curve, [EllipticPoint(p.x, p.y) for p in fiber.points])


def test_elliptic_r3_two_torsion_point_fails_gamma(gf5):
    curve = FiberedCurveSpec(CurveKind.ELLIPTIC_MULTISECTION, gf5, 3, model=EllipticModel.XY_CUBIC)
    assert curve_service.split_fibers(curve) == []
    with pytest.raises(GammaCheckFailure):
        curve_service.fiber_at(curve, gf5.element(2))


def test_ulmer_fibers_over_gf9():
    field = make_field(3, 2)
    curve = FiberedCurveSpec(CurveKind.ELLIPTIC_MULTISECTION, field, 3, model=EllipticModel.ULMER)
    fibers = curve_service.split_fibers(curve)
    assert [f.t.enc for f in fibers] == [1, 2]
    for fiber in fibers:
        fiber_curve = elliptic_fiber_curve(curve, fiber.t)
        assert all(fiber_curve.contains(EllipticPoint(p.x, p.y)) for p in fiber.points)
        assert check_gamma(fiber_curve, [EllipticPoint(p.x, p.y) for p in fiber.points])


def test_riemann_roch_coords(gf13):
    x, y = gf13.element(2), gf13.element(3)
    assert riemann_roch_coords(x, y, 5) == (x, y, x * x, x * y)
    assert riemann_roch_coords(x, y, 3) == (x, y)


def test_scan_fields_returns_first_field_with_enough_fibers():
    found = curve_service.scan_fields(
        lambda field: FiberedCurveSpec(CurveKind.CYCLIC_COVER, field, 3, c=2), [(5, 1), (13, 1)], min_fibers=3)
    assert found is not None
    field, fibers = found
    assert field.q == 13
    assert len(fibers) == 3
    assert curve_service.scan_fields(
        lambda field: FiberedCurveSpec(CurveKind.CYCLIC_COVER, field, 3, c=2), [(5, 1)], min_fibers=3) is None


def test_split_fibers_is_deterministic(gf9, gf13):
    for curve in (FiberedCurveSpec(CurveKind.CYCLIC_COVER, gf13, 3, c=2),
                  FiberedCurveSpec(CurveKind.P1XP1_CURVE, gf9, 3, alpha=2),
                  FiberedCurveSpec(CurveKind.ELLIPTIC_MULTISECTION, gf13, 3, model=EllipticModel.XY_CUBIC)):
        assert curve_service.split_fibers(curve) == curve_service.split_fibers(curve)
