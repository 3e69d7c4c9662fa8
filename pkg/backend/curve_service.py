import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from errors import DegreeMismatch, GammaCheckFailure, NotEnoughFibers, PointNotOnCurve, PreconditionViolation
from galois_field import FieldElement, FieldSpec, make_field, nth_roots
from poly_algebra import HomogForm, uni_poly

logger = logging.getLogger(__name__)


class CurveKind(Enum):
    GRAPH_OF_G = "graph_of_g"
    CYCLIC_COVER = "cyclic_cover"
    P1XP1_CURVE = "p1xp1_curve"
    HIRZEBRUCH_CURVE = "hirzebruch_curve"
    ELLIPTIC_MULTISECTION = "elliptic_multisection"


class EllipticModel(Enum):
    LEGENDRE = "legendre"        # y² = x(x-1)(x-t), x = u, y = u²+t+1
    X_EQ_Y2 = "x_eq_y2"          # y² = x³+x-t²-1, x = y², u = y
    XY_CUBIC = "xy_cubic"        # y²+xy = x³+t²+2, x = u, y = u²
    ULMER = "ulmer"              # y² = x(x+1)(x+t²+1), x = u, y = u(u+1)^((P+1)/2)


@dataclass(frozen=True)
class EllipticPoint:
    x: Optional[FieldElement] = None
    y: Optional[FieldElement] = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    @classmethod
    def infinity(cls) -> "EllipticPoint":
        return cls()

    def __repr__(self) -> str:
        if self.is_infinity:
            return "O"
        return f"({self.x.enc}, {self.y.enc})"


@dataclass(frozen=True)
class WeierstrassCurve:
    """y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6"""
    field: FieldSpec
    a1: FieldElement
    a2: FieldElement
    a3: FieldElement
    a4: FieldElement
    a6: FieldElement

    @classmethod
    def from_coefficients(cls, field: FieldSpec, a1=0, a2=0, a3=0, a4=0, a6=0) -> "WeierstrassCurve":
        lift = lambda value: field.one * value
        return cls(field, lift(a1), lift(a2), lift(a3), lift(a4), lift(a6))

    def discriminant(self) -> FieldElement:
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def is_smooth(self) -> bool:
        return bool(self.discriminant())

    def contains(self, point: EllipticPoint) -> bool:
        if point.is_infinity:
            return True
        x, y = point.x, point.y
        lhs = y * y + self.a1 * x * y + self.a3 * y
        rhs = x * x * x + self.a2 * x * x + self.a4 * x + self.a6
        return lhs == rhs

    def require(self, *points: EllipticPoint):
        for point in points:
            if not self.contains(point):
                raise PointNotOnCurve(f"{point} não está em {self}")

    def __str__(self) -> str:
        names = ("a1", "a2", "a3", "a4", "a6")
        values = (self.a1, self.a2, self.a3, self.a4, self.a6)
        return f"E[{', '.join(f'{n}={v.enc}' for n, v in zip(names, values))}] sobre {self.field}"


def ec_neg(curve: WeierstrassCurve, point: EllipticPoint) -> EllipticPoint:
    curve.require(point)
    if point.is_infinity:
        return point
    return EllipticPoint(point.x, -point.y - curve.a1 * point.x - curve.a3)


def ec_add(curve: WeierstrassCurve, p: EllipticPoint, q: EllipticPoint) -> EllipticPoint:
    """Lei de grupo corda-tangente na forma geral de Weierstrass"""
    curve.require(p, q)
    if p.is_infinity:
        return q
    if q.is_infinity:
        return p

    a1, a2, a3, a4, a6 = curve.a1, curve.a2, curve.a3, curve.a4, curve.a6
    x1, y1, x2, y2 = p.x, p.y, q.x, q.y

    if x1 == x2 and not (y1 + y2 + a1 * x2 + a3):
        return EllipticPoint.infinity()

    if x1 != x2:
        slope = (y2 - y1) / (x2 - x1)
        intercept = (y1 * x2 - y2 * x1) / (x2 - x1)
    else:
        # Tangente
        denominator = 2 * y1 + a1 * x1 + a3
        slope = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / denominator
        intercept = (-x1 * x1 * x1 + a4 * x1 + 2 * a6 - a3 * y1) / denominator

    x3 = slope * slope + a1 * slope - a2 - x1 - x2
    y3 = -(slope + a1) * x3 - intercept - a3
    return EllipticPoint(x3, y3)


def is_two_torsion(curve: WeierstrassCurve, point: EllipticPoint) -> bool:
    return ec_neg(curve, point) == point


def check_gamma(curve: WeierstrassCurve, gamma: Sequence[EllipticPoint]) -> bool:
    """Γ_t evita E[2] e sua soma cai em E[2]"""
    curve.require(*gamma)
    if any(is_two_torsion(curve, point) for point in gamma):
        return False
    total = EllipticPoint.infinity()
    for point in gamma:
        total = ec_add(curve, total, point)
    return is_two_torsion(curve, total)


@dataclass(frozen=True)
class FiberPoint:
    """Ponto de uma fibra: parâmetro u da curva e imersão (x_1, ..., x_{r-1})"""
    u: Optional[FieldElement]
    coords: Tuple[FieldElement, ...]
    x: Optional[FieldElement] = None
    y: Optional[FieldElement] = None


@dataclass(frozen=True)
class Fiber:
    t: FieldElement
    points: Tuple[FiberPoint, ...]

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class FiberedCurveSpec:
    kind: CurveKind
    field: FieldSpec
    r: int
    alpha: int = 2
    m_h: int = 0
    c: int = 1
    g: Optional[Tuple[int, ...]] = None
    forms: Optional[Tuple[HomogForm, ...]] = None
    model: Optional[EllipticModel] = None

    def __post_init__(self):
        if self.r < 2:
            raise PreconditionViolation(f"r ≥ 2 violada: r={self.r}")
        if self.kind == CurveKind.GRAPH_OF_G and self.g is not None:
            g = uni_poly(self.field, self.g)
            if g.degree != self.r + 1:
                raise DegreeMismatch(f"deg g = {g.degree}, esperado r+1 = {self.r + 1}")
        if self.forms is not None:
            if len(self.forms) != self.r + 2:
                raise DegreeMismatch(f"curva de tipo (r+1, ·) exige {self.r + 2} formas, recebidas {len(self.forms)}")
            for i, form in enumerate(self.forms):
                expected = self.alpha + i * self.m_h
                if form.degree != expected:
                    raise DegreeMismatch(f"forma A_{i} tem grau {form.degree}, esperado α + i·m = {expected}")
        if self.kind == CurveKind.ELLIPTIC_MULTISECTION and self.model is None:
            raise PreconditionViolation("multisseção elíptica exige o modelo da superfície")

    @property
    def constant(self) -> FieldElement:
        return self.field.element(self.c)

    def g_coeffs(self) -> Tuple[int, ...]:
        return self.g if self.g is not None else (0,) * (self.r + 1) + (1,)

    def curve_forms(self) -> Tuple[HomogForm, ...]:
        """Formas A_i(t,u) de x^i y^(r+1-i); padrão: fecho de x^(r+1) = t^α + c"""
        if self.forms is not None:
            return self.forms
        field = self.field
        forms = []
        for i in range(self.r + 2):
            degree = self.alpha + i * self.m_h
            if i == 0:
                coeffs = [0] * (degree + 1)
                coeffs[self.alpha] = (-field.one).enc
                coeffs[0] = (-self.constant).enc
                forms.append(HomogForm(field, degree, tuple(coeffs)))
            elif i == self.r + 1:
                forms.append(HomogForm.from_terms(field, degree, {0: 1}))
            else:
                forms.append(HomogForm(field, degree, (0,) * (degree + 1)))
        return tuple(forms)

    def describe(self) -> str:
        if self.kind == CurveKind.GRAPH_OF_G:
            return f"g(x) = t, g = {list(self.g_coeffs())}"
        if self.kind == CurveKind.ELLIPTIC_MULTISECTION:
            return f"multisseção elíptica ({self.model.value})"
        if self.forms is not None:
            return f"curva de tipo ({self.r + 1}, {self.alpha + self.m_h * (self.r + 1)}) definida por formas"
        return f"x^{self.r + 1} = t^{self.alpha} + {self.constant.enc}"


def elliptic_fiber_curve(curve: FiberedCurveSpec, t: FieldElement) -> WeierstrassCurve:
    """Fibra E_t da superfície elíptica"""
    field = curve.field
    model = curve.model
    if model == EllipticModel.LEGENDRE:
        return WeierstrassCurve.from_coefficients(field, a2=-(t + 1), a4=t)
    if model == EllipticModel.X_EQ_Y2:
        return WeierstrassCurve.from_coefficients(field, a4=1, a6=-(t * t + 1))
    if model == EllipticModel.XY_CUBIC:
        return WeierstrassCurve.from_coefficients(field, a1=1, a6=t * t + 2)
    if model == EllipticModel.ULMER:
        return WeierstrassCurve.from_coefficients(field, a2=t * t + 2, a4=t * t + 1)
    raise PreconditionViolation(f"modelo elíptico desconhecido: {model}")


def riemann_roch_coords(x: FieldElement, y: FieldElement, r: int) -> Tuple[FieldElement, ...]:
    """(x, y, x², xy, x³, ...) até o slot r-1: base de L(r·O) sem a constante"""
    coords = []
    for slot in range(1, r):
        if slot % 2 == 1:
            coords.append(x ** ((slot + 1) // 2))
        else:
            coords.append(y * x ** ((slot - 2) // 2))
    return tuple(coords)


class CurveService:
    def split_fibers(self, curve: FiberedCurveSpec, max_fibers: Optional[int] = None) -> List[Fiber]:
        """Fibras totalmente decompostas, na ordem de enc(t)"""
        fibers = []
        root_finder = self._root_finder(curve)
        for t in range(curve.field.q):
            if max_fibers is not None and len(fibers) >= max_fibers:
                break
            fiber, reason = self._fiber(curve, curve.field.element(t), root_finder)
            if fiber is None:
                logger.debug(f"Fibra t={t} descartada: {reason}")
                continue
            fibers.append(fiber)

        logger.info(f"{len(fibers)} fibras decompostas em {curve.field} para {curve.describe()}")
        return fibers

    def fiber_at(self, curve: FiberedCurveSpec, t: FieldElement) -> Fiber:
        """Fibra sobre um t explícito; falha se não for válida"""
        fiber, reason = self._fiber(curve, t, self._root_finder(curve))
        if fiber is None:
            if reason.startswith("Γ_t"):
                raise GammaCheckFailure(f"t={t.enc}: {reason}")
            raise NotEnoughFibers(f"t={t.enc} não dá fibra válida: {reason}")
        return fiber

    def scan_fields(self, curve_factory: Callable[[FieldSpec], FiberedCurveSpec],
                    candidates: Iterable[Tuple[int, int]], min_fibers: int) -> Optional[Tuple[FieldSpec, List[Fiber]]]:
        """Primeiro corpo (p, m) com pelo menos min_fibers fibras válidas"""
        for p, m in candidates:
            field = make_field(p, m)
            fibers = self.split_fibers(curve_factory(field), max_fibers=min_fibers)
            if len(fibers) >= min_fibers:
                logger.info(f"Varredura: {field} atinge {min_fibers} fibras")
                return field, fibers
        return None

    def _root_finder(self, curve: FiberedCurveSpec) -> Callable[[FieldElement], List[FieldElement]]:
        field = curve.field
        xs = field.elements

        if curve.kind == CurveKind.GRAPH_OF_G:
            g_values = uni_poly(field, curve.g_coeffs())(xs).view(np.ndarray)
            return lambda t: [field.element(int(x)) for x in np.flatnonzero(g_values == t.enc)]

        if curve.kind == CurveKind.CYCLIC_COVER:
            return lambda t: nth_roots(field, curve.r + 1, t ** curve.alpha + curve.constant)

        if curve.kind in (CurveKind.P1XP1_CURVE, CurveKind.HIRZEBRUCH_CURVE):
            forms = curve.curve_forms()
            return lambda t: self._form_roots(field, forms, t)

        if curve.kind == CurveKind.ELLIPTIC_MULTISECTION:
            return lambda t: self._multisection_roots(curve, t)

        raise PreconditionViolation(f"tipo de curva não suportado: {curve.kind}")

    @staticmethod
    def _form_roots(field: FieldSpec, forms: Sequence[HomogForm], t: FieldElement) -> List[FieldElement]:
        # Fibra em (t:1): Σ A_i(t,1) x^i; ponto x = ∞ quando A_{r+1}(t,1) = 0
        coeffs = [form.evaluate(t, field.one) for form in forms]
        if not coeffs[-1]:
            return []
        values = uni_poly(field, coeffs)(field.elements).view(np.ndarray)
        return [field.element(int(x)) for x in np.flatnonzero(values == 0)]

    @staticmethod
    def _multisection_roots(curve: FiberedCurveSpec, t: FieldElement) -> List[FieldElement]:
        field = curve.field
        model = curve.model
        if model == EllipticModel.LEGENDRE:
            us = field.elements
            tt = t.value
            one = field.gf(1)
            left = (us * us + tt + one) ** 2
            right = us * (us - one) * (us - tt)
            return [field.element(int(u)) for u in np.flatnonzero((left == right).view(np.ndarray))]
        if model == EllipticModel.X_EQ_Y2:
            return nth_roots(field, 6, t * t + 1)
        if model == EllipticModel.XY_CUBIC:
            return nth_roots(field, 4, t * t + 2)
        if model == EllipticModel.ULMER:
            return nth_roots(field, curve.r + 1, t * t + 1)
        raise PreconditionViolation(f"modelo elíptico desconhecido: {model}")

    def _fiber(self, curve: FiberedCurveSpec, t: FieldElement,
               root_finder: Callable[[FieldElement], List[FieldElement]]) -> Tuple[Optional[Fiber], str]:
        roots = root_finder(t)
        if len(roots) != curve.r + 1:
            return None, f"{len(roots)} pontos racionais distintos, esperado {curve.r + 1}"

        if curve.kind != CurveKind.ELLIPTIC_MULTISECTION:
            points = tuple(FiberPoint(u=x, coords=tuple(x ** i for i in range(1, curve.r)), x=x) for x in roots)
            return Fiber(t, points), ""

        fiber_curve = elliptic_fiber_curve(curve, t)
        if not fiber_curve.is_smooth():
            return None, "fibra singular (discriminante nulo)"
        if curve.model == EllipticModel.ULMER and (not (t * t + 1) or not t):
            # c = 0 ou c^(P+1) = 1
            return None, "excluída (c = 0 ou c^(P+1) = 1)"

        points = []
        for u in roots:
            x, y = self._embed(curve, t, u)
            point = EllipticPoint(x, y)
            fiber_curve.require(point)
            points.append(FiberPoint(u=u, coords=riemann_roch_coords(x, y, curve.r), x=x, y=y))

        gamma = [EllipticPoint(point.x, point.y) for point in points]
        if not check_gamma(fiber_curve, gamma):
            return None, "Γ_t falhou (ponto de 2-torsão ou soma fora de E_t[2])"
        return Fiber(t, tuple(points)), ""

    @staticmethod
    def _embed(curve: FiberedCurveSpec, t: FieldElement, u: FieldElement) -> Tuple[FieldElement, FieldElement]:
        model = curve.model
        if model == EllipticModel.LEGENDRE:
            return u, u * u + t + 1
        if model == EllipticModel.X_EQ_Y2:
            return u * u, u
        if model == EllipticModel.XY_CUBIC:
            return u, u * u
        # Ulmer
        return u, u * (u + 1) ** ((curve.r + 1) // 2)


# Instância global
curve_service = CurveService()
