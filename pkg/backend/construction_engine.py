import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from curve_service import CurveKind, EllipticModel, Fiber, FiberPoint, FiberedCurveSpec, curve_service
from errors import (DivisibilityViolation, GeneralPositionFailure, LRCError, NotEnoughFibers,
                    PreconditionViolation, SingularLocalMatrix)
from galois_field import FieldElement, FieldSpec, enumerate_field, make_field
from lr_code import EvaluationPlan, FunctionBasis, LinearCode, Predicted, build_code, d_opt
from poly_algebra import HomogForm, rank

logger = logging.getLogger(__name__)


class FamilyType(Enum):
    BASELINE = "baseline"
    TAMO_BARG = "tamo-barg"
    CYCLIC = "cyclic"
    P1XP1 = "p1xp1"
    P1XP1_REFINED = "p1xp1-refined"
    HIRZEBRUCH = "hirzebruch"
    HIRZEBRUCH_REFINED = "hirzebruch-refined"
    ELLIPTIC_LEGENDRE = "elliptic-legendre"
    ELLIPTIC_R5 = "elliptic-r5"
    ELLIPTIC_R3 = "elliptic-r3"
    ULMER = "ulmer"


class PointSource(Enum):
    RATIONAL_NORMAL = "rational-normal"
    RANDOM = "random"


DESIGN_FAMILIES = (FamilyType.CYCLIC, FamilyType.P1XP1, FamilyType.P1XP1_REFINED,
                   FamilyType.HIRZEBRUCH, FamilyType.HIRZEBRUCH_REFINED)
ELLIPTIC_FAMILIES = (FamilyType.ELLIPTIC_LEGENDRE, FamilyType.ELLIPTIC_R5, FamilyType.ELLIPTIC_R3,
                     FamilyType.ULMER)
ELLIPTIC_MODELS = {
    FamilyType.ELLIPTIC_LEGENDRE: (EllipticModel.LEGENDRE, 3),
    FamilyType.ELLIPTIC_R5: (EllipticModel.X_EQ_Y2, 5),
    FamilyType.ELLIPTIC_R3: (EllipticModel.XY_CUBIC, 3),
}
MAX_SAMPLING_ATTEMPTS = 1000


class ConstructionSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: FamilyType
    p: int = Field(ge=2)
    m: int = Field(default=1, ge=1)
    modulus: Optional[List[int]] = None
    r: Optional[int] = Field(default=None, ge=2)
    b: Optional[int] = Field(default=None, ge=1)
    M: Optional[int] = Field(default=None, ge=0)
    N: Optional[int] = Field(default=None, ge=0)
    alpha: Optional[int] = Field(default=None, ge=1)
    mh: int = Field(default=0, ge=0)
    dd: Optional[int] = Field(default=None, ge=0)
    d: Optional[int] = Field(default=None, ge=0)
    c: int = Field(default=1, ge=0)
    g: Optional[List[int]] = None
    g_forms: Optional[List[List[int]]] = None
    t_values: Optional[List[int]] = None
    point_source: PointSource = PointSource.RATIONAL_NORMAL
    seed: int = Field(default=0, ge=0)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _required(spec: ConstructionSpec, name: str) -> int:
    value = getattr(spec, name)
    if value is None:
        raise PreconditionViolation(f"família {spec.family.value} exige --{name}")
    return value


def locality(spec: ConstructionSpec) -> int:
    if spec.family == FamilyType.ULMER:
        return spec.p ** spec.m
    if spec.family in ELLIPTIC_MODELS:
        fixed = ELLIPTIC_MODELS[spec.family][1]
        if spec.r is not None and spec.r != fixed:
            raise PreconditionViolation(f"família {spec.family.value} tem r = {fixed}, recebido r={spec.r}")
        return fixed
    return _required(spec, "r")


# Livro-razão ε e previsões fechadas

def cyclic_epsilons(r: int) -> List[int]:
    """ε_0 = 0; ε_j = 1 para 0 < j ≤ (r+1)/2; senão 2"""
    return [0] + [1 if 2 * j <= r + 1 else 2 for j in range(1, r)]


def refined_epsilons(r: int, alpha: int, mh: int = 0) -> List[int]:
    return [_ceil_div(i * (alpha + mh * (r + 1)), r + 1) for i in range(r)]


def _ledger_k(caps: Sequence[int]) -> int:
    return sum(max(cap + 1, 0) for cap in caps)


def _design_N(r: int, n: int, dd: int, name: str = "𝔡") -> int:
    if dd >= n:
        raise PreconditionViolation(f"{name} < n violada: {name}={dd}, n={n}")
    if (n - dd) % (r + 1):
        raise DivisibilityViolation(f"(r+1) | (n − {name}) violada: r+1={r + 1}, n−{name}={n - dd}")
    return (n - dd) // (r + 1)


def _require_refined(r: int, alpha: int, N: int):
    if (r + 1) % alpha:
        raise PreconditionViolation(f"α | (r+1) violada: α={alpha}, r+1={r + 1}")
    minimum = _ceil_div(alpha * (r - 1), r + 1)
    if N < minimum:
        raise PreconditionViolation(f"N ≥ ⌈α(r−1)/(r+1)⌉ = {minimum} violada: N={N}")


def refined_k(r: int, N: int, alpha: int, mh: int = 0) -> int:
    """Fórmula de k em dois casos das construções refinadas"""
    if r + 1 == alpha:
        return r * (N + 1) - r * (r - 1) // 2
    return r * (N + 1) + 2 * alpha - (alpha + 1) * (r + 1) // 2 - mh * r * (r - 1) // 2


def refined_d_upper(r: int, dd: int, alpha: int, mh: int = 0) -> int:
    bound = (dd + Fraction((alpha - 1) * (r - 3), 2)
             - _ceil_div(4 * alpha - (alpha + 1) * (r + 1), 2 * r)
             + Fraction(mh * (r * r - 1), 2))
    return math.floor(bound)


def baseline_ledger(r: int, b: int, M: int, N: int) -> Tuple[List[int], List[int], Predicted]:
    if b - M < 1:
        raise PreconditionViolation(f"b − M ≥ 1 violada: b={b}, M={M}")
    if b - N < 1:
        raise PreconditionViolation(f"b − N ≥ 1 violada: b={b}, N={N}")
    delta = M - N
    k = (M + 1) + (r - 1) * (N + 1)
    predicted = Predicted(
        k=k,
        d_lower=min((b - M) * (r + 1), 2 * (b - N)),
        d_upper=(r + 1) * (b - (N + 1)) - delta - _ceil_div(delta, r) + 2,
        k_formulas={"V[M,N]": k},
    )
    return [M] + [N] * (r - 1), [], predicted


def tamo_barg_ledger(r: int, b: int, N: int) -> Tuple[List[int], List[int], Predicted]:
    n = b * (r + 1)
    d = n - (N * (r + 1) + r - 1)
    k = r * (N + 1)
    return [N] * r, [], Predicted(k=k, d_lower=d, d_upper=d, k_formulas={"r(N+1)": k})


def cyclic_ledger(r: int, n: int, dd: int) -> Tuple[List[int], List[int], Predicted]:
    N = _design_N(r, n, dd)
    epsilons = cyclic_epsilons(r)
    caps = [N - e for e in epsilons]
    ledger = _ledger_k(caps)
    if r % 2:
        k = r * (n - dd) // (r + 1) + (5 - r) // 2
        formulas = {"fechada": k, "ledger": ledger}
    else:
        k = ledger
        formulas = {"ledger": ledger}

    if r == 2 or r == 3:
        d_upper = dd
    elif r % 2:
        d_upper = dd + (r - 5) // 2 + 2
    else:
        d_upper = dd + r // 2
    return caps, epsilons, Predicted(k=k, d_lower=dd, d_upper=d_upper, k_formulas=formulas)


def p1xp1_coarse_ledger(r: int, n: int, dd: int, alpha: int) -> Tuple[List[int], List[int], Predicted]:
    N = _design_N(r, n, dd)
    k = r * (N + 1)
    predicted = Predicted(k=k, d_lower=dd - alpha * (r - 1), d_upper=dd - r + 1, k_formulas={"fechada": k})
    return [N] * r, [0] * r, predicted


def p1xp1_refined_ledger(r: int, n: int, dd: int, alpha: int) -> Tuple[List[int], List[int], Predicted]:
    N = _design_N(r, n, dd)
    _require_refined(r, alpha, N)
    epsilons = refined_epsilons(r, alpha)
    caps = [N - e for e in epsilons]
    k = refined_k(r, N, alpha)
    predicted = Predicted(k=k, d_lower=dd, d_upper=refined_d_upper(r, dd, alpha),
                          k_formulas={"proposicao": k, "ledger": _ledger_k(caps)})
    return caps, epsilons, predicted


def hirzebruch_coarse_ledger(r: int, n: int, dd: int, alpha: int, mh: int) -> Tuple[List[int], List[int], Predicted]:
    N = _design_N(r, n, dd)
    caps = [N + i * mh for i in range(r)]
    k = (N + 1) * r + mh * r * (r - 1) // 2
    predicted = Predicted(
        k=k,
        d_lower=dd - (r - 1) * (alpha + mh * (r + 1)),
        d_upper=math.floor(dd - (r - 1) - Fraction(mh * (r * r - 1), 2)),
        k_formulas={"fechada": k},
    )
    return caps, [0] * r, predicted


def hirzebruch_refined_ledger(r: int, n: int, dd: int, alpha: int, mh: int) -> Tuple[List[int], List[int], Predicted]:
    N = _design_N(r, n, dd)
    _require_refined(r, alpha, N)
    epsilons = refined_epsilons(r, alpha, mh)
    caps = [N + i * mh - e for i, e in enumerate(epsilons)]
    k = refined_k(r, N, alpha, mh)
    predicted = Predicted(k=k, d_lower=dd, d_upper=refined_d_upper(r, dd, alpha, mh),
                          k_formulas={"proposicao": k, "ledger": _ledger_k(caps)})
    return caps, epsilons, predicted


def legendre_ledger(n: int, d: int) -> Tuple[List[int], List[int], Predicted]:
    L = _design_N(3, n, d, name="d")
    caps = [L, L - 1, L - 1]
    k = 3 * L + 1
    return caps, [0, 1, 1], Predicted(k=k, d_lower=d, d_upper=d_opt(n, k, 3), k_formulas={"3(n-d)/4+1": k})


def _slot_u_degree(slot: int) -> int:
    # x = u², y = u: x^a ↦ u^(2a), y·x^a ↦ u^(2a+1)
    if slot == 0:
        return 0
    return slot + 1 if slot % 2 else slot - 1


def elliptic_r5_ledger(n: int, d: int) -> Tuple[List[int], List[int], Predicted]:
    u_caps, u_epsilons, predicted = cyclic_ledger(5, n, d)
    caps = [u_caps[_slot_u_degree(slot)] for slot in range(5)]
    epsilons = [u_epsilons[_slot_u_degree(slot)] for slot in range(5)]
    return caps, epsilons, predicted


def ulmer_ledger(P: int, d: int) -> Tuple[List[int], List[int], Predicted]:
    n = 2 * (P + 1) * (P - 2)
    if d > n:
        raise PreconditionViolation(f"d ≤ n violada: d={d}, n={n}")
    if d % (P + 1):
        raise DivisibilityViolation(f"(p+1) | d violada: p+1={P + 1}, d={d}")
    N0 = (n - d) // (P + 1)
    caps = [N0] + [N0 - 1 if i % 2 else N0 - 2 for i in range(1, P)]
    theorem = P * (n - d) // (P + 1) - (P - 1) // 2
    summation = _ledger_k(caps)
    predicted = Predicted(
        k=theorem,
        d_lower=d,
        d_upper=d_opt(n, theorem, P) if theorem >= 1 else None,
        k_formulas={"teorema": theorem, "soma": summation},
    )
    return caps, [N0 - cap for cap in caps], predicted


def family_ledger(spec: ConstructionSpec, n: int) -> Tuple[List[int], List[int], Predicted]:
    """Tetos por slot, ε e previsões para o comprimento n"""
    r = locality(spec)
    family = spec.family

    if family == FamilyType.BASELINE:
        return baseline_ledger(r, n // (r + 1), _required(spec, "M"), _required(spec, "N"))
    if family == FamilyType.TAMO_BARG:
        return tamo_barg_ledger(r, n // (r + 1), _required(spec, "N"))
    if family == FamilyType.ULMER:
        return ulmer_ledger(r, _required(spec, "d"))
    if family in ELLIPTIC_MODELS:
        d = _required(spec, "d")
        if family == FamilyType.ELLIPTIC_LEGENDRE:
            return legendre_ledger(n, d)
        if family == FamilyType.ELLIPTIC_R5:
            return elliptic_r5_ledger(n, d)
        return cyclic_ledger(3, n, d)

    dd = _required(spec, "dd")
    N = _design_N(r, n, dd)
    if spec.N is not None and spec.N != N:
        raise PreconditionViolation(f"N informado ({spec.N}) difere de (n − 𝔡)/(r+1) = {N}")
    if family == FamilyType.CYCLIC:
        return cyclic_ledger(r, n, dd)

    alpha = _required(spec, "alpha")
    if family == FamilyType.P1XP1:
        return p1xp1_coarse_ledger(r, n, dd, alpha)
    if family == FamilyType.P1XP1_REFINED:
        return p1xp1_refined_ledger(r, n, dd, alpha)
    if family == FamilyType.HIRZEBRUCH:
        return hirzebruch_coarse_ledger(r, n, dd, alpha, spec.mh)
    return hirzebruch_refined_ledger(r, n, dd, alpha, spec.mh)


def expected_length(spec: ConstructionSpec) -> int:
    """Comprimento n dedutível dos parâmetros, sem varrer fibras"""
    r = locality(spec)
    if spec.family == FamilyType.ULMER:
        return 2 * (r + 1) * (r - 2)
    if spec.t_values is not None:
        return len(spec.t_values) * (r + 1)
    if spec.b is not None:
        return spec.b * (r + 1)
    design = spec.dd if spec.family in DESIGN_FAMILIES else spec.d
    if design is not None and spec.N is not None:
        return design + spec.N * (r + 1)
    raise PreconditionViolation(f"comprimento indeterminado para {spec.family.value}: informe --b ou --N")


def predict(spec: ConstructionSpec, n: Optional[int] = None) -> Predicted:
    """Previsões fechadas sem construir o código"""
    return family_ledger(spec, n if n is not None else expected_length(spec))[2]


@dataclass
class ConstructionResult:
    spec: ConstructionSpec
    plan: EvaluationPlan
    code: LinearCode

    def summary(self) -> Dict:
        predicted = self.code.predicted
        return {
            "family": self.spec.family.value,
            "field": str(self.code.field),
            "n": self.code.n,
            "k": self.code.k,
            "r": self.code.r,
            "b": self.plan.b,
            "fibers": [fiber.t.enc for fiber in self.plan.fibers],
            "predicted": predicted.model_dump() if predicted else {},
        }


class ConstructionEngine:
    def __init__(self):
        self.curves = curve_service

    def build(self, spec: ConstructionSpec) -> ConstructionResult:
        """Constrói o código LR da família pedida"""
        try:
            family = spec.family
            logger.info(f"Construindo família {family.value} sobre GF({spec.p}^{spec.m})")

            if family == FamilyType.BASELINE:
                return self._baseline(spec)
            elif family == FamilyType.TAMO_BARG:
                return self._tamo_barg(spec)
            elif family in DESIGN_FAMILIES:
                return self._design_family(spec)
            elif family == FamilyType.ULMER:
                return self._ulmer(spec)
            elif family in ELLIPTIC_MODELS:
                return self._elliptic(spec)
            else:
                raise PreconditionViolation(f"Família não suportada: {family}")

        except LRCError as e:
            logger.error(f"Erro na construção {spec.family.value}: {e}")
            raise

    def _field(self, spec: ConstructionSpec) -> FieldSpec:
        return make_field(spec.p, spec.m, spec.modulus)

    def _select(self, curve: FiberedCurveSpec, spec: ConstructionSpec, b: Optional[int]) -> List[Fiber]:
        """Primeiras b fibras válidas em ordem de enc(t), ou as fibras de t_values"""
        if spec.t_values is not None:
            fibers = [self.curves.fiber_at(curve, curve.field.element(t)) for t in spec.t_values]
        else:
            fibers = self.curves.split_fibers(curve, max_fibers=b)

        if not fibers:
            raise NotEnoughFibers(f"nenhuma fibra válida em {curve.field} para {curve.describe()}")
        if b is not None and len(fibers) < b:
            raise NotEnoughFibers(f"pedidas b={b} fibras, disponíveis {len(fibers)} em {curve.field}")
        return fibers

    def _finish(self, spec: ConstructionSpec, field: FieldSpec, r: int, fibers: Sequence[Fiber]) -> ConstructionResult:
        n = len(fibers) * (r + 1)
        caps, epsilons, predicted = family_ledger(spec, n)
        plan = EvaluationPlan(field, r, tuple(fibers), FunctionBasis.from_caps(caps, epsilons))
        code = build_code(plan, family=spec.family.value,
                          params=spec.model_dump(mode="json", exclude_none=True), predicted=predicted)
        return ConstructionResult(spec, plan, code)

    def _baseline(self, spec: ConstructionSpec) -> ConstructionResult:
        """Superfície A^(r-1) × A^1 com V[M,N]"""
        field = self._field(spec)
        r = locality(spec)
        b = len(spec.t_values) if spec.t_values is not None else _required(spec, "b")
        if b > field.q:
            raise NotEnoughFibers(f"b={b} fibras exigem q ≥ b, mas q={field.q}")

        ts = spec.t_values if spec.t_values is not None else range(b)
        fibers = self._baseline_fibers(spec, field, r, [field.element(t) for t in ts])
        try:
            return self._finish(spec, field, r, fibers)
        except SingularLocalMatrix as e:
            raise GeneralPositionFailure(f"r pontos num hiperplano: {e}") from e

    def _baseline_fibers(self, spec: ConstructionSpec, field: FieldSpec, r: int,
                         ts: List[FieldElement]) -> List[Fiber]:
        if spec.point_source == PointSource.RATIONAL_NORMAL:
            if field.q < r + 1:
                raise GeneralPositionFailure(f"q={field.q} < r+1={r + 1}: faltam valores distintos de x")
            # Curva normal racional: x ↦ (x, x², ..., x^(r-1))
            xs = enumerate_field(field)[:r + 1]
            points = tuple(FiberPoint(u=x, coords=tuple(x ** i for i in range(1, r)), x=x) for x in xs)
            return [Fiber(t, points) for t in ts]

        # Amostragem por rejeição com semente
        rng = np.random.default_rng(spec.seed)
        fibers = []
        for t in ts:
            for _ in range(MAX_SAMPLING_ATTEMPTS):
                coords = rng.integers(0, field.q, size=(r + 1, r - 1))
                rows = field.array(np.hstack([np.ones((r + 1, 1), dtype=np.int64), coords]))
                if all(rank(rows[list(subset)]) == r for subset in itertools.combinations(range(r + 1), r)):
                    break
            else:
                raise GeneralPositionFailure(f"sem pontos em posição geral na fibra t={t.enc} "
                                             f"após {MAX_SAMPLING_ATTEMPTS} tentativas")
            points = tuple(
                FiberPoint(u=None, coords=tuple(field.element(int(c)) for c in row), x=field.element(int(row[0])))
                for row in coords
            )
            fibers.append(Fiber(t, points))
        return fibers

    def _tamo_barg(self, spec: ConstructionSpec) -> ConstructionResult:
        """Fibras de g(x) = t com pontos (x, x², ..., x^(r-1); t)"""
        field = self._field(spec)
        r = locality(spec)
        N = _required(spec, "N")
        if spec.M is not None and spec.M != N:
            raise PreconditionViolation(f"M = N violada: M={spec.M}, N={N}")
        b = None if spec.t_values is not None else _required(spec, "b")

        curve = FiberedCurveSpec(CurveKind.GRAPH_OF_G, field, r, g=tuple(spec.g) if spec.g else None)
        return self._finish(spec, field, r, self._select(curve, spec, b))

    def _design_b(self, spec: ConstructionSpec, r: int) -> Optional[int]:
        if spec.b is not None:
            return spec.b
        if spec.N is not None:
            total = spec.dd + spec.N * (r + 1)
            if total % (r + 1):
                raise DivisibilityViolation(f"(r+1) | (𝔡 + N(r+1)) violada: r+1={r + 1}, 𝔡={spec.dd}")
            return total // (r + 1)
        return None

    def _curve_forms(self, spec: ConstructionSpec, field: FieldSpec, alpha: int) -> Optional[Tuple[HomogForm, ...]]:
        if spec.g_forms is None:
            return None
        if spec.family not in (FamilyType.P1XP1, FamilyType.HIRZEBRUCH):
            raise PreconditionViolation("curvas bi-homogêneas próprias só nas famílias grossas")
        return tuple(HomogForm(field, alpha + i * spec.mh, tuple(coeffs)) for i, coeffs in enumerate(spec.g_forms))

    def _design_family(self, spec: ConstructionSpec) -> ConstructionResult:
        """Famílias com distância de projeto 𝔡: recobrimento cíclico, P¹×P¹ e Hirzebruch"""
        field = self._field(spec)
        r = locality(spec)
        _required(spec, "dd")

        if spec.family == FamilyType.CYCLIC:
            alpha = spec.alpha if spec.alpha is not None else 2
            curve = FiberedCurveSpec(CurveKind.CYCLIC_COVER, field, r, alpha=alpha, c=spec.c)
        else:
            alpha = _required(spec, "alpha")
            hirzebruch = spec.family in (FamilyType.HIRZEBRUCH, FamilyType.HIRZEBRUCH_REFINED)
            curve = FiberedCurveSpec(
                CurveKind.HIRZEBRUCH_CURVE if hirzebruch else CurveKind.P1XP1_CURVE,
                field, r, alpha=alpha, m_h=spec.mh if hirzebruch else 0, c=spec.c,
                forms=self._curve_forms(spec, field, alpha),
            )

        fibers = self._select(curve, spec, self._design_b(spec, r))
        return self._finish(spec, field, r, fibers)

    def _elliptic(self, spec: ConstructionSpec) -> ConstructionResult:
        """Multisseções de superfícies elípticas (Legendre, x = y², y² + xy = x³ + t² + 2)"""
        field = self._field(spec)
        model, r = ELLIPTIC_MODELS[spec.family]
        locality(spec)
        _required(spec, "d")
        curve = FiberedCurveSpec(CurveKind.ELLIPTIC_MULTISECTION, field, r, model=model)
        return self._finish(spec, field, r, self._select(curve, spec, spec.b))

    def _ulmer(self, spec: ConstructionSpec) -> ConstructionResult:
        """y² = x(x+1)(x+t²+1) sobre GF(P²), P = p^m"""
        if spec.p == 2:
            raise PreconditionViolation("P ímpar violada: p=2")
        P = locality(spec)
        _required(spec, "d")
        field = make_field(spec.p, 2 * spec.m)
        curve = FiberedCurveSpec(CurveKind.ELLIPTIC_MULTISECTION, field, P, model=EllipticModel.ULMER)
        fibers = self._select(curve, spec, None)

        expected = 2 * (P + 1) * (P - 2)
        if spec.t_values is None and len(fibers) * (P + 1) != expected:
            raise NotEnoughFibers(f"esperados {expected} pontos, encontrados {len(fibers) * (P + 1)}")
        return self._finish(spec, field, P, fibers)


# Instância global
construction_engine = ConstructionEngine()
