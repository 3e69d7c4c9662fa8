import json
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import galois
import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from curve_service import Fiber
from errors import (EmptyBasis, FieldError, NoFibers, ParseError, PreconditionViolation,
                    RecoveryIdentityViolation, SingularLocalMatrix, SingularMatrix)
from galois_field import FieldElement, FieldSpec, make_field
from poly_algebra import invert, rank, rref, stack_columns

logger = logging.getLogger(__name__)


class Monomial(NamedTuple):
    slot: int       # função de fibra x_slot, com x_0 = 1
    t_degree: int


@dataclass(frozen=True)
class FunctionBasis:
    monomials: Tuple[Monomial, ...]
    caps: Tuple[int, ...] = ()
    epsilons: Tuple[int, ...] = ()

    @classmethod
    def from_caps(cls, caps: Sequence[int], epsilons: Sequence[int] = ()) -> "FunctionBasis":
        """t^j·x_slot para j ≤ cap[slot]; teto negativo deixa o slot vazio"""
        monomials = tuple(Monomial(slot, j) for slot, cap in enumerate(caps) for j in range(cap + 1))
        return cls(monomials, tuple(caps), tuple(epsilons))

    def __len__(self) -> int:
        return len(self.monomials)


@dataclass(frozen=True)
class EvaluationPlan:
    field: FieldSpec
    r: int
    fibers: Tuple[Fiber, ...]
    basis: FunctionBasis

    def __post_init__(self):
        for index, fiber in enumerate(self.fibers):
            if len(fiber) != self.r + 1:
                raise PreconditionViolation(f"fibra {index} tem {len(fiber)} pontos, esperado r+1 = {self.r + 1}")
        for monomial in self.basis.monomials:
            if not 0 <= monomial.slot < self.r:
                raise PreconditionViolation(f"slot {monomial.slot} fora de [0, r) com r={self.r}")

    @property
    def b(self) -> int:
        return len(self.fibers)

    @property
    def n(self) -> int:
        return self.b * (self.r + 1)

    def coordinate(self, index: int) -> Tuple[int, int]:
        """Índice global -> (fibra, ponto)"""
        return divmod(index, self.r + 1)

    def index(self, fiber: int, point: int) -> int:
        return fiber * (self.r + 1) + point

    def fiber_indices(self, fiber: int) -> List[int]:
        return [self.index(fiber, j) for j in range(self.r + 1)]

    @cached_property
    def local_rows(self) -> galois.FieldArray:
        """Linha (1, x_1, ..., x_{r-1}) de cada coordenada"""
        rows = [[1] + [c.enc for c in point.coords] for fiber in self.fibers for point in fiber.points]
        return self.field.array(rows)

    @cached_property
    def t_column(self) -> galois.FieldArray:
        return self.field.array([fiber.t.enc for fiber in self.fibers for _ in fiber.points])

    def evaluation_matrix(self) -> galois.FieldArray:
        """Uma linha por monômio da base, uma coluna por ponto"""
        gf = self.field.gf
        max_degree = max((m.t_degree for m in self.basis.monomials), default=0)
        powers = [gf.Ones(self.n)]
        for _ in range(max_degree):
            powers.append(powers[-1] * self.t_column)
        rows = [powers[m.t_degree] * self.local_rows[:, m.slot] for m in self.basis.monomials]
        return stack_columns(self.field, rows).T


class Predicted(BaseModel):
    d_lower: Optional[int] = None
    d_upper: Optional[int] = None
    d_opt: Optional[int] = None
    k: Optional[int] = None
    dim_v: Optional[int] = None
    k_formulas: Dict[str, int] = {}
    notes: List[str] = []


@dataclass(eq=False)
class LinearCode:
    field: FieldSpec
    n: int
    k: int
    r: int
    generator: galois.FieldArray
    recovery_sets: np.ndarray
    recovery_weights: galois.FieldArray
    family: str = "custom"
    params: Optional[Dict[str, Any]] = None
    predicted: Optional[Predicted] = None

    def encode(self, message) -> galois.FieldArray:
        return self.field.array(message) @ self.generator

    def fibers(self) -> List[List[int]]:
        """Grupos {i} ∪ J_i, na ordem da primeira coordenada"""
        seen = set()
        groups = []
        for i in range(self.n):
            group = sorted({i, *(int(j) for j in self.recovery_sets[i])})
            if group[0] not in seen:
                seen.add(group[0])
                groups.append(group)
        return groups


def d_opt(n: int, k: int, r: int) -> int:
    """n - k - ⌈k/r⌉ + 2"""
    if min(n, k, r) < 1:
        raise PreconditionViolation(f"d_opt exige n, k, r ≥ 1 (n={n}, k={k}, r={r})")
    return n - k - (-(-k // r)) + 2


def compute_recovery(plan: EvaluationPlan, i: int) -> Tuple[List[int], galois.FieldArray]:
    """J_i e pesos λ com c_i = Σ λ_j c_{J_i[j]}"""
    fiber, point = plan.coordinate(i)
    others = [plan.index(fiber, j) for j in range(plan.r + 1) if j != point]
    local = plan.local_rows[others]
    try:
        inverse = invert(local)
    except SingularMatrix:
        t = plan.fibers[fiber].t
        raise SingularLocalMatrix(
            f"matriz local singular na fibra {fiber} (t={t.enc}) ao recuperar a coordenada {i}",
            fiber=fiber, coordinate=i)
    weights = plan.local_rows[i] @ inverse
    return others, weights


def recover_all(words: galois.FieldArray, recovery_sets: np.ndarray, weights: galois.FieldArray) -> galois.FieldArray:
    return np.add.reduce(words[:, recovery_sets] * weights, axis=-1)


def build_code(plan: EvaluationPlan, family: str = "custom", params: Optional[Dict[str, Any]] = None,
               predicted: Optional[Predicted] = None) -> LinearCode:
    """Código de avaliação da base do plano nos pontos do plano"""
    if not plan.fibers:
        raise NoFibers("plano sem fibras")
    if len(plan.basis) == 0:
        raise EmptyBasis("base de funções vazia")

    evaluation = plan.evaluation_matrix()
    k = rank(evaluation)
    generator = rref(evaluation)[:k]

    sets = []
    weights = []
    for i in range(plan.n):
        others, lam = compute_recovery(plan, i)
        sets.append(others)
        weights.append(lam)
    recovery_sets = np.array(sets, dtype=np.int64)
    recovery_weights = plan.field.gf(np.stack([w.view(np.ndarray) for w in weights]))

    # Identidade de recuperação em todas as linhas geradoras
    mismatch = recover_all(generator, recovery_sets, recovery_weights) != generator
    if np.any(mismatch):
        row, i = np.argwhere(mismatch)[0]
        raise RecoveryIdentityViolation(f"linha {row} do gerador não se recupera na coordenada {i}")

    predicted = (predicted or Predicted()).model_copy(deep=True)
    predicted.dim_v = len(plan.basis)
    predicted.d_opt = d_opt(plan.n, k, plan.r)
    if k < len(plan.basis):
        message = f"avaliação não injetiva: rank {k} < dim V = {len(plan.basis)}"
        logger.warning(message)
        predicted.notes.append(message)
    if predicted.k is not None and predicted.k != k:
        predicted.notes.append(f"k medido {k} difere do k previsto {predicted.k}")
    if len(set(predicted.k_formulas.values())) > 1:
        formulas = ", ".join(f"{name}={value}" for name, value in predicted.k_formulas.items())
        predicted.notes.append(f"fórmulas de k divergem ({formulas}); rank medido = {k}")

    logger.info(f"Código {family} construído: n={plan.n}, k={k}, r={plan.r}, {plan.field}")
    return LinearCode(plan.field, plan.n, k, plan.r, generator, recovery_sets, recovery_weights,
                      family, params or {}, predicted)


def recover(code: LinearCode, word: Sequence[Optional[Union[int, FieldElement]]], i: int) -> FieldElement:
    """Σ λ_j word[J_i[j]]; lixo na entrada dá lixo na saída"""
    if len(word) != code.n:
        raise PreconditionViolation(f"palavra com {len(word)} símbolos, esperado n = {code.n}")
    if not 0 <= i < code.n:
        raise PreconditionViolation(f"coordenada {i} fora de [0, {code.n})")
    known = [word[int(j)] for j in code.recovery_sets[i]]
    if any(symbol is None for symbol in known):
        raise PreconditionViolation(f"conjunto de recuperação de {i} contém apagamentos")
    value = np.add.reduce(code.field.array(known) * code.recovery_weights[i])
    return code.field.element(int(value))


class ParamReport(BaseModel):
    family: str
    n: int
    r: int
    k_predicted: Optional[int] = None
    k_measured: int
    dim_v: Optional[int] = None
    d_lower_predicted: Optional[int] = None
    d_upper_predicted: Optional[int] = None
    d_opt: int
    d_measured: Optional[int] = None
    d_display: str = "-"
    optimal: Optional[bool] = None
    verdict: str = "UNKNOWN"
    oracle_mode: str = "none"
    k_formulas: Dict[str, int] = {}
    notes: List[str] = []


def make_report(code: LinearCode, d_measured: Optional[int] = None, oracle_mode: str = "none") -> ParamReport:
    """Previsto vs medido; oracle_mode: none, exact, witness ou sampled"""
    predicted = code.predicted or Predicted()
    optimum = d_opt(code.n, code.k, code.r)

    exact = oracle_mode == "exact"
    if oracle_mode == "exact" and d_measured == optimum:
        verdict = "OPTIMAL"
    elif d_measured is not None and d_measured < optimum:
        verdict = "NOT-OPTIMAL"
    elif predicted.d_lower is not None and predicted.d_lower >= optimum:
        verdict = "OPTIMAL-by-bounds"
    else:
        verdict = "UNKNOWN"

    if d_measured is None:
        display = "-"
    elif oracle_mode == "sampled":
        display = f"≤ {d_measured} (sampled)"
    elif oracle_mode == "witness":
        # peso da testemunha; a cota inferior vem da fórmula, não do oráculo
        display = f"{d_measured} (witness)"
    else:
        display = str(d_measured)

    return ParamReport(
        family=code.family,
        n=code.n,
        r=code.r,
        k_predicted=predicted.k,
        k_measured=code.k,
        dim_v=predicted.dim_v,
        d_lower_predicted=predicted.d_lower,
        d_upper_predicted=predicted.d_upper,
        d_opt=optimum,
        d_measured=d_measured,
        d_display=display,
        optimal=(d_measured == optimum) if exact and d_measured is not None else None,
        verdict=verdict,
        oracle_mode=oracle_mode,
        k_formulas=dict(predicted.k_formulas),
        notes=list(predicted.notes),
    )


# Arquivo de código (JSON)

class FieldModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    p: int
    m: int
    modulus: List[int]


class CodeFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    field: FieldModel
    n: int
    k: int
    r: int
    family: str
    params: Dict[str, Any]
    generator: List[List[int]]
    recovery_sets: List[List[int]]
    recovery_weights: List[List[int]]
    predicted: Predicted


def serialize(code: LinearCode) -> str:
    document = CodeFile(
        field=FieldModel(p=code.field.p, m=code.field.m, modulus=list(code.field.modulus)),
        n=code.n,
        k=code.k,
        r=code.r,
        family=code.family,
        params=code.params or {},
        generator=code.generator.view(np.ndarray).tolist(),
        recovery_sets=code.recovery_sets.tolist(),
        recovery_weights=code.recovery_weights.view(np.ndarray).tolist(),
        predicted=code.predicted or Predicted(),
    )
    return document.model_dump_json(indent=2) + "\n"


def _check_matrix(name: str, rows: List[List[int]], shape: Tuple[int, int], upper: int):
    if len(rows) != shape[0]:
        raise ParseError(f"esperadas {shape[0]} linhas, encontradas {len(rows)}", field=name)
    for index, row in enumerate(rows):
        if len(row) != shape[1]:
            raise ParseError(f"esperadas {shape[1]} entradas, encontradas {len(row)}", field=f"{name}.{index}")
        for column, value in enumerate(row):
            if not 0 <= value < upper:
                raise ParseError(f"valor {value} fora de [0, {upper})", field=f"{name}.{index}.{column}")


def deserialize(text: str) -> LinearCode:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno, column=e.colno)

    try:
        document = CodeFile.model_validate(raw)
    except ValidationError as e:
        error = e.errors()[0]
        raise ParseError(error["msg"], field=".".join(str(part) for part in error["loc"]))

    try:
        field = make_field(document.field.p, document.field.m, document.field.modulus or None)
    except FieldError as e:
        raise ParseError(str(e), field="field")

    n, k, r = document.n, document.k, document.r
    if k < 1 or r < 1 or n < r + 1:
        raise ParseError(f"parâmetros inconsistentes n={n}, k={k}, r={r}", field="n")
    _check_matrix("generator", document.generator, (k, n), field.q)
    _check_matrix("recovery_sets", document.recovery_sets, (n, r), n)
    _check_matrix("recovery_weights", document.recovery_weights, (n, r), field.q)
    for i, row in enumerate(document.recovery_sets):
        if i in row or len(set(row)) != r:
            raise ParseError(f"J_{i} deve ter {r} índices distintos sem {i}", field=f"recovery_sets.{i}")
    # {i} ∪ J_i precisa ser o mesmo grupo para todos os seus membros
    groups = [frozenset(row) | {i} for i, row in enumerate(document.recovery_sets)]
    for i, group in enumerate(groups):
        for j in group:
            if groups[j] != group:
                raise ParseError(f"J_{i} e J_{j} não formam uma partição em grupos de {r + 1}",
                                 field=f"recovery_sets.{i}")

    return LinearCode(
        field=field,
        n=n,
        k=k,
        r=r,
        generator=field.array(document.generator),
        recovery_sets=np.array(document.recovery_sets, dtype=np.int64),
        recovery_weights=field.array(document.recovery_weights),
        family=document.family,
        params=document.params,
        predicted=document.predicted,
    )
