import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Type, Union

import galois
import numpy as np

from errors import DegreeMismatch, DivisionByZero, FieldError, FieldMismatch, NonPrime, ReducibleModulus

logger = logging.getLogger(__name__)

MAX_FIELD_ORDER = 2 ** 16


@lru_cache(maxsize=None)
def _galois_class(p: int, m: int, modulus: Tuple[int, ...]) -> Type[galois.FieldArray]:
    # A representação inteira do galois coincide com enc(e) = Σ c_j p^j
    if m == 1:
        return galois.GF(p)
    irreducible = galois.Poly(list(modulus), field=galois.GF(p), order="asc")
    return galois.GF(p ** m, irreducible_poly=irreducible)


@dataclass(frozen=True)
class FieldSpec:
    p: int
    m: int
    modulus: Tuple[int, ...] = ()

    @property
    def q(self) -> int:
        return self.p ** self.m

    @property
    def gf(self) -> Type[galois.FieldArray]:
        """Classe FieldArray do galois para este corpo"""
        return _galois_class(self.p, self.m, self.modulus)

    @property
    def elements(self) -> galois.FieldArray:
        return self.gf.elements

    def element(self, value: Union[int, "FieldElement"]) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatch(f"elemento de {value.field} usado em {self}")
            return value
        return FieldElement(self, int(value))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def to_ints(self, values):
        """Converte (listas aninhadas de) elementos para inteiros enc"""
        if isinstance(values, FieldElement):
            return self.element(values).enc
        if isinstance(values, np.ndarray):
            return values.view(np.ndarray).astype(np.int64).tolist()
        if isinstance(values, (list, tuple)):
            return [self.to_ints(value) for value in values]
        return int(values)

    def array(self, values) -> galois.FieldArray:
        ints = np.asarray(self.to_ints(values), dtype=np.int64)
        if ints.size and (ints.min() < 0 or ints.max() >= self.q):
            raise FieldError(f"inteiro fora de [0, {self.q}) para {self}")
        return self.gf(ints)

    def __str__(self) -> str:
        return f"GF({self.q})"


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    enc: int

    def __post_init__(self):
        if not 0 <= self.enc < self.field.q:
            raise FieldError(f"enc={self.enc} fora de [0, {self.field.q}) em {self.field}")

    @property
    def coeffs(self) -> Tuple[int, ...]:
        digits = []
        value = self.enc
        for _ in range(self.field.m):
            value, digit = divmod(value, self.field.p)
            digits.append(digit)
        return tuple(digits)

    @property
    def value(self) -> galois.FieldArray:
        return self.field.gf(self.enc)

    def _coerce(self, other) -> Optional["FieldElement"]:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"operação entre {self.field} e {other.field}")
            return other
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            # Inteiros entram pelo subcorpo primo
            return FieldElement(self.field, int(other) % self.field.p)
        return None

    def _wrap(self, value) -> "FieldElement":
        return FieldElement(self.field, int(value))

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._wrap(self.value + other.value)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._wrap(self.value - other.value)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._wrap(self.value * other.value)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inv()

    def __neg__(self) -> "FieldElement":
        return self._wrap(-self.value)

    def __pow__(self, exponent: int) -> "FieldElement":
        if exponent < 0:
            return self.inv() ** (-exponent)
        if exponent == 0:
            return self.field.one
        return self._wrap(self.value ** exponent)

    def inv(self) -> "FieldElement":
        """Inverso multiplicativo"""
        if self.enc == 0:
            raise DivisionByZero(f"inverso de 0 em {self.field}")
        return self._wrap(self.field.gf(1) / self.value)

    def __bool__(self) -> bool:
        return self.enc != 0

    def __int__(self) -> int:
        return self.enc

    def __repr__(self) -> str:
        return f"{self.field}[{self.enc}]"


def _is_irreducible(p: int, coeffs: Sequence[int]) -> bool:
    return galois.Poly(list(coeffs), field=galois.GF(p), order="asc").is_irreducible()


def default_modulus(p: int, m: int) -> Tuple[int, ...]:
    """Menor mônico irredutível de grau m na ordem lexicográfica (c_0, c_1, ...)"""
    for head in itertools.product(range(p), repeat=m):
        if head[0] == 0:
            continue
        candidate = head + (1,)
        if _is_irreducible(p, candidate):
            return candidate
    raise ReducibleModulus(f"nenhum irredutível de grau {m} sobre GF({p})")


def make_field(p: int, m: int = 1, modulus: Optional[Sequence[int]] = None) -> FieldSpec:
    """Valida e cria GF(p^m)"""
    if p < 2 or not galois.is_prime(p):
        raise NonPrime(p)
    if m < 1:
        raise DegreeMismatch(f"grau de extensão m={m} deve ser ≥ 1")
    if p ** m > MAX_FIELD_ORDER:
        raise FieldError(f"corpos com q > 2^16 não são suportados (q={p ** m})")

    if m == 1:
        return FieldSpec(p, 1, ())

    if modulus is None:
        chosen = default_modulus(p, m)
        logger.debug(f"Módulo padrão para GF({p}^{m}): {list(chosen)}")
    else:
        chosen = tuple(int(c) for c in modulus)
        if len(chosen) != m + 1:
            raise DegreeMismatch(f"módulo com {len(chosen)} coeficientes, esperado {m + 1}")
        if chosen[-1] != 1:
            raise DegreeMismatch("módulo deve ser mônico")
        if any(c < 0 or c >= p for c in chosen):
            raise FieldError(f"coeficientes do módulo devem estar em [0, {p})")
        if not _is_irreducible(p, chosen):
            raise ReducibleModulus(f"{list(chosen)} é redutível sobre GF({p})")

    return FieldSpec(p, m, chosen)


def enumerate_field(field: FieldSpec) -> List[FieldElement]:
    """Todos os elementos em ordem crescente de enc"""
    return [FieldElement(field, value) for value in range(field.q)]


@lru_cache(maxsize=256)
def _power_table(field: FieldSpec, n: int) -> np.ndarray:
    return (field.elements ** n).view(np.ndarray).copy()


def nth_roots(field: FieldSpec, n: int, c: FieldElement) -> List[FieldElement]:
    """Todas as soluções de x^n = c, por enumeração completa"""
    if n < 1:
        raise FieldError(f"n={n} deve ser ≥ 1")
    c = field.element(c)
    hits = np.flatnonzero(_power_table(field, n) == c.enc)
    return [FieldElement(field, int(x)) for x in hits]
