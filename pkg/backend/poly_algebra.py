import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import galois
import numpy as np

from errors import DegreeMismatch, FieldMismatch, SingularMatrix
from galois_field import FieldElement, FieldSpec

logger = logging.getLogger(__name__)


# Polinômios univariados (galois.Poly, coeficientes do menor grau para o maior)

def uni_poly(field: FieldSpec, coeffs: Sequence[Union[int, FieldElement]]) -> galois.Poly:
    ints = field.to_ints(list(coeffs))
    if not ints:
        return galois.Poly.Zero(field=field.gf)
    return galois.Poly(ints, field=field.gf, order="asc")


def is_zero_poly(f: galois.Poly) -> bool:
    return not np.count_nonzero(f.coeffs.view(np.ndarray))


def poly_degree(f: galois.Poly) -> Union[int, float]:
    """Grau, com -inf para o polinômio nulo"""
    return -math.inf if is_zero_poly(f) else int(f.degree)


def poly_coeffs(f: galois.Poly) -> Tuple[int, ...]:
    """Coeficientes do menor grau para o maior, sem zeros à direita"""
    if is_zero_poly(f):
        return ()
    return tuple(int(c) for c in f.coefficients(order="asc"))


def poly_eval(f: galois.Poly, t: FieldElement) -> FieldElement:
    if f.field is not t.field.gf:
        raise FieldMismatch(f"polinômio sobre {f.field.name} avaliado em {t.field}")
    return t.field.element(int(f(t.value)))


def roots_product(field: FieldSpec, roots: Sequence[FieldElement]) -> galois.Poly:
    """Π (t - t_i)"""
    if not roots:
        return galois.Poly.One(field=field.gf)
    return galois.Poly.Roots(field.array(list(roots)), field=field.gf)


@dataclass(frozen=True)
class HomogForm:
    """Forma homogênea de grau d em (t, u); coeffs[j] multiplica t^j u^(d-j)"""
    field: FieldSpec
    degree: int
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if self.degree < 0 or len(self.coeffs) != self.degree + 1:
            raise DegreeMismatch(f"forma de grau {self.degree} exige {self.degree + 1} coeficientes, "
                                 f"recebidos {len(self.coeffs)}")

    @classmethod
    def from_terms(cls, field: FieldSpec, degree: int, terms: dict) -> "HomogForm":
        coeffs = [0] * (degree + 1)
        for j, value in terms.items():
            # Inteiros (inclusive negativos) entram pelo subcorpo primo
            coeffs[j] = (field.one * value).enc
        return cls(field, degree, tuple(coeffs))

    def evaluate(self, t: FieldElement, u: FieldElement) -> FieldElement:
        total = self.field.zero
        for j, c in enumerate(self.coeffs):
            if c:
                total = total + self.field.element(c) * t ** j * u ** (self.degree - j)
        return total

    def dehomogenize(self) -> galois.Poly:
        return uni_poly(self.field, self.coeffs)

    def evaluate_affine(self, ts: galois.FieldArray) -> galois.FieldArray:
        """Avaliação vetorizada em (t:1)"""
        return self.dehomogenize()(ts)


# Matrizes densas sobre GF(q) (FieldArray 2-D)

def to_matrix(field: FieldSpec, rows) -> galois.FieldArray:
    matrix = field.array(rows)
    if matrix.ndim != 2:
        raise DegreeMismatch(f"matriz deve ser 2-D, recebida forma {matrix.shape}")
    return matrix


def rank(matrix: galois.FieldArray) -> int:
    if matrix.size == 0:
        return 0
    return int(np.linalg.matrix_rank(matrix))


def rref(matrix: galois.FieldArray) -> galois.FieldArray:
    """Forma escalonada reduzida determinística"""
    return matrix.row_reduce()


def _require_nonsingular(matrix: galois.FieldArray):
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise SingularMatrix(f"matriz {matrix.shape} não é quadrada")
    if rank(matrix) < matrix.shape[0]:
        raise SingularMatrix(f"matriz {matrix.shape[0]}x{matrix.shape[1]} singular")


def invert(matrix: galois.FieldArray) -> galois.FieldArray:
    _require_nonsingular(matrix)
    return np.linalg.inv(matrix)


def solve(matrix: galois.FieldArray, vector: galois.FieldArray) -> galois.FieldArray:
    if type(matrix) is not type(vector):
        raise FieldMismatch("matriz e vetor em corpos diferentes")
    _require_nonsingular(matrix)
    return np.linalg.solve(matrix, vector)


def vandermonde(nodes: Sequence[FieldElement], width: int) -> galois.FieldArray:
    """Linha i = (1, x_i, ..., x_i^(width-1))"""
    if width < 1:
        raise DegreeMismatch(f"largura {width} deve ser ≥ 1")
    if not nodes:
        raise DegreeMismatch("vandermonde exige ao menos um nó")
    field = nodes[0].field
    xs = field.array(list(nodes))
    columns = [field.gf.Ones(len(nodes))]
    for _ in range(1, width):
        columns.append(columns[-1] * xs)
    return stack_columns(field, columns)


def stack_rows(field: FieldSpec, blocks) -> galois.FieldArray:
    parts = [np.atleast_2d(block.view(np.ndarray)) for block in blocks]
    return field.gf(np.concatenate(parts, axis=0))


def stack_columns(field: FieldSpec, columns) -> galois.FieldArray:
    return field.gf(np.stack([column.view(np.ndarray) for column in columns], axis=1))


def same_row_space(a: galois.FieldArray, b: galois.FieldArray) -> bool:
    if type(a) is not type(b) or a.shape[1] != b.shape[1]:
        return False
    field_class = type(a)
    stacked = field_class(np.concatenate((a.view(np.ndarray), b.view(np.ndarray)), axis=0))
    joint = rank(stacked)
    return joint == rank(a) == rank(b)
