from typing import Optional


class LRCError(Exception):
    """Erro base do toolkit de códigos LR"""


# Corpos finitos
class FieldError(LRCError, ValueError):
    pass


class NonPrime(FieldError):
    def __init__(self, p: int):
        super().__init__(f"p={p} não é primo")
        self.p = p


class ReducibleModulus(FieldError):
    pass


class DegreeMismatch(FieldError):
    pass


class DivisionByZero(FieldError, ZeroDivisionError):
    pass


class FieldMismatch(FieldError):
    pass


# Álgebra linear
class SingularMatrix(LRCError, ValueError):
    pass


class SingularLocalMatrix(SingularMatrix):
    """Matriz local de recuperação não invertível numa fibra"""

    def __init__(self, message: str, fiber: Optional[int] = None, coordinate: Optional[int] = None):
        super().__init__(message)
        self.fiber = fiber
        self.coordinate = coordinate


# Curvas
class PointNotOnCurve(LRCError, ValueError):
    pass


class GammaCheckFailure(LRCError):
    pass


# Construções
class EmptyBasis(LRCError, ValueError):
    pass


class NoFibers(LRCError, ValueError):
    pass


class NotEnoughFibers(LRCError, ValueError):
    pass


class GeneralPositionFailure(LRCError, ValueError):
    pass


class PreconditionViolation(LRCError, ValueError):
    pass


class DivisibilityViolation(PreconditionViolation):
    pass


class RecoveryIdentityViolation(LRCError):
    pass


# Serialização
class ParseError(LRCError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None,
                 field: Optional[str] = None):
        location = []
        if line is not None:
            location.append(f"linha {line}, coluna {column}")
        if field:
            location.append(f"campo '{field}'")
        prefix = f"[{'; '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")
        self.line = line
        self.column = column
        self.field = field


# Oráculos
class BudgetExceeded(LRCError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeração exige {required} avaliações de peso, orçamento é {budget}")
        self.required = required
        self.budget = budget


class ClassificationMismatch(LRCError):
    pass
