import itertools
import logging
from typing import Dict, Iterator, List, Optional

import galois
import numpy as np
import pandas as pd
from pydantic import BaseModel

from config import DEFAULT_BUDGET
from construction_engine import baseline_ledger
from errors import BudgetExceeded, ClassificationMismatch
from lr_code import EvaluationPlan, LinearCode, ParamReport, d_opt, make_report, recover_all
from poly_algebra import rank, roots_product, rref, same_row_space

logger = logging.getLogger(__name__)

ENUMERATION_CHUNK = 1 << 16
MAX_PARTITION_CANDIDATES = 64


class RecoveryReport(BaseModel):
    ok: bool
    checked_rows: int
    partition_ok: bool
    failures: List[Dict[str, int]] = []


class VerificationResult(BaseModel):
    report: ParamReport
    recovery: RecoveryReport
    violations: List[str] = []

    @property
    def passed(self) -> bool:
        return not self.violations


def _message_block(q: int, width: int, start: int, stop: int) -> np.ndarray:
    """Mensagens start..stop-1 em ordem lexicográfica de enc"""
    indices = np.arange(start, stop, dtype=np.int64)
    powers = q ** np.arange(width - 1, -1, -1, dtype=np.int64)
    return (indices[:, np.newaxis] // powers) % q


def _weights(words: galois.FieldArray) -> np.ndarray:
    return np.count_nonzero(words.view(np.ndarray), axis=-1)


def _full_rank_generator(code: LinearCode) -> galois.FieldArray:
    reduced = rref(code.generator)
    return reduced[:rank(reduced)]


class OracleEngine:
    @staticmethod
    def enumeration_cost(code: LinearCode, dedup: bool = True) -> int:
        """Avaliações de peso que exact_distance faria"""
        q = code.field.q
        leads = 1 if dedup else q - 1
        return leads * (q ** code.k - 1) // (q - 1)

    @staticmethod
    def exact_distance(code: LinearCode, budget: int = DEFAULT_BUDGET, dedup: bool = True) -> int:
        """Peso mínimo por enumeração de todas as mensagens não nulas"""
        q = code.field.q
        generator = _full_rank_generator(code)
        k = generator.shape[0]
        leads = 1 if dedup else q - 1
        required = leads * (q ** k - 1) // (q - 1)
        if required > budget:
            raise BudgetExceeded(required, budget)

        gf = code.field.gf
        best = code.n
        # Mensagens agrupadas pela posição do primeiro símbolo não nulo
        for position in range(k):
            rest = generator[position + 1:]
            width = k - position - 1
            total = q ** width
            for lead in range(1, leads + 1):
                head = gf(lead) * generator[position]
                if width == 0:
                    best = min(best, int(_weights(head)))
                    continue
                for start in range(0, total, ENUMERATION_CHUNK):
                    stop = min(start + ENUMERATION_CHUNK, total)
                    words = gf(_message_block(q, width, start, stop)) @ rest + head
                    best = min(best, int(_weights(words).min()))

        logger.info(f"Distância exata: d={best} ({required} palavras avaliadas)")
        return best

    @staticmethod
    def sampled_distance_upper(code: LinearCode, samples: int = 2000, seed: int = 0) -> int:
        """Cota superior: linhas geradoras mais palavras aleatórias com semente"""
        weights = _weights(code.generator)
        best = int(weights[weights > 0].min()) if np.any(weights > 0) else code.n

        if samples > 0:
            rng = np.random.default_rng(seed)
            messages = rng.integers(0, code.field.q, size=(samples, code.k))
            messages = messages[np.any(messages != 0, axis=1)]
            if len(messages):
                sampled = _weights(code.field.gf(messages) @ code.generator)
                sampled = sampled[sampled > 0]
                if sampled.size:
                    best = min(best, int(sampled.min()))
        return best

    @staticmethod
    def _baseline_candidates(code: LinearCode, plan: EvaluationPlan) -> Iterator[galois.FieldArray]:
        M = code.params.get("M")
        N = code.params.get("N")
        field = plan.field
        fibers = plan.fibers
        if M is None or N is None:
            return

        # a_0(t) = Π (t - t_i) sobre as fibras 1..M: peso (b-M)(r+1)
        if M < plan.b:
            a0 = roots_product(field, [fiber.t for fiber in fibers[1:M + 1]])
            yield a0(plan.t_column)

        # Z(t)·h(x): Z zera N fibras, h é o hiperplano por r-1 pontos da fibra 0
        if N < plan.b:
            z = roots_product(field, [fiber.t for fiber in fibers[1:N + 1]])
            anchors = plan.local_rows[plan.fiber_indices(0)[:plan.r - 1]]
            for h in anchors.null_space():
                yield z(plan.t_column) * (plan.local_rows @ h)

    @staticmethod
    def _partition_candidates(code: LinearCode) -> Iterator[galois.FieldArray]:
        """Palavras que zeram ⌈k/r⌉-1 fibras inteiras mais preenchimento até k-1 zeros"""
        generator = _full_rank_generator(code)
        k, r = generator.shape[0], code.r
        if k <= 1:
            yield from generator
            return

        groups = code.fibers()
        spare = -(-k // r) - 1
        for chosen in itertools.islice(itertools.combinations(range(len(groups)), spare), MAX_PARTITION_CANDIDATES):
            zeros = [i for g in chosen for i in groups[g][:r]]
            padding = [i for g, group in enumerate(groups) if g not in chosen for i in group]
            support = zeros + padding[:k - 1 - len(zeros)]
            for message in generator[:, support].left_null_space():
                yield message @ generator

    @staticmethod
    def min_weight_witness(code: LinearCode, target_weight: int, plan: Optional[EvaluationPlan] = None,
                           samples: int = 2000, seed: int = 0) -> Optional[galois.FieldArray]:
        """Palavra de peso exatamente target_weight, ou None se a busca não achar"""
        if not 1 <= target_weight <= code.n:
            return None

        def candidates() -> Iterator[galois.FieldArray]:
            if plan is not None and code.family == "baseline":
                yield from OracleEngine._baseline_candidates(code, plan)
            yield from OracleEngine._partition_candidates(code)
            yield from code.generator
            if samples > 0:
                rng = np.random.default_rng(seed)
                messages = code.field.gf(rng.integers(0, code.field.q, size=(samples, code.k)))
                yield from messages @ code.generator

        for word in candidates():
            if int(_weights(word)) == target_weight:
                return word
        return None

    @staticmethod
    def recovery_exhaustive(code: LinearCode, samples: int = 100, seed: int = 0) -> RecoveryReport:
        """Identidade de recuperação nas linhas geradoras e em palavras aleatórias"""
        words = code.generator
        if samples > 0:
            rng = np.random.default_rng(seed)
            messages = code.field.gf(rng.integers(0, code.field.q, size=(samples, code.k)))
            words = code.field.gf(np.concatenate([code.generator.view(np.ndarray),
                                                  (messages @ code.generator).view(np.ndarray)], axis=0))

        mismatch = recover_all(words, code.recovery_sets, code.recovery_weights) != words
        failures = [
            {"row": int(row), "coordinate": int(i), "generator_row": int(row < code.k)}
            for row, i in np.argwhere(mismatch)[:10]
        ]

        groups = {i: group for group in code.fibers() for i in group}
        partition_ok = sum(len(group) for group in code.fibers()) == code.n and all(
            sorted({i, *(int(j) for j in code.recovery_sets[i])}) == groups.get(i) for i in range(code.n)
        )

        if failures:
            first = failures[0]
            logger.warning(f"Recuperação falhou na linha {first['row']}, coordenada {first['coordinate']}")
        return RecoveryReport(ok=not failures and partition_ok, checked_rows=len(words),
                              partition_ok=partition_ok, failures=failures)

    @staticmethod
    def optimality_scan(r_range: range, b_range: range) -> pd.DataFrame:
        """Todas as tuplas (r, b, M, N) do baseline; marca onde as cotas coincidem"""
        rows = []
        for r in r_range:
            for b in b_range:
                for M in range(b):
                    for N in range(M + 1):
                        _, _, predicted = baseline_ledger(r, b, M, N)
                        delta = M - N
                        marked = predicted.d_lower == predicted.d_upper
                        if delta == 1 and r == 3 and b - N == 2:
                            pattern = "δ=1, r=3, d=4"
                        elif delta == 0 and b == N + 1:
                            pattern = "δ=0, d=2"
                        else:
                            pattern = ""
                        rows.append({
                            "r": r, "b": b, "M": M, "N": N, "delta": delta,
                            "n": b * (r + 1), "k": predicted.k,
                            "d_lower": predicted.d_lower, "d_upper": predicted.d_upper,
                            "d_opt": d_opt(b * (r + 1), predicted.k, r),
                            "marked": marked, "pattern": pattern,
                        })

        frame = pd.DataFrame(rows)
        if frame.empty:
            return frame
        expected = frame["pattern"] != ""
        disagree = frame[frame["marked"] != expected]
        if not disagree.empty:
            row = disagree.iloc[0]
            raise ClassificationMismatch(
                f"classificação divergente em r={row.r}, b={row.b}, M={row.M}, N={row.N}: "
                f"d_lower={row.d_lower}, d_upper={row.d_upper}")
        logger.info(f"Varredura de otimalidade: {int(frame['marked'].sum())} de {len(frame)} tuplas marcadas")
        return frame

    @staticmethod
    def row_space_equal(a: LinearCode, b: LinearCode) -> bool:
        if a.field != b.field or a.n != b.n:
            return False
        return same_row_space(a.generator, b.generator)

    def certify(self, code: LinearCode, plan: Optional[EvaluationPlan] = None, budget: int = DEFAULT_BUDGET,
                samples: int = 2000, recovery_samples: int = 100, seed: int = 0,
                exhaustive: bool = False) -> VerificationResult:
        """Rank, recuperação e distância contra as cotas previstas"""
        violations = []
        predicted = code.predicted

        measured_rank = rank(code.generator)
        if measured_rank != code.k:
            violations.append(f"rank do gerador {measured_rank} ≠ k = {code.k}")

        recovery = self.recovery_exhaustive(code, samples=recovery_samples, seed=seed)
        if not recovery.ok:
            where = recovery.failures[0] if recovery.failures else {}
            violations.append(f"recuperação falhou {where or '(partição inválida)'}")

        if exhaustive:
            try:
                distance, mode = self.exact_distance(code, budget=budget), "exact"
            except BudgetExceeded as e:
                logger.warning(f"{e}; usando amostragem")
                distance, mode = self.sampled_distance_upper(code, samples=samples, seed=seed), "sampled"
        else:
            # Testemunha estruturada de peso d_lower fecha a distância junto com a cota inferior
            distance, mode = self.sampled_distance_upper(code, samples=samples, seed=seed), "sampled"
            target = predicted.d_lower if predicted else None
            if target is not None and target >= 1:
                witness = self.min_weight_witness(code, target, plan=plan, samples=samples, seed=seed)
                if witness is not None and target <= distance:
                    distance, mode = target, "witness"
        logger.info(f"Oráculo de distância: modo {mode}, d={distance}")

        report = make_report(code, d_measured=distance, oracle_mode=mode)
        if predicted is not None and predicted.d_lower is not None and distance < predicted.d_lower:
            violations.append(f"d medido {distance} < d_lower previsto {predicted.d_lower}")
        if mode == "exact":
            if distance > report.d_opt:
                violations.append(f"d medido {distance} > d_opt = {report.d_opt}")
            if (predicted is not None and predicted.d_upper is not None and report.k_predicted == code.k
                    and distance > predicted.d_upper):
                violations.append(f"d medido {distance} > d_upper previsto {predicted.d_upper}")

        return VerificationResult(report=report, recovery=recovery, violations=violations)


# Instância global
oracle_engine = OracleEngine()
