import logging
from typing import Dict, List, Optional, Tuple

import pandas as pd

from config import Settings
from construction_engine import ConstructionSpec, FamilyType, construction_engine
from lr_code import ParamReport
from oracle_engine import VerificationResult, oracle_engine

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["family", "n", "k_predicted", "k_measured", "r", "d_lower_predicted", "d_upper_predicted",
                  "d_opt", "d_display", "verdict"]
TABLE_FORMATS = ("text", "csv", "json")


def reference_instances() -> List[Tuple[str, ConstructionSpec]]:
    """Instâncias de referência de cada família"""
    return [
        ("baseline GF(9) (32,22)", ConstructionSpec(family=FamilyType.BASELINE, p=3, m=2, r=3, b=8, M=7, N=6)),
        ("tamo-barg GF(13) g=x^4", ConstructionSpec(family=FamilyType.TAMO_BARG, p=13, r=3, b=3, N=1)),
        ("cyclic GF(5) c=2", ConstructionSpec(family=FamilyType.CYCLIC, p=5, r=3, c=2, dd=4)),
        ("cyclic GF(13) c=2", ConstructionSpec(family=FamilyType.CYCLIC, p=13, r=3, c=2, dd=12)),
        ("p1xp1-refined GF(9)", ConstructionSpec(family=FamilyType.P1XP1_REFINED, p=3, m=2, r=3, alpha=2, dd=8)),
        ("p1xp1-refined GF(16) n=50",
         ConstructionSpec(family=FamilyType.P1XP1_REFINED, p=2, m=4, r=4, alpha=5, b=10, dd=35)),
        ("elliptic-r3 GF(13)", ConstructionSpec(family=FamilyType.ELLIPTIC_R3, p=13, d=12)),
        ("ulmer p=3", ConstructionSpec(family=FamilyType.ULMER, p=3, d=4)),
    ]


class ReportService:
    @staticmethod
    def reports_frame(reports: List[ParamReport], labels: Optional[List[str]] = None) -> pd.DataFrame:
        frame = pd.DataFrame([report.model_dump() for report in reports])
        if frame.empty:
            return pd.DataFrame(columns=REPORT_COLUMNS)
        frame = frame[REPORT_COLUMNS + ["notes"]].copy()
        frame["notes"] = frame["notes"].map(lambda notes: "; ".join(notes))
        if labels is not None:
            frame.insert(0, "instance", labels)
        return frame

    @staticmethod
    def verification_frame(result: VerificationResult) -> pd.DataFrame:
        """Previsto vs medido, uma linha por grandeza"""
        report = result.report
        bounds = f"[{report.d_lower_predicted}, {report.d_upper_predicted}]"
        rows = [
            {"quantity": "n", "predicted": report.n, "measured": report.n},
            {"quantity": "k", "predicted": report.k_predicted, "measured": report.k_measured},
            {"quantity": "dim V", "predicted": report.dim_v, "measured": report.k_measured},
            {"quantity": "d", "predicted": bounds, "measured": report.d_display},
            {"quantity": "d_opt", "predicted": report.d_opt, "measured": report.d_display},
            {"quantity": "recovery", "predicted": "ok",
             "measured": "ok" if result.recovery.ok else f"falhou ({len(result.recovery.failures)})"},
            {"quantity": "verdict", "predicted": "", "measured": report.verdict},
        ]
        return pd.DataFrame(rows).astype(str)

    @staticmethod
    def render(frame: pd.DataFrame, fmt: str = "text") -> str:
        if fmt == "csv":
            return frame.to_csv(index=False)
        if fmt == "json":
            return frame.to_json(orient="records", force_ascii=False, indent=2) + "\n"
        return frame.to_string(index=False) + "\n"

    def reference_instances_table(self, settings: Settings) -> pd.DataFrame:
        """Constrói e verifica cada instância de referência dentro do orçamento"""
        labels, reports = [], []
        for label, spec in reference_instances():
            result = construction_engine.build(spec)
            verification = oracle_engine.certify(
                result.code, plan=result.plan, budget=settings.budget, samples=settings.samples,
                recovery_samples=settings.recovery_samples, seed=settings.seed,
                exhaustive=oracle_engine.enumeration_cost(result.code) <= settings.budget,
            )
            if not verification.passed:
                logger.warning(f"Instância {label}: {'; '.join(verification.violations)}")
            labels.append(label)
            reports.append(verification.report)
        return self.reports_frame(reports, labels)

    @staticmethod
    def optimality_table(r_range: range = range(3, 9), b_range: range = range(2, 17)) -> pd.DataFrame:
        frame = oracle_engine.optimality_scan(r_range, b_range)
        if frame.empty:
            return frame
        return frame[frame["marked"]].drop(columns=["marked"]).reset_index(drop=True)

    @staticmethod
    def summary(frame: pd.DataFrame) -> Dict[str, int]:
        if "verdict" not in frame:
            return {"rows": len(frame)}
        counts = frame["verdict"].value_counts().to_dict()
        return {"rows": len(frame), **{str(key): int(value) for key, value in counts.items()}}


# Instância global
report_service = ReportService()
