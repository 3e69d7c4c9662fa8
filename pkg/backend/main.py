import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from config import Settings, get_settings
from construction_engine import (DESIGN_FAMILIES, ELLIPTIC_FAMILIES, ConstructionSpec, FamilyType, PointSource,
                                 construction_engine)
from errors import LRCError
from lr_code import LinearCode, deserialize, make_report, recover, serialize
from oracle_engine import oracle_engine
from poly_algebra import same_row_space
from report_service import TABLE_FORMATS, report_service

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
# reference-instances é sinônimo de paper-instances
TABLE_SUITES = ["paper-instances", "reference-instances", "optimality-scan"]

DESIGN_DISTANCE_FAMILIES = {family.value for family in DESIGN_FAMILIES}
ELLIPTIC_DISTANCE_FAMILIES = {family.value for family in ELLIPTIC_FAMILIES}
FORM_FAMILIES = {"p1xp1", "hirzebruch"}


def _int_list(text: str) -> List[int]:
    return [int(part) for part in text.split(",") if part.strip() != ""]


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lrc", description="Códigos LR a partir de superfícies fibradas")
    parser.add_argument("--verbose", action="store_true", help="log em nível DEBUG")
    commands = parser.add_subparsers(dest="command", required=True)

    construct = commands.add_parser("construct", help="constrói um código e grava o arquivo")
    construct.add_argument("--family", required=True, choices=[family.value for family in FamilyType])
    construct.add_argument("--p", type=int, required=True)
    construct.add_argument("--m", type=int, default=1)
    construct.add_argument("--modulus", help="coeficientes do módulo, grau crescente: c0,c1,...,1")
    construct.add_argument("--r", type=int)
    construct.add_argument("--b", type=int)
    construct.add_argument("--M", type=int)
    construct.add_argument("--N", type=int)
    construct.add_argument("--alpha", type=int)
    construct.add_argument("--mh", type=int, default=0)
    construct.add_argument("--dd", type=int, help="distância de projeto 𝔡")
    construct.add_argument("--d", type=int, help="distância de projeto das famílias elípticas")
    construct.add_argument("--c", type=int, default=1)
    construct.add_argument("--g", help="g(x) como c0,c1,...; formas A_i como c,..;c,..")
    construct.add_argument("--t-values", help="fibras explícitas t (enc), separadas por vírgula")
    construct.add_argument("--point-source", choices=[source.value for source in PointSource],
                           default=PointSource.RATIONAL_NORMAL.value)
    construct.add_argument("--seed", type=int, default=settings.seed)
    construct.add_argument("--out", required=True, type=Path)
    construct.add_argument("--format", choices=TABLE_FORMATS, default="text")

    verify = commands.add_parser("verify", help="verifica um arquivo de código")
    verify.add_argument("--in", dest="path", required=True, type=Path)
    verify.add_argument("--exhaustive-distance", action="store_true")
    verify.add_argument("--budget", type=int, default=settings.budget)
    verify.add_argument("--samples", type=int, default=settings.samples)
    verify.add_argument("--seed", type=int, default=settings.seed)
    verify.add_argument("--format", choices=TABLE_FORMATS, default="text")

    recover_cmd = commands.add_parser("recover", help="recupera um símbolo apagado")
    recover_cmd.add_argument("--in", dest="path", required=True, type=Path)
    recover_cmd.add_argument("--word", required=True, help="enc separados por vírgula, com um '?'")

    table = commands.add_parser("table", help="tabelas de instâncias de referência")
    table.add_argument("--suite", required=True, choices=TABLE_SUITES)
    table.add_argument("--format", choices=TABLE_FORMATS, default="text")
    table.add_argument("--budget", type=int, default=settings.budget)
    table.add_argument("--samples", type=int, default=settings.samples)
    table.add_argument("--seed", type=int, default=settings.seed)
    return parser


def spec_from_args(args: argparse.Namespace, parser: argparse.ArgumentParser) -> ConstructionSpec:
    """Flags de construct -> ConstructionSpec; flags ausentes viram erro de uso"""
    family = args.family
    if family in DESIGN_DISTANCE_FAMILIES and args.dd is None:
        parser.error(f"--dd é obrigatório para a família {family}")
    if family in ELLIPTIC_DISTANCE_FAMILIES and args.d is None:
        parser.error(f"--d é obrigatório para a família {family}")

    g, g_forms = None, None
    try:
        if args.g:
            if ";" in args.g or family in FORM_FAMILIES:
                g_forms = [_int_list(part) for part in args.g.split(";")]
            else:
                g = _int_list(args.g)
        modulus = _int_list(args.modulus) if args.modulus else None
        t_values = _int_list(args.t_values) if args.t_values else None
    except ValueError as e:
        parser.error(f"lista de inteiros inválida: {e}")

    fields = {
        "family": family, "p": args.p, "m": args.m, "modulus": modulus, "r": args.r, "b": args.b,
        "M": args.M, "N": args.N, "alpha": args.alpha, "mh": args.mh, "dd": args.dd, "d": args.d, "c": args.c,
        "g": g, "g_forms": g_forms, "t_values": t_values, "point_source": args.point_source, "seed": args.seed,
    }
    try:
        return ConstructionSpec(**{key: value for key, value in fields.items() if value is not None})
    except ValidationError as e:
        error = e.errors()[0]
        parser.error(f"--{error['loc'][0]}: {error['msg']}")


# Comandos

def cmd_construct(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    spec = spec_from_args(args, parser)
    result = construction_engine.build(spec)
    args.out.write_text(serialize(result.code), encoding="utf-8")
    logger.info(f"Código gravado em {args.out}")

    frame = report_service.reports_frame([make_report(result.code)])
    sys.stdout.write(report_service.render(frame, args.format))
    return EXIT_OK


def _rebuild_plan(code: LinearCode):
    """Plano de avaliação reconstruído a partir de params, se reproduzir o mesmo código"""
    if not code.params:
        return None
    try:
        result = construction_engine.build(ConstructionSpec(**code.params))
    except (LRCError, ValidationError) as e:
        logger.warning(f"Não foi possível reconstruir o plano: {e}")
        return None
    if result.code.n != code.n or result.code.field != code.field:
        return None
    if not same_row_space(result.code.generator, code.generator):
        logger.warning("Gerador do arquivo difere da reconstrução; testemunhas estruturadas desativadas")
        return None
    return result.plan


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    code = deserialize(args.path.read_text(encoding="utf-8"))
    verification = oracle_engine.certify(
        code, plan=_rebuild_plan(code), budget=args.budget, samples=args.samples,
        recovery_samples=settings.recovery_samples, seed=args.seed, exhaustive=args.exhaustive_distance,
    )
    sys.stdout.write(report_service.render(report_service.verification_frame(verification), args.format))

    if not verification.passed:
        for violation in verification.violations:
            print(f"violação: {violation}", file=sys.stderr)
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def cmd_recover(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    code = deserialize(args.path.read_text(encoding="utf-8"))
    tokens = [token.strip() for token in args.word.split(",")]
    erased = [i for i, token in enumerate(tokens) if token == "?"]
    if len(erased) != 1:
        parser.error(f"--word deve ter exatamente um '?', encontrados {len(erased)}")

    try:
        word = [None if token == "?" else int(token) for token in tokens]
    except ValueError as e:
        parser.error(f"--word inválido: {e}")

    i = erased[0]
    value = recover(code, word, i)
    print(value.enc)
    print(f"J_{i} = {[int(j) for j in code.recovery_sets[i]]}")
    return EXIT_OK


def cmd_table(args: argparse.Namespace, settings: Settings) -> int:
    if args.suite == "optimality-scan":
        frame = report_service.optimality_table()
    else:
        table_settings = settings.model_copy(update={"budget": args.budget, "samples": args.samples,
                                                     "seed": args.seed})
        frame = report_service.reference_instances_table(table_settings)
    logger.info(f"Tabela {args.suite}: {report_service.summary(frame)}")
    sys.stdout.write(report_service.render(frame, args.format))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    try:
        settings = get_settings()
    except ValueError as e:
        print(f"erro de configuração: {e}", file=sys.stderr)
        return EXIT_USAGE

    parser = build_parser(settings)
    args = parser.parse_args(argv)

    # Configurar logging
    level = logging.DEBUG if args.verbose else getattr(logging, settings.log_level.upper(), logging.INFO)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

    try:
        if args.command == "construct":
            return cmd_construct(args, parser)
        elif args.command == "verify":
            return cmd_verify(args, settings)
        elif args.command == "recover":
            return cmd_recover(args, parser)
        else:
            return cmd_table(args, settings)
    except LRCError as e:
        logger.error(f"Erro em {args.command}: {e}")
        print(f"erro: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"erro de arquivo: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
