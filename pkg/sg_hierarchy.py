#!/usr/bin/env python3
"""
Командная строка для иерархии сохраняющихся токов sine-Gordon
- backlund: таблица A_0..A_ν с проверкой однородности
- currents: токи s^0..s^N и проверки (степени, сохранение, оракул)
- powercount: учет степеней и граница неоднозначности продолжения
- wavefront: перебор погруженных графов и проверка микролокальных условий

Стандартный вывод содержит только отчет, прогресс и логи идут в stderr.
Коды выхода: 0 - успех, 1 - проверка не пройдена, 2 - ошибка окружения/кэша, 3 - внутренняя ошибка.
"""

import argparse
import logging
import sys
from typing import List, Optional

from backlund import ShiftError, TruncationError, verify_homogeneity
from cache_manager import CacheError, CacheManager
from config import Config, HierarchyConfig, PowerCountConfig, WavefrontConfig
from currents import compare_readings, run_checks
from jet_algebra import DomainError, to_text
from renorm_counting import build_ledger
from report_formatter import format_backlund, format_currents, format_ledger, format_wavefront
from wavefront import InvalidImmersion, SlotMismatch, enumerate_and_verify

logger = logging.getLogger(__name__)


class InvariantBreach(Exception):
    """Вычисленные данные нарушают инвариант, который должен выполняться всегда"""


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as file:
            file.write(text)
        logger.info(f"📄 Отчет записан в {output}")
    else:
        sys.stdout.write(text)


def cmd_backlund(args) -> int:
    manager = CacheManager(args.cache_dir)
    table = manager.load_table(args.max_nu, progress=args.progress)
    homogeneity = verify_homogeneity(table)
    if not homogeneity.passed:
        raise InvariantBreach(f"Нарушена однородность A_ν: {homogeneity.violations[0]}")
    _emit(format_backlund(table, homogeneity, args.format), args.output)
    return Config.EXIT_OK


def cmd_currents(args) -> int:
    checks = HierarchyConfig.expand_checks(args.check)
    manager = CacheManager(args.cache_dir)
    # оракул для s^N требует ряд до α^{2N+1}, а s_2 - еще два порядка таблицы
    table = manager.load_table(2 * args.max_N + 2, progress=args.progress)
    pairs = manager.load_currents(args.max_N, table)

    results = []
    for pair in pairs:
        _, pair_results = run_checks(pair.N, table, checks, pair=pair)
        results.extend(pair_results)
        difference = compare_readings(pair.N, table)
        if difference is not None:
            logger.debug(f"N={pair.N}: сумма по β от 0 и от 1 различаются на {to_text(difference)}")

    _emit(format_currents(pairs, results, args.format), args.output)
    return Config.EXIT_OK if all(r.passed for r in results) else Config.EXIT_CHECK_FAILED


def cmd_powercount(args) -> int:
    report = build_ledger(args.N, args.t, args.component, p_max=args.p_max, progress=args.progress)
    _emit(format_ledger(report, args.format), args.output)
    if not report.passed:
        logger.warning(f"❌ Граница {report.ambiguity} вместо {report.expected_ambiguity} "
                       f"или зависит от t: {report.horizon_ambiguities}")
        return Config.EXIT_CHECK_FAILED
    return Config.EXIT_OK


def cmd_wavefront(args) -> int:
    report = enumerate_and_verify(args.n_max, args.window, args.rule, progress=args.progress)
    _emit(format_wavefront(report, args.format), args.output)
    return Config.EXIT_OK if report.passed else Config.EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=Config.OUTPUT_FORMATS, default=Config.DEFAULT_FORMAT,
                        help="Формат отчета")
    common.add_argument("--cache-dir", type=str, default=None,
                        help="Каталог кэша (по умолчанию SG_CACHE_DIR или ./.sg-cache)")
    common.add_argument("--output", type=str, default=None, help="Записать отчет в файл вместо stdout")

    parser = argparse.ArgumentParser(description="Сохраняющиеся токи модели sine-Gordon и их перенормировка")
    parser.add_argument("--quiet", action="store_true", help="Только предупреждения, без индикатора прогресса")
    parser.add_argument("--verbose", action="store_true", help="Отладочные сообщения")
    subparsers = parser.add_subparsers(dest="command", required=True)

    backlund = subparsers.add_parser("backlund", parents=[common], help="Таблица коэффициентов A_ν")
    backlund.add_argument("--max-nu", type=int, default=HierarchyConfig.DEFAULT_MAX_NU)
    backlund.set_defaults(handler=cmd_backlund)

    currents = subparsers.add_parser("currents", parents=[common], help="Токи s^N и их проверки")
    currents.add_argument("--max-N", dest="max_N", type=int, default=HierarchyConfig.DEFAULT_MAX_N)
    currents.add_argument("--check", choices=HierarchyConfig.CURRENT_CHECKS, default="all")
    currents.set_defaults(handler=cmd_currents)

    powercount = subparsers.add_parser("powercount", parents=[common], help="Учет степеней")
    powercount.add_argument("--N", dest="N", type=int, required=True)
    powercount.add_argument("--t", dest="t", type=int, required=True)
    powercount.add_argument("--component", choices=PowerCountConfig.COMPONENTS, default="s2")
    powercount.add_argument("--p-max", type=int, default=PowerCountConfig.MAX_HBAR_ORDER)
    powercount.set_defaults(handler=cmd_powercount)

    wavefront = subparsers.add_parser("wavefront", parents=[common], help="Микролокальные условия")
    wavefront.add_argument("--n-max", type=int, default=WavefrontConfig.DEFAULT_VERTICES)
    wavefront.add_argument("--window", type=int, default=WavefrontConfig.DEFAULT_WINDOW)
    wavefront.add_argument("--rule", choices=WavefrontConfig.RULES, default="feynman")
    wavefront.set_defaults(handler=cmd_wavefront)
    return parser


def _validate(parser: argparse.ArgumentParser, args) -> None:
    for name in ("max_nu", "max_N", "N", "t", "p_max"):
        value = getattr(args, name, None)
        if value is not None and value < 0:
            parser.error(f"--{name.replace('_', '-')} должно быть неотрицательным")
    if args.command == "wavefront":
        try:
            WavefrontConfig.validate_limits(args.n_max, args.window)
        except ValueError as e:
            parser.error(str(e))


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else Config.LOG_LEVEL
    logging.basicConfig(stream=sys.stderr, level=level, format=Config.LOG_FORMAT, datefmt=Config.LOG_DATEFMT,
                        force=True)
    args.progress = not args.quiet

    try:
        return args.handler(args)
    except (CacheError, OSError) as e:
        logger.error(f"❌ Ошибка кэша или файловой системы: {e}")
        return Config.EXIT_ENVIRONMENT
    except (DomainError, InvariantBreach, TruncationError, ShiftError, InvalidImmersion, SlotMismatch) as e:
        logger.error(f"❌ Нарушен внутренний инвариант: {e}")
        return Config.EXIT_INTERNAL
    except Exception as e:
        logger.exception(f"❌ Непредвиденная ошибка: {e}")
        return Config.EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
