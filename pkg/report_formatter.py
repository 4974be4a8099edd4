"""
Отчеты в трех форматах: text (таблицы pandas), json (каноническая схема), latex (автономный документ)
"""

import logging
from typing import Dict, List, Sequence

import pandas as pd

from backlund import BacklundTable, HomogeneityReport
from cache_manager import dump_json
from config import Config, HierarchyConfig, WavefrontConfig
from currents import CheckResult, CurrentPair
from jet_algebra import serialize, to_latex, to_text
from renorm_counting import LedgerReport
from wavefront import WavefrontReport

logger = logging.getLogger(__name__)


def _table(rows: List[Dict]) -> str:
    if not rows:
        return "(пусто)"
    return pd.DataFrame(rows).to_string(index=False)


def _latex_document(body: List[str]) -> str:
    return "\n".join([HierarchyConfig.LATEX_PREAMBLE, *body, HierarchyConfig.LATEX_CLOSING]) + "\n"


def _latex_tabular(rows: List[Dict]) -> List[str]:
    if not rows:
        return []
    columns = list(rows[0])
    lines = [r"\begin{tabular}{" + "l" * len(columns) + "}",
             " & ".join(c.replace("_", r"\_") for c in columns) + r" \\ \hline"]
    for row in rows:
        lines.append(" & ".join(str(row[c]).replace("_", r"\_") for c in columns) + r" \\")
    lines.append(r"\end{tabular}")
    return lines


def _check(fmt: str) -> None:
    if fmt not in Config.OUTPUT_FORMATS:
        raise ValueError(f"Неизвестный формат {fmt}, допустимы {Config.OUTPUT_FORMATS}")


def format_backlund(table: BacklundTable, homogeneity: HomogeneityReport, fmt: str) -> str:
    _check(fmt)
    if fmt == 'json':
        return dump_json({
            'schema_version': Config.SCHEMA_VERSION,
            'max_nu': table.max_nu,
            'coefficients': [{'nu': nu, 'expr': serialize(expr), 'text': to_text(expr)}
                             for nu, expr in enumerate(table.coefficients)],
            'homogeneity': homogeneity.to_dict()
        })
    if fmt == 'latex':
        body = [r"\section*{Backlund coefficients}"]
        for nu, expr in enumerate(table.coefficients):
            body += [r"\begin{dmath*}", f"A_{{{nu}}} = {to_latex(expr)}", r"\end{dmath*}"]
        return _latex_document(body)

    rows = [{'ν': nu, 'deg': deg, 'A_ν': to_text(expr)}
            for nu, (expr, deg) in enumerate(zip(table.coefficients, homogeneity.degrees))]
    status = "однородность подтверждена" if homogeneity.passed else f"нарушений: {len(homogeneity.violations)}"
    return _table(rows) + f"\n\n{status}\n"


def format_currents(pairs: Sequence[CurrentPair], results: Sequence[CheckResult], fmt: str) -> str:
    _check(fmt)
    passed = all(r.passed for r in results)
    if fmt == 'json':
        return dump_json({
            'schema_version': Config.SCHEMA_VERSION,
            'max_N': len(pairs) - 1,
            'currents': [{'N': p.N, 's1': serialize(p.s1), 's2': serialize(p.s2),
                          's1_text': to_text(p.s1), 's2_text': to_text(p.s2),
                          'q1_text': to_text(p.q1), 'r1_text': to_text(p.r1)} for p in pairs],
            'checks': [r.to_dict() for r in results],
            'passed': passed
        })
    if fmt == 'latex':
        body = [r"\section*{Conserved currents}"]
        for pair in pairs:
            rendered = pair.to_latex()
            for name in ('s1', 's2'):
                body += [r"\begin{dmath*}", f"s_{name[1]}^{{{pair.N}}} = {rendered[name]}", r"\end{dmath*}"]
        body += [r"\section*{Checks}"] + _latex_tabular(
            [{'N': r.N, 'check': r.check, 'passed': r.passed} for r in results])
        return _latex_document(body)

    current_rows = [{'N': p.N, 's_1': to_text(p.s1), 's_2': to_text(p.s2)} for p in pairs]
    check_rows = [{'N': r.N, 'проверка': r.check, 'результат': '✅' if r.passed else '❌', 'детали': r.detail}
                  for r in results]
    return _table(current_rows) + "\n\n" + _table(check_rows) + f"\n\n{'PASS' if passed else 'FAIL'}\n"


def format_ledger(report: LedgerReport, fmt: str) -> str:
    _check(fmt)
    data = report.to_dict()
    if fmt == 'json':
        return dump_json({'schema_version': Config.SCHEMA_VERSION, **data})
    summary = [
        {'параметр': 'N', 'значение': report.N},
        {'параметр': 't', 'значение': report.t},
        {'параметр': 'компонента', 'значение': report.component},
        {'параметр': 'семейств', 'значение': report.term_count},
        {'параметр': 'max sd', 'значение': report.max_scaling_degree},
        {'параметр': 'граница', 'значение': str(report.ambiguity)},
        {'параметр': 'ожидалось', 'значение': str(report.expected_ambiguity)},
        {'параметр': 'не зависит от t', 'значение': report.t_independent},
    ]
    if fmt == 'latex':
        keys = ('N', 't', 'component', 'term_count', 'max_scaling_degree', 't_independent', 'passed')
        body = [r"\section*{Power counting}"] + _latex_tabular([{'key': k, 'value': data[k]} for k in keys])
        body += ["", f"Ambiguity: {report.ambiguity}, expected {report.expected_ambiguity}.", ""]
        body += _latex_tabular([row.to_dict() for row in report.rows])
        return _latex_document(body)
    return (_table(summary) + "\n\n" + _table([row.to_dict() for row in report.rows])
            + f"\n\n{'PASS' if report.passed else 'FAIL'}\n")


def format_wavefront(report: WavefrontReport, fmt: str) -> str:
    _check(fmt)
    data = report.to_dict()
    if fmt == 'json':
        return dump_json({'schema_version': Config.SCHEMA_VERSION, **data})
    keys = ('n_max', 'window', 'rule', 'graphs_checked', 'configurations_checked',
            'infeasible_count', 'degenerate_count')
    if fmt == 'latex':
        body = [r"\section*{Wavefront sets}"] + _latex_tabular([{'key': k, 'value': data[k]} for k in keys])
        body += [""] + _latex_tabular([{'verdict': k, 'count': v} for k, v in data['verdict_counts'].items()])
        body += ["", f"Counterexamples: {len(report.counterexamples)}."]
        return _latex_document(body)
    summary = [{'параметр': key, 'значение': data[key]} for key in keys]
    verdicts = [{'вердикт': key, 'цель': WavefrontConfig.TARGET_NAMES[key.split(':')[0]], 'число': value}
                for key, value in data['verdict_counts'].items()]
    counterexamples = [{'ребра': c['edges'], 'размещение': c['placement'], 'цель': c['target']}
                       for c in report.counterexamples]
    text = _table(summary) + "\n\n" + _table(verdicts)
    if counterexamples:
        text += "\n\n" + _table(counterexamples)
    return text + f"\n\n{'PASS' if report.passed else 'FAIL'}\n"
