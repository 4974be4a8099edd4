import os
from dotenv import load_dotenv
from typing import Dict, List

load_dotenv()

class Config:
    # Кэш артефактов (флаг --cache-dir имеет приоритет)
    CACHE_DIR = os.getenv("SG_CACHE_DIR", "./.sg-cache")
    MANIFEST_FILE = "manifest.json"
    SCHEMA_VERSION = 1

    # Логирование
    LOG_LEVEL = os.getenv("SG_LOG_LEVEL", "INFO")
    LOG_FORMAT = '%(asctime)s.%(msecs)03d [%(levelname)s] %(name)s: %(message)s'
    LOG_DATEFMT = '%H:%M:%S'

    # Форматы отчетов
    OUTPUT_FORMATS = ['text', 'json', 'latex']
    DEFAULT_FORMAT = 'text'
    JSON_INDENT = 2

    # Коды выхода CLI
    EXIT_OK = 0
    EXIT_CHECK_FAILED = 1
    EXIT_ENVIRONMENT = 2
    EXIT_INTERNAL = 3

class HierarchyConfig(Config):
    """Настройки вычисления иерархии токов"""

    DEFAULT_MAX_NU = 4
    DEFAULT_MAX_N = 1
    CURRENT_CHECKS = ['degrees', 'conservation', 'oracle', 'all']

    # Преамбула для автономной сборки LaTeX-отчета
    LATEX_PREAMBLE = r"""\documentclass{article}
\usepackage{amsmath}
\usepackage{breqn}
\allowdisplaybreaks
\begin{document}"""
    LATEX_CLOSING = r"\end{document}"

    # Артефакты внутри каталога кэша
    TABLE_ARTIFACT = "backlund_table.json"
    CURRENTS_ARTIFACT = "currents.json"

    @classmethod
    def expand_checks(cls, check: str) -> List[str]:
        """Раскрыть значение --check в список проверок"""
        if check == 'all':
            return ['degrees', 'conservation', 'oracle']
        return [check]

class PowerCountConfig(Config):
    """Настройки учета степеней (power counting)"""

    MAX_HBAR_ORDER = int(os.getenv("SG_LEDGER_MAX_HBAR_ORDER", "6"))
    COMPONENTS = ['s2', 's1']

    # Какая часть тока определяет бюджет производных
    COMPONENT_SOURCES = {
        's2': 's2',
        's1': 'r1',
        'q1': 'q1',
        'r1': 'r1'
    }

class WavefrontConfig(Config):
    """Ограничения переборов для волновых фронтов"""

    MAX_VERTICES = 6
    MAX_WINDOW = 6
    DEFAULT_VERTICES = 4
    DEFAULT_WINDOW = 4
    ORACLE_BOX = 10 ** 6
    ORACLE_MAX_VARIABLES = 3
    RULES = ['feynman', 'antifeynman', 'wightman']

    TARGET_NAMES = {
        'all_zero': 'все ковекторы нулевые',
        'all_forward': 'все ковекторы в V+',
        'all_backward': 'все ковекторы в V-'
    }

    @classmethod
    def validate_limits(cls, n_max: int, window: int) -> None:
        """Проверить, что перебор остается в настольном масштабе"""
        if n_max < 1 or n_max > cls.MAX_VERTICES:
            raise ValueError(f"n_max должно быть в диапазоне 1..{cls.MAX_VERTICES}, получено {n_max}")
        if window < 1 or window > cls.MAX_WINDOW:
            raise ValueError(f"window должно быть в диапазоне 1..{cls.MAX_WINDOW}, получено {window}")

