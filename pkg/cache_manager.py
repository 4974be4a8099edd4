"""
Кэш вычисленных артефактов: таблица A_ν и пары токов
Манифест хранит версию схемы, глубину вычислений и sha256 каждого файла.
"""

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

from backlund import BacklundTable
from config import Config, HierarchyConfig
from currents import CurrentPair, decompose_s1
from jet_algebra import DomainError, parse, serialize

logger = logging.getLogger(__name__)


class CacheError(Exception):
    """Поврежденный или несогласованный кэш"""


def dump_json(data) -> str:
    """Каноническая запись JSON: одинаковые данные дают одинаковые байты"""
    return json.dumps(data, sort_keys=True, indent=Config.JSON_INDENT, ensure_ascii=False) + "\n"


def digest(payload: Union[str, bytes]) -> str:
    if isinstance(payload, str):
        payload = payload.encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


def _decode_json(payload: bytes, what: str):
    try:
        return json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CacheError(f"{what} не читается: {e}")


def _cached_depth(data: Dict) -> int:
    try:
        return int(data.get("max_N", -1))
    except (TypeError, ValueError) as e:
        raise CacheError(f"Некорректная глубина токов в кэше: {e}")


@dataclass
class CacheManifest:
    schema_version: int = Config.SCHEMA_VERSION
    max_nu: int = -1
    max_N: int = -1
    digests: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            'schema_version': self.schema_version,
            'max_nu': self.max_nu,
            'max_N': self.max_N,
            'digests': dict(sorted(self.digests.items()))
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'CacheManifest':
        try:
            return cls(schema_version=int(data['schema_version']), max_nu=int(data['max_nu']),
                       max_N=int(data['max_N']), digests={str(k): str(v) for k, v in data['digests'].items()})
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise CacheError(f"Некорректный манифест: {e}")


class CacheManager:
    """Чтение и запись артефактов в каталоге кэша"""

    def __init__(self, cache_dir: Optional[str] = None):
        self.cache_dir = cache_dir or Config.CACHE_DIR
        self.manifest_path = os.path.join(self.cache_dir, Config.MANIFEST_FILE)

    def _path(self, name: str) -> str:
        return os.path.join(self.cache_dir, name)

    def load_manifest(self) -> CacheManifest:
        """Манифест из кэша; пустой, если кэша нет или версия схемы устарела"""
        if not os.path.exists(self.manifest_path):
            return CacheManifest()
        with open(self.manifest_path, "rb") as file:
            data = _decode_json(file.read(), f"Манифест {self.manifest_path}")
        if not isinstance(data, dict):
            raise CacheError(f"Манифест {self.manifest_path} должен быть объектом JSON")

        manifest = CacheManifest.from_dict(data)
        if manifest.schema_version != Config.SCHEMA_VERSION:
            logger.warning(f"⚠️ Версия схемы кэша {manifest.schema_version} != {Config.SCHEMA_VERSION}, "
                           f"артефакты будут пересчитаны")
            return CacheManifest()
        return manifest

    def save_manifest(self, manifest: CacheManifest) -> None:
        os.makedirs(self.cache_dir, exist_ok=True)
        with open(self.manifest_path, "w", encoding="utf-8") as file:
            file.write(dump_json(manifest.to_dict()))

    def read_artifact(self, name: str, manifest: CacheManifest) -> Optional[Dict]:
        """Содержимое артефакта с проверкой дайджеста; None, если артефакт не записан"""
        expected = manifest.digests.get(name)
        if expected is None:
            return None
        path = self._path(name)
        if not os.path.exists(path):
            raise CacheError(f"Артефакт {name} указан в манифесте, но отсутствует")
        with open(path, "rb") as file:
            payload = file.read()
        if digest(payload) != expected:
            raise CacheError(f"Дайджест {name} не совпадает с манифестом")
        data = _decode_json(payload, f"Артефакт {name}")
        if not isinstance(data, dict):
            raise CacheError(f"Артефакт {name} должен быть объектом JSON")
        return data

    def write_artifact(self, name: str, data: Dict, manifest: CacheManifest) -> None:
        os.makedirs(self.cache_dir, exist_ok=True)
        payload = dump_json(data).encode("utf-8")
        with open(self._path(name), "wb") as file:
            file.write(payload)
        manifest.digests[name] = digest(payload)

    # --- таблица Бэклунда ---

    def load_table(self, max_nu: int, progress: bool = False) -> BacklundTable:
        """A_0..A_max_nu: из кэша, если глубины хватает, иначе достроить и сохранить"""
        if max_nu < 0:
            raise ValueError(f"max_nu должно быть неотрицательным, получено {max_nu}")
        manifest = self.load_manifest()
        data = self.read_artifact(HierarchyConfig.TABLE_ARTIFACT, manifest)

        table = BacklundTable()
        if data is not None:
            try:
                table = BacklundTable.from_exprs([parse(records) for records in data['coefficients']])
            except (KeyError, TypeError, ValueError, AttributeError, DomainError) as e:
                raise CacheError(f"Таблица в кэше повреждена: {e}")
            if table.max_nu >= max_nu:
                logger.info(f"📦 Таблица A_0..A_{table.max_nu} загружена из кэша")
                return BacklundTable(table.coefficients[:max_nu + 1])

        table.extend(max_nu, progress=progress)
        self.write_artifact(HierarchyConfig.TABLE_ARTIFACT, {
            'schema_version': Config.SCHEMA_VERSION,
            'max_nu': table.max_nu,
            'coefficients': [serialize(expr) for expr in table.coefficients]
        }, manifest)
        manifest.max_nu = table.max_nu
        self.save_manifest(manifest)
        logger.info(f"💾 Таблица A_0..A_{table.max_nu} сохранена в {self.cache_dir}")
        return table

    # --- токи ---

    def load_currents(self, max_N: int, table: BacklundTable) -> List[CurrentPair]:
        if max_N < 0:
            raise ValueError(f"max_N должно быть неотрицательным, получено {max_N}")
        manifest = self.load_manifest()
        data = self.read_artifact(HierarchyConfig.CURRENTS_ARTIFACT, manifest)

        if data is not None and _cached_depth(data) >= max_N:
            pairs = []
            try:
                for record in data['currents'][:max_N + 1]:
                    s1, s2 = parse(record['s1']), parse(record['s2'])
                    q1, r1 = decompose_s1(s1)
                    pairs.append(CurrentPair(N=int(record['N']), s1=s1, s2=s2, q1=q1, r1=r1))
            except (KeyError, TypeError, ValueError, AttributeError, DomainError) as e:
                raise CacheError(f"Токи в кэше повреждены: {e}")
            logger.info(f"📦 Токи N=0..{max_N} загружены из кэша")
            return pairs

        pairs = [CurrentPair.build(N, table) for N in range(max_N + 1)]
        self.write_artifact(HierarchyConfig.CURRENTS_ARTIFACT, {
            'schema_version': Config.SCHEMA_VERSION,
            'max_N': max_N,
            'currents': [{'N': p.N, 's1': serialize(p.s1), 's2': serialize(p.s2)} for p in pairs]
        }, manifest)
        manifest.max_N = max_N
        self.save_manifest(manifest)
        logger.info(f"💾 Токи N=0..{max_N} сохранены в {self.cache_dir}")
        return pairs
