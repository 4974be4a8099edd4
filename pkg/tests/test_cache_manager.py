import json
import os

import pytest

from backlund import BacklundTable
from cache_manager import CacheError, CacheManager, CacheManifest, digest, dump_json
from config import Config, HierarchyConfig
from currents import CurrentPair


def read_json(path):
    with open(path, "r", encoding="utf-8") as file:
        return json.load(file)


def test_dump_json_is_canonical():
    assert dump_json({'b': 1, 'a': [1, 2]}) == dump_json({'a': [1, 2], 'b': 1})
    assert dump_json({'φ': 1}).endswith("\n")
    assert "φ" in dump_json({'φ': 1})
    assert digest("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"


def test_missing_cache_gives_empty_manifest(cache_dir):
    manifest = CacheManager(cache_dir).load_manifest()
    assert manifest.max_nu == -1
    assert manifest.digests == {}


def test_table_round_trip(cache_dir, table):
    manager = CacheManager(cache_dir)
    cold = manager.load_table(6)
    manifest = read_json(os.path.join(cache_dir, Config.MANIFEST_FILE))
    assert manifest['schema_version'] == Config.SCHEMA_VERSION
    assert manifest['max_nu'] == 6
    assert HierarchyConfig.TABLE_ARTIFACT in manifest['digests']

    warm = CacheManager(cache_dir).load_table(6)
    assert warm.coefficients == cold.coefficients == table.coefficients[:7]


def test_cache_hit_truncates_deeper_table(cache_dir):
    manager = CacheManager(cache_dir)
    manager.load_table(5)
    assert manager.load_table(3).max_nu == 3
    assert manager.load_manifest().max_nu == 5


def test_shallow_cache_is_extended(cache_dir, table):
    manager = CacheManager(cache_dir)
    manager.load_table(2)
    deeper = manager.load_table(5)
    assert deeper.coefficients == table.coefficients[:6]
    assert manager.load_manifest().max_nu == 5


def test_currents_round_trip(cache_dir, table):
    manager = CacheManager(cache_dir)
    cold = manager.load_currents(2, table)
    warm = CacheManager(cache_dir).load_currents(1, table)
    assert [p.N for p in warm] == [0, 1]
    assert warm[1] == cold[1] == CurrentPair.build(1, table)


def test_tampered_artifact_is_rejected(cache_dir):
    manager = CacheManager(cache_dir)
    manager.load_table(3)
    path = os.path.join(cache_dir, HierarchyConfig.TABLE_ARTIFACT)
    with open(path, "a", encoding="utf-8") as file:
        file.write(" ")
    with pytest.raises(CacheError):
        manager.load_table(3)


def test_missing_artifact_is_rejected(cache_dir):
    manager = CacheManager(cache_dir)
    manager.load_table(2)
    os.remove(os.path.join(cache_dir, HierarchyConfig.TABLE_ARTIFACT))
    with pytest.raises(CacheError):
        manager.load_table(2)


def test_broken_manifest_is_rejected(cache_dir):
    os.makedirs(cache_dir)
    path = os.path.join(cache_dir, Config.MANIFEST_FILE)
    with open(path, "w", encoding="utf-8") as file:
        file.write("{not json")
    with pytest.raises(CacheError):
        CacheManager(cache_dir).load_manifest()

    with open(path, "w", encoding="utf-8") as file:
        file.write(dump_json({'schema_version': 1}))
    with pytest.raises(CacheError):
        CacheManager(cache_dir).load_manifest()


def test_outdated_schema_is_recomputed(cache_dir, table):
    manager = CacheManager(cache_dir)
    manager.load_table(3)
    stale = CacheManifest(schema_version=Config.SCHEMA_VERSION + 1, max_nu=3, digests={})
    manager.save_manifest(stale)

    assert manager.load_manifest().digests == {}
    assert manager.load_table(3).coefficients == table.coefficients[:4]
    assert read_json(manager.manifest_path)['schema_version'] == Config.SCHEMA_VERSION


def test_rejects_negative_depth(cache_dir, table):
    with pytest.raises(ValueError):
        CacheManager(cache_dir).load_table(-1)
    with pytest.raises(ValueError):
        CacheManager(cache_dir).load_currents(-1, table)


def test_manifest_with_invalid_utf8_is_rejected(cache_dir):
    os.makedirs(cache_dir)
    with open(os.path.join(cache_dir, Config.MANIFEST_FILE), "wb") as file:
        file.write(b'\xff\xfe{')
    with pytest.raises(CacheError):
        CacheManager(cache_dir).load_manifest()


def test_manifest_must_be_object(cache_dir):
    os.makedirs(cache_dir)
    with open(os.path.join(cache_dir, Config.MANIFEST_FILE), "w", encoding="utf-8") as file:
        file.write(dump_json([1, 2, 3]))
    with pytest.raises(CacheError):
        CacheManager(cache_dir).load_manifest()


def rewrite_artifact(manager, name, payload):
    with open(os.path.join(manager.cache_dir, name), "wb") as file:
        file.write(payload)
    manifest = manager.load_manifest()
    manifest.digests[name] = digest(payload)
    manager.save_manifest(manifest)


def test_artifact_digest_is_over_bytes(cache_dir):
    manager = CacheManager(cache_dir)
    manager.load_table(2)
    path = os.path.join(cache_dir, HierarchyConfig.TABLE_ARTIFACT)
    with open(path, "rb") as file:
        payload = file.read()
    assert manager.load_manifest().digests[HierarchyConfig.TABLE_ARTIFACT] == digest(payload)


@pytest.mark.parametrize("payload", [
    b'{"coefficients": []}\xff',
    b'[1, 2, 3]\n',
    b'{"coefficients": [[{"kind": 1}]]}\n',
])
def test_undecodable_table_artifact_is_rejected(cache_dir, payload):
    manager = CacheManager(cache_dir)
    manager.load_table(1)
    rewrite_artifact(manager, HierarchyConfig.TABLE_ARTIFACT, payload)
    with pytest.raises(CacheError):
        manager.load_table(1)


@pytest.mark.parametrize("payload", [
    b'\xff\xfe',
    b'"currents"\n',
    b'{"max_N": "deep", "currents": []}\n',
    b'{"max_N": 1, "currents": [7, 8]}\n',
])
def test_undecodable_currents_artifact_is_rejected(cache_dir, table, payload):
    manager = CacheManager(cache_dir)
    manager.load_currents(1, table)
    rewrite_artifact(manager, HierarchyConfig.CURRENTS_ARTIFACT, payload)
    with pytest.raises(CacheError):
        manager.load_currents(1, table)
