"""产物目录测试"""

import json

import numpy as np
import pytest

from app.config import SCHEMA
from app.core.errors import ArtifactMismatchError
from app.pipeline import ArtifactBundle, dumps


class TestDumps:
    """确定性 JSON"""

    def test_schema_and_sorted_keys(self):
        text = dumps({"b": 1, "a": [1, 2]})
        data = json.loads(text)
        assert data["schema"] == SCHEMA
        assert list(data) == ["a", "b", "schema"]
        assert text.endswith("\n")

    def test_numpy_values(self):
        data = json.loads(dumps({"i": np.int64(3), "f": np.float64(0.5), "v": np.arange(3), "s": {2, 1}}))
        assert data == {"schema": SCHEMA, "i": 3, "f": 0.5, "v": [0, 1, 2], "s": [1, 2]}

    def test_same_input_same_bytes(self):
        assert dumps({"x": 0.1, "y": [3, 2]}) == dumps({"y": [3, 2], "x": 0.1})


class TestArtifactBundle:
    """产物登记、复用与核对"""

    def test_write_and_read(self, tmp_path):
        bundle = ArtifactBundle(tmp_path, "k0")
        bundle.write("pairs/pair_0.json", {"N": [1, 2]}, key="kp")
        assert bundle.has("pairs/pair_0.json", "kp")
        assert not bundle.has("pairs/pair_0.json", "other")
        assert bundle.read("pairs/pair_0.json", "kp")["N"] == [1, 2]
        assert bundle.names("pairs/") == ["pairs/pair_0.json"]

    def test_wrong_key_raises(self, tmp_path):
        bundle = ArtifactBundle(tmp_path, "k0")
        bundle.write("cover.json", {"passed": True}, key="a")
        with pytest.raises(ArtifactMismatchError):
            bundle.read("cover.json", "b")

    def test_missing_artifact_raises(self, tmp_path):
        with pytest.raises(ArtifactMismatchError):
            ArtifactBundle(tmp_path, "k0").read("cover.json", "a")

    def test_tampered_file_raises(self, tmp_path):
        bundle = ArtifactBundle(tmp_path, "k0")
        path = bundle.write("homology.json", {"betti": [1, 2, 1]}, key="h")
        path.write_text(path.read_text(encoding="utf-8").replace("2", "3"), encoding="utf-8")
        with pytest.raises(ArtifactMismatchError, match="改动"):
            bundle.read("homology.json", "h")

    def test_manifest_survives_config_change(self, tmp_path):
        ArtifactBundle(tmp_path, "k0", {"epsilon": 0.2}).write("critical_points.json", {"count": 4}, key="c")
        again = ArtifactBundle(tmp_path, "k1", {"epsilon": 0.1})
        assert again.has("critical_points.json", "c")
        assert again.manifest.config_key == "k1"

    def test_manifest_has_no_timestamps(self, tmp_path):
        bundle = ArtifactBundle(tmp_path, "k0", {"seed": 7})
        bundle.write("report.json", {"passed": True}, key="r")
        data = json.loads((tmp_path / "bundle.json").read_text(encoding="utf-8"))
        assert set(data) == {"schema", "version", "config_key", "config", "artifacts"}
        assert set(data["artifacts"]["report.json"]) == {"path", "key", "sha256"}

    def test_foreign_manifest_ignored(self, tmp_path):
        (tmp_path / "bundle.json").write_text(json.dumps({"schema": "other/9", "artifacts": {}}), encoding="utf-8")
        bundle = ArtifactBundle(tmp_path, "k0")
        assert bundle.names() == []

    def test_register_missing_file(self, tmp_path):
        with pytest.raises(ArtifactMismatchError):
            ArtifactBundle(tmp_path, "k0").register("scan_0.csv", "m")
