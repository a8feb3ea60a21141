"""Pipeline 测试共享 fixtures"""

import pytest

from app.cli.settings import build_run_config
from app.pipeline import ArtifactBundle, PipelineContext

CIRCLE = {"surface": "circle", "field": "cos-theta"}


@pytest.fixture
def make_ctx(tmp_path):
    """按给定配置构造上下文，产物写进 tmp_path/out"""

    def _make(bundle: bool = True, **values) -> PipelineContext:
        config = build_run_config({"out": tmp_path / "out", **values})
        store = ArtifactBundle(config.out, config.stage_key("report"), config.public_dict()) if bundle else None
        return PipelineContext(config=config, bundle=store)

    return _make


@pytest.fixture
def circle_ctx(make_ctx):
    return lambda **kw: make_ctx(**{**CIRCLE, **kw})
