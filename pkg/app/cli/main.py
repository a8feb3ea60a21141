"""conley-kit 命令行入口

    conley-kit <crit|conley|thicken|cover|homology|minimax|report> [flags]

每个子命令把 JSON 产物写进 --out 并打印到 stdout。退出码：0 全部通过，
1 有校验未通过，2 用法或配置错误（含前置条件不满足的 ConleyKitError）。
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

from app.config import APP_NAME, VERSION
from app.core.errors import ConleyKitError, InvalidParametersError
from app.core.utils import cache
from app.core.utils.logger import set_global_level, setup_logger
from app.pipeline import ArtifactBundle, PipelineContext, dumps, run_stage
from app.pipeline.nodes import KIND_NAMES

from .config_file import read_config_file
from .settings import RunConfig, build_run_config, load_runtime_settings

logger = setup_logger("cli")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

# 命令行参数 -> RunConfig 字段
_SHARED_FLAGS: Tuple[Tuple[str, Any, str], ...] = (
    ("--surface", str, "曲面描述，如 torus:R=2,r=1 / sphere:rho=1 / circle / rp2"),
    ("--field", str, "内置函数：height / cos-theta / cubic-circle / double-well"),
    ("--n", int, "每周期顶点数（球面映射为细分层数）"),
    ("--subdivisions", int, "RP² 的重心细分次数"),
    ("--epsilon", float, "Conley 对的能量窗口 ε"),
    ("--tau", float, "Conley 对的时间参数 τ（≥ 1）"),
    ("--h", float, "初始积分步长"),
    ("--h-min", float, "最小积分步长"),
    ("--delta-conv", float, "极限判定的梯度范数阈值"),
    ("--horizon", float, "积分时间上限"),
    ("--samples", int, "每项校验的抽样数"),
    ("--seed", int, "随机种子"),
    ("--crit", str, "临界点选择器：all / min / max / saddle / degenerate / 编号"),
    ("--out", Path, "产物输出目录"),
)
_FIELD_NAMES = tuple(flag.lstrip("-").replace("-", "_") for flag, _, _ in _SHARED_FLAGS)


def _shared_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("运行参数（覆盖 --config 中的同名键）")
    for flag, kind, text in _SHARED_FLAGS:
        group.add_argument(flag, type=kind, default=None, help=text)
    parent.add_argument("--config", type=Path, default=None, help="key=value 配置文件")
    parent.add_argument("--log-level", default=None, help="日志级别（DEBUG / INFO / WARNING / ERROR）")
    parent.add_argument("--export", action="store_true", help="同时写出 CSV / 文本导出")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=APP_NAME,
        description="闭曲面梯度流的 Conley 对、流加厚与 Lusternik-Schnirelmann 不等式",
    )
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {VERSION}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    shared = _shared_parser()

    sub.add_parser("crit", parents=[shared], help="列出临界点")
    sub.add_parser("conley", parents=[shared], help="构造并校验 Conley 对")
    for name, text in (("thicken", "构造加厚族"), ("cover", "检查加厚族的覆盖性质")):
        p = sub.add_parser(name, parents=[shared], help=text)
        p.add_argument("--kind", choices=sorted(KIND_NAMES), default="forward", help="加厚类型")
    sub.add_parser("homology", parents=[shared], help="Betti 数、杯长与从属数")
    p = sub.add_parser("minimax", parents=[shared], help="极小极大值 κ 表")
    p.add_argument("--band", default=None, help="能量带 a,b（缺省为整体情形）")
    p.add_argument("--no-recheck", action="store_true", help="跳过商复形复核")
    sub.add_parser("report", parents=[shared], help="不等式总表")
    return parser


def parse_band(text: Optional[str]) -> Optional[Tuple[float, float]]:
    """解析 --band a,b"""
    if text is None:
        return None
    parts = [p.strip() for p in text.split(",")]
    try:
        a, b = (float(p) for p in parts)
    except ValueError:
        raise InvalidParametersError(f"--band 需要 a,b 两个数，得到 {text!r}")
    if not a < b:
        raise InvalidParametersError(f"--band 需要 a < b，得到 {a:g},{b:g}")
    return a, b


def load_config(args: argparse.Namespace) -> RunConfig:
    """默认值 < --config 文件 < 命令行参数"""
    file_values = read_config_file(args.config) if args.config is not None else {}
    overrides = {name: getattr(args, name) for name in _FIELD_NAMES}
    return build_run_config(file_values, overrides)


def _stage_options(args: argparse.Namespace) -> Dict[str, Any]:
    options: Dict[str, Any] = {"export": args.export}
    if args.command in ("thicken", "cover"):
        options["kind"] = args.kind
    if args.command == "minimax":
        options["band"] = parse_band(args.band)
        options["recheck"] = not args.no_recheck
    return options


def _apply_runtime(args: argparse.Namespace) -> None:
    settings = load_runtime_settings()
    if not settings.cache:
        cache.disable_cache()
    name = args.log_level or settings.log_level
    if name:
        level = logging.getLevelName(str(name).upper())
        if not isinstance(level, int):
            raise InvalidParametersError(f"未知日志级别: {name!r}")
        set_global_level(level)
    logger.debug(f"线程上限 {settings.threads}，缓存 {'开' if cache.is_cache_enabled() else '关'}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        # --help / --version 返回 0，用法错误 argparse 已打印语法
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        _apply_runtime(args)
        config = load_config(args)
        options = _stage_options(args)
        bundle = ArtifactBundle(config.out, config.stage_key("report"), config.public_dict())
        ctx = PipelineContext(config=config, bundle=bundle)
        result = run_stage(ctx, args.command, **options)
    except ConleyKitError as e:
        logger.error(f"{args.command}: {e}")
        print(f"{APP_NAME} {args.command}: {e}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except Exception:
        logger.exception(f"{args.command} 运行失败")
        return EXIT_FAILED

    sys.stdout.write(dumps(result))
    sys.stdout.flush()
    return EXIT_OK if ctx.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
