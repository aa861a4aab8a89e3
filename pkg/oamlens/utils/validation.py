"""
Validation helpers for the command layer

pydantic errors are reported as "field -> message" lines and mapped to exit codes:
validation and domain errors exit 2, anything unexpected exits 1.
"""
import functools
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Type, TypeVar

import click
from pydantic import BaseModel, ValidationError

from ..core.exceptions import ConfigError, OamLensError

logger = logging.getLogger(__name__)

RunModel = TypeVar("RunModel", bound=BaseModel)


def _given(value: Any) -> bool:
    if value is None or value is False:
        return False
    return not (isinstance(value, (tuple, list)) and not value)


def format_validation_errors(exc: ValidationError) -> List[str]:
    """
    Format pydantic errors for better readability

    Returns:
        每个错误一行："field -> message"
    """
    lines = []
    for error in exc.errors():
        field = " -> ".join(str(loc) for loc in error["loc"]) or "config"
        lines.append(f"{field} -> {error['msg']}")
    return lines


def load_run_config(path: str, model: Type[RunModel]) -> RunModel:
    """
    读取 JSON 运行配置并校验

    Raises:
        ConfigError: 文件不可读或不是合法 JSON
        ValidationError: 字段校验失败（含未知键）
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}", {"path": path}) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc.msg}", {"path": path, "line": exc.lineno}) from exc
    logger.info(f"📥 Loaded run config {path}")
    return model.model_validate(data)


def reject_mixed(config: str, flags: Dict[str, Any]) -> None:
    """--config 与参数选项互斥"""
    given = sorted(name for name, value in flags.items() if _given(value))
    if config and given:
        raise click.UsageError(f"--config cannot be combined with: {', '.join('--' + g.replace('_', '-') for g in given)}")


def command_errors(func: Callable) -> Callable:
    """Map domain and validation failures of a click command to exit codes"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ValidationError as exc:
            errors = format_validation_errors(exc)
            logger.error(f"❌ Validation error: {errors}")
            click.echo("Error: invalid parameters", err=True)
            for line in errors:
                click.echo(f"  {line}", err=True)
            sys.exit(2)
        except OamLensError as exc:
            logger.error(f"❌ {type(exc).__name__}: {exc}")
            click.echo(f"Error: {exc}", err=True)
            sys.exit(exc.exit_code)
        except (click.ClickException, click.Abort, click.exceptions.Exit):
            raise
        except Exception as exc:
            logger.exception(f"❌ Unexpected error: {exc}")
            click.echo(f"Unexpected error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _prune(data: Dict[str, Any]) -> Dict[str, Any]:
    pruned = {}
    for key, value in data.items():
        if isinstance(value, dict):
            value = _prune(value)
            if not value:
                continue
        if not _given(value):
            continue
        pruned[key] = value
    return pruned


def build_run_config(
    model: Type[RunModel],
    config_path: Optional[str],
    flags: Dict[str, Any],
    out: Optional[str] = None,
    output_format: Optional[str] = None,
    data: Optional[Dict[str, Any]] = None
) -> RunModel:
    """
    由 --config 文件或命令行选项构造运行配置

    Args:
        model: RunConfig 模型
        config_path: --config 路径
        flags: 参数选项（未给出的为 None/False）
        out: --out
        output_format: --format
        data: 选项映射到模型字段后的嵌套字典，默认即 flags

    Raises:
        click.UsageError: --config 与参数选项混用，或 --out/--format 与配置文件重复
    """
    reject_mixed(config_path, flags)
    if config_path:
        run = load_run_config(config_path, model)
        overrides = {}
        for name, value in (("out", out), ("format", output_format)):
            if value is None:
                continue
            if name in run.model_fields_set:
                raise click.UsageError(f"--{name} is also set in the config file")
            overrides[name] = value
        if not overrides:
            return run
        return model.model_validate({**run.model_dump(exclude_unset=True), **overrides})

    payload = _prune(data if data is not None else flags)
    if out is not None:
        payload["out"] = out
    if output_format is not None:
        payload["format"] = output_format
    return model.model_validate(payload)
