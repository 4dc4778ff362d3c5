"""Resolve subcommand coroutines and run them with an injected per-command logger."""

import importlib
import inspect
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Union

from commands import COMMANDS
from utils.errors import UsageError
from utils.logger.config import LogLevel
from utils.logger_factory import EnhancedLoggerFactory, log_exception


def resolve_command(name: str) -> Callable:
    """Translate a subcommand name into its ``run`` coroutine function.

    :param name: Subcommand such as ``synth`` or ``axis-demo``.
    :return: Coroutine function ``run`` of the command module.
    :raises UsageError: For an unknown subcommand.
    :raises TypeError: If the resolved callable is not async.
    """
    if name not in COMMANDS:
        raise UsageError(f"unknown command '{name}', expected one of {', '.join(COMMANDS)}")
    module_path = COMMANDS[name]
    fn = getattr(importlib.import_module(module_path), "run")
    if not inspect.iscoroutinefunction(fn):
        raise TypeError(f"command function must be async: {module_path}:run")
    return fn


async def run_command(
    name: str,
    kwargs: Optional[Dict[str, Any]] = None,
    *,
    log_dir: Union[str, Path, None] = None,
    enable_stdout: bool = False,
    level: LogLevel = LogLevel.INFO,
    as_json: bool = False,
) -> Any:
    """Resolve ``name``, open its logger and await the command.

    The logger is passed as ``logger=`` when the command accepts it.

    :param name: Subcommand name.
    :param kwargs: Keyword arguments forwarded to the command.
    :param log_dir: Base log directory; ``PAXKIT_LOG_DIR`` or ``logs`` when omitted.
    :param enable_stdout: Mirror log lines to stdout.
    :param level: Minimum log level recorded.
    :param as_json: Write the run log as JSON lines.
    :return: Whatever the command returns.
    :raises Exception: Re-raises command errors after logging them.
    """
    fn = resolve_command(name)
    sig = inspect.signature(fn)
    accepts_logger = ("logger" in sig.parameters) or any(
        p.kind == inspect.Parameter.VAR_KEYWORD for p in sig.parameters.values()
    )

    command_id = name.replace("-", "_")
    async with EnhancedLoggerFactory.command_run_logger(
        command_id, log_dir=log_dir, level=level, enable_stdout=enable_stdout, as_json=as_json
    ) as log:
        try:
            call_kwargs = dict(kwargs or {})
            if accepts_logger:
                call_kwargs.setdefault("logger", log)
            else:
                log.warning(f"command '{fn.__module__}.{fn.__qualname__}' has no 'logger' kwarg")
            log.debug(f"running {name} with {sorted(k for k in call_kwargs if k != 'logger')}")
            return await fn(**call_kwargs)
        except Exception as e:
            log_exception(log, e, context=f"command:{name}")
            raise
