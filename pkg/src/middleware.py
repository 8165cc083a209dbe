"""Middleware — tool logging and canonical-matrix guardrail.

Both are decorators applied to the command-level tools in ``src.tools``;
the tool bodies stay free of logging and precondition plumbing.
"""

from __future__ import annotations

import functools
import inspect
import logging
import time
from collections.abc import Callable
from typing import Any, TypeVar

from src.errors import CanonicityError
from src.gf2poly import PolyMatrix, is_canonical

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


def _result_size(result: Any) -> int:
    if result is None:
        return 0
    if hasattr(result, "model_dump_json"):
        return len(result.model_dump_json())
    return len(str(result))


def tool_logging(fn: F) -> F:
    """Log every tool call: name, arguments, duration, and result size."""
    name = fn.__name__

    def _done(start: float, result: Any) -> None:
        logger.info(
            "[ToolLog] %s completed in %.3fs  result=%d chars",
            name,
            time.perf_counter() - start,
            _result_size(result),
        )

    if inspect.iscoroutinefunction(fn):

        @functools.wraps(fn)
        async def async_wrapper(*args: Any, **kwargs: Any) -> Any:
            logger.info("[ToolLog] CALLING %s  args=%s kwargs=%s", name, args, kwargs)
            start = time.perf_counter()
            result = await fn(*args, **kwargs)
            _done(start, result)
            return result

        return async_wrapper  # type: ignore[return-value]

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        logger.info("[ToolLog] CALLING %s  args=%s kwargs=%s", name, args, kwargs)
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        _done(start, result)
        return result

    return wrapper  # type: ignore[return-value]


def canonical_guardrail(*arg_names: str) -> Callable[[F], F]:
    """Block a tool whose named matrix arguments are not canonical.

    Arguments may be ``PolyMatrix`` objects or matrix text. The call is
    rejected with CanonicityError before the tool body runs.
    """

    def decorate(fn: F) -> F:
        signature = inspect.signature(fn)

        def check(args: tuple, kwargs: dict) -> None:
            bound = signature.bind_partial(*args, **kwargs)
            for arg in arg_names:
                value = bound.arguments.get(arg)
                if value is None:
                    continue
                matrix = value if isinstance(value, PolyMatrix) else PolyMatrix.parse(value)
                report = is_canonical(matrix)
                if not report.canonical:
                    msg = f"BLOCKED: {fn.__name__} needs a canonical {arg}"
                    logger.warning("[Guardrail] %s: %s", msg, report.diagnostic)
                    raise CanonicityError(msg, report.diagnostic)

        if inspect.iscoroutinefunction(fn):

            @functools.wraps(fn)
            async def async_wrapper(*args: Any, **kwargs: Any) -> Any:
                check(args, kwargs)
                return await fn(*args, **kwargs)

            return async_wrapper  # type: ignore[return-value]

        @functools.wraps(fn)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            check(args, kwargs)
            return fn(*args, **kwargs)

        return wrapper  # type: ignore[return-value]

    return decorate
