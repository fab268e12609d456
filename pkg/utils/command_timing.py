import time
from functools import wraps
from typing import Callable

from utils import settings
from utils.errors import exit_code_for
from utils.logging import get_run_logger, get_run_stats, log_command_start, log_command_end, log_error


def timed_command(command: str, slow_threshold_s: float = settings.SLOW_COMMAND_THRESHOLD_S):
    """Wrap a subcommand body: log start/end/duration, map exceptions to exit codes.

    The wrapped function returns an exit code (or None for success); the
    wrapper always returns an int and never lets an exception escape.
    """
    def decorator(func: Callable[..., int]) -> Callable[..., int]:
        @wraps(func)
        def wrapper(*args, **kwargs) -> int:
            options = kwargs.get("options") or (args[0] if args and isinstance(args[0], dict) else {})
            command_info = log_command_start(command, options if isinstance(options, dict) else {})
            start_time = time.perf_counter()
            try:
                exit_code = func(*args, **kwargs) or 0
            except Exception as e:
                exit_code = exit_code_for(e)
                log_error(e, command, {
                    "duration_s": round(time.perf_counter() - start_time, 3),
                    "exit_code": exit_code,
                })
            duration_s = log_command_end(command_info, exit_code)
            get_run_logger().logger.debug(f"run stats: {get_run_stats()}")

            if duration_s > slow_threshold_s:
                get_run_logger().logger.warning(
                    f"🐌 SLOW COMMAND | {command} | Duration: {duration_s:.2f}s | "
                    f"Threshold: {slow_threshold_s}s"
                )
            return exit_code
        return wrapper
    return decorator
