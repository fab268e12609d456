import logging
import logging.handlers
import json
import time
from datetime import datetime
from pathlib import Path
from typing import Optional, Dict, Any

from utils import settings


class RunLogger:
    """Logger for CLI runs with command timing, training and sampling progress lines"""

    def __init__(self,
                 log_file: Optional[str] = settings.LOG_FILE,
                 max_file_size: int = settings.LOG_MAX_BYTES,
                 backup_count: int = settings.LOG_BACKUP_COUNT,
                 log_level: str = settings.LOG_LEVEL):

        self.log_file = log_file
        self.max_file_size = max_file_size
        self.backup_count = backup_count

        # Package loggers all hang below the root; configure it once here
        self.logger = logging.getLogger("aid")
        self.logger.setLevel(getattr(logging, log_level.upper()))
        root = logging.getLogger()
        root.setLevel(getattr(logging, log_level.upper()))

        # Remove existing handlers to avoid duplicates
        self.logger.handlers.clear()
        for handler in list(root.handlers):
            if getattr(handler, "_aid_handler", False):
                root.removeHandler(handler)

        formatter = logging.Formatter(
            '%(asctime)s | %(levelname)-8s | %(name)-20s | %(funcName)-15s | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

        # Console goes to stderr so stdout stays reserved for JSON metric lines
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        console_handler._aid_handler = True
        root.addHandler(console_handler)

        if log_file:
            Path(log_file).parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.handlers.RotatingFileHandler(
                log_file,
                maxBytes=max_file_size,
                backupCount=backup_count,
                encoding='utf-8'
            )
            file_handler.setFormatter(formatter)
            file_handler._aid_handler = True
            root.addHandler(file_handler)

        self.run_stats = {
            "commands": 0,
            "failures": 0,
            "train_steps": 0,
            "frames_done": 0,
            "start_time": time.time()
        }

        self.logger.debug(f"Logging initialized | level={log_level} | file={log_file or '-'}")

    def log_command_start(self, command: str, options: Dict[str, Any]) -> Dict[str, Any]:
        """Log the start of a subcommand and return the bookkeeping record"""
        command_info = {
            "command": command,
            "seed": options.get("seed"),
            "timestamp": datetime.now().isoformat(),
            "started": time.perf_counter(),
        }
        self.logger.info(f"🔵 COMMAND START | {command} | seed={options.get('seed')}")
        return command_info

    def log_command_end(self, command_info: Dict[str, Any], exit_code: int = 0):
        """Log the end of a subcommand with its duration"""
        duration_s = time.perf_counter() - command_info["started"]
        self.run_stats["commands"] += 1
        if exit_code != 0:
            self.run_stats["failures"] += 1
        status_emoji = "✅" if exit_code == 0 else "❌"
        self.logger.info(
            f"{status_emoji} COMMAND END | {command_info['command']} | "
            f"Duration: {duration_s:.2f}s | Exit: {exit_code}"
        )
        return duration_s

    def log_train_progress(self, step: int, loss: float, smoothed: float, grad_norm: float):
        """Log a training step"""
        self.run_stats["train_steps"] = step
        self.logger.info(
            f"📉 TRAIN | step={step} | loss={loss:.6f} | smoothed={smoothed:.6f} | grad_norm={grad_norm:.4g}"
        )

    def log_frame_done(self, frame: int, samples: int, duration_s: float):
        """Log a reconstructed or generated frame"""
        self.run_stats["frames_done"] += 1
        self.logger.info(f"🖼️ FRAME | n={frame} | samples={samples} | Duration: {duration_s:.2f}s")

    def log_error(self, error: Exception, command: str, extra_context: Optional[Dict] = None):
        """Log errors with context"""
        context = f" | Context: {json.dumps(extra_context, default=str)}" if extra_context else ""
        self.logger.error(
            f"💥 ERROR | {command} | {type(error).__name__}: {str(error)}{context}",
            exc_info=self.logger.isEnabledFor(logging.DEBUG)
        )

    def get_run_stats(self) -> Dict[str, Any]:
        """Get counters for this process"""
        return {
            "commands": self.run_stats["commands"],
            "failures": self.run_stats["failures"],
            "train_steps": self.run_stats["train_steps"],
            "frames_done": self.run_stats["frames_done"],
            "uptime_s": round(time.time() - self.run_stats["start_time"], 2),
            "log_file": self.log_file,
        }


_run_logger: Optional[RunLogger] = None


def get_run_logger() -> RunLogger:
    global _run_logger
    if _run_logger is None:
        _run_logger = RunLogger()
    return _run_logger


def configure(log_level: Optional[str] = None, log_file: Optional[str] = None) -> RunLogger:
    """Rebuild the process logger, e.g. after CLI flags override the environment"""
    global _run_logger
    _run_logger = RunLogger(
        log_file=log_file or settings.LOG_FILE,
        log_level=log_level or settings.LOG_LEVEL,
    )
    return _run_logger


# Convenience functions for easy usage
def log_command_start(command: str, options: Dict[str, Any]):
    return get_run_logger().log_command_start(command, options)

def log_command_end(command_info: Dict[str, Any], exit_code: int = 0):
    return get_run_logger().log_command_end(command_info, exit_code)

def log_train_progress(step: int, loss: float, smoothed: float, grad_norm: float):
    get_run_logger().log_train_progress(step, loss, smoothed, grad_norm)

def log_frame_done(frame: int, samples: int, duration_s: float):
    get_run_logger().log_frame_done(frame, samples, duration_s)

def log_error(error: Exception, command: str, extra_context: Optional[Dict] = None):
    get_run_logger().log_error(error, command, extra_context)

def get_run_stats():
    return get_run_logger().get_run_stats()
