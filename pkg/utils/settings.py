import os

from dotenv import load_dotenv

load_dotenv(override=True)


def _env_flag(name: str, default: str = "0") -> bool:
    return os.getenv(name, default).strip().lower() in {"1", "true", "yes", "on"}


LOG_LEVEL = os.getenv("AID_LOG_LEVEL", "INFO")
LOG_FILE = os.getenv("AID_LOG_FILE") or None
LOG_MAX_BYTES = int(os.getenv("AID_LOG_MAX_BYTES", str(10 * 1024 * 1024)))  # 10MB
LOG_BACKUP_COUNT = int(os.getenv("AID_LOG_BACKUP_COUNT", "5"))
DEFAULT_THREADS = int(os.getenv("AID_THREADS", "1"))
SHOW_PROGRESS = _env_flag("AID_PROGRESS")
SLOW_COMMAND_THRESHOLD_S = float(os.getenv("AID_SLOW_COMMAND_S", "600"))
