import os

from dotenv import load_dotenv

load_dotenv()


def _flag(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() not in {"0", "false", "no", "off", ""}


LOG_LEVEL = os.getenv("KASGCN_LOG_LEVEL", "INFO").upper()
OUTPUT_DIR = os.getenv("KASGCN_OUTPUT_DIR", "runs")
JOBS = int(os.getenv("KASGCN_JOBS", "1"))
PROGRESS = _flag("KASGCN_PROGRESS", "0")
