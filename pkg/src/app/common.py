"""Common data structures for the command line and the sweeps."""

from dataclasses import dataclass, field
from datetime import datetime
import logging
import logging.config
from typing import Any, Generator

import yaml

APP_START_TIME = datetime.now()
DEFAULT_SEED = 20240611

SUITES = (
    "grr",
    "euler",
    "twist",
    "hodge",
    "threshold",
    "strata",
    "canonical",
    "monad",
    "cohom",
)


@dataclass
class SweepConfig:
    """Sample counts and suite selection for `sweep`."""

    seed: int = DEFAULT_SEED
    hodge_samples: int = 1000
    cohom_samples: int = 200
    canon_seeds: int = 50
    canon_group_elements: int = 20
    monad_samples: int = 500
    monad_seeds: int = 20
    max_twist: int = 3
    max_rank: int = 5
    max_chern_rank: int = 4
    max_c2: int = 8
    suites: list[str] = field(default_factory=list)

    def selected_suites(self) -> list[str]:
        """Return the suites to run; an empty list means all of them."""
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ValueError(f"unknown suites: {unknown}")
        return list(self.suites) or list(SUITES)

    def get_twist_cases(self) -> tuple[Generator[tuple[int, int], None, None], int]:
        """Return the (a, b) pairs with 0 <= a <= b <= max_twist and their count."""
        m = self.max_twist
        gen = ((a, b) for a in range(m + 1) for b in range(a, m + 1))
        return gen, (m + 1) * (m + 2) // 2

    def get_rank_cases(self) -> tuple[Generator[tuple[int, int], None, None], int]:
        """Return the (r, n) pairs with 2 <= r <= n <= max_rank and their count."""
        m = self.max_rank
        gen = ((r, n) for r in range(2, m + 1) for n in range(r, m + 1))
        return gen, (m - 1) * m // 2

    def get_chern_cases(self) -> tuple[Generator[tuple[int, int], None, None], int]:
        """Return the (r, n) pairs with 2 <= r <= max_chern_rank, r <= n <= max_c2."""
        top, m = self.max_chern_rank, self.max_c2
        gen = ((r, n) for r in range(2, top + 1) for n in range(r, m + 1))
        return gen, sum(max(0, m - r + 1) for r in range(2, top + 1))


@dataclass
class OutputConfig:
    """How reports are written."""

    table: bool = False
    indent: bool = True


DEFAULT_LOGGING: dict[str, Any] = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {"format": "%(asctime)s|%(name)s|%(levelname)s|%(message)s"},
        "ecs": {"()": "ecs_logging.StdlibFormatter"},
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "level": "WARNING",
            "formatter": "simple",
            "stream": "ext://sys.stderr",
        },
    },
    "root": {"level": "DEBUG", "handlers": ["console"]},
}


def configure_logging(
    conf: dict[str, Any] | None = None,
    log_format: str | None = None,
    level: str | None = None,
) -> None:
    """Apply a logging dictionary, optionally overriding format and console level."""
    logging_conf = dict(conf or DEFAULT_LOGGING)
    handlers = {k: dict(v) for k, v in logging_conf.get("handlers", {}).items()}
    console = handlers.get("console")
    if console is not None:
        if log_format is not None:
            console["formatter"] = log_format
        if level is not None:
            console["level"] = level.upper()
    logging_conf["handlers"] = handlers
    logging.config.dictConfig(logging_conf)


@dataclass
class AppConfig:
    """Everything read from a configuration file."""

    sweep: SweepConfig
    output: OutputConfig
    logging: dict[str, Any] | None = None


def load_config(path: str | None) -> AppConfig:
    """Read a YAML configuration; missing sections fall back to defaults."""
    if path is None:
        return AppConfig(SweepConfig(), OutputConfig())
    with open(path) as fh:
        conf = yaml.safe_load(fh) or {}
    return AppConfig(
        sweep=SweepConfig(**conf.get("sweep", {})),
        output=OutputConfig(**conf.get("output", {})),
        logging=conf.get("logging"),
    )


class PerfTimer:
    """Log the run interval and up time of a block."""

    def __init__(self, app_start_time: datetime, logger: logging.Logger):
        """Initialize a PerfTimer object."""
        self.app_start_time = app_start_time
        self.logger = logger

    def __enter__(self) -> "PerfTimer":
        """Start the timer."""
        self.start = datetime.now()
        return self

    def __exit__(self, exc_type, exc_value, traceback) -> None:  # type:ignore
        """Stop the timer."""
        self.end = datetime.now()
        self.logger.info("run interval: %s", self.end - self.start)
        self.logger.info("up time: %s", self.end - self.app_start_time)
        self.logger.info("last run time: %s", self.end.strftime("%Y-%m-%d %H:%M:%S"))
