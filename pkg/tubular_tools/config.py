import os

from pydantic import BaseModel, ValidationError, field_validator

from .errors import InputError
from .graph import _input_error

EXPAND_LIMIT_ENV = "TUBULAR_EXPAND_LIMIT"


class TubularConfig(BaseModel):
    expand_limit: int = 1_000_000  # wall vertices + wall edges
    quotient_n_max: int = 4  # largest symmetric group degree
    workers: int = 1  # processes, 1 runs inline
    up_to_conjugacy: bool = False
    log_level: str = "WARNING"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, v: str):
        if v.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {v!r}")
        return v.upper()

    @classmethod
    def load(cls, path: str | None = None) -> "TubularConfig":
        """Read a JSON config file (defaults when path is None), then apply environment overrides."""
        if path is None:
            cfg = cls()
        else:
            with open(path, "r") as f:
                try:
                    cfg = cls.model_validate_json(f.read())
                except ValidationError as err:
                    raise _input_error(err, f"config {path}") from None
        return cfg.from_env()

    def from_env(self) -> "TubularConfig":
        limit = os.environ.get(EXPAND_LIMIT_ENV)
        if limit is None:
            return self
        try:
            return self.model_copy(update={"expand_limit": int(limit)})
        except ValueError:
            raise InputError(f"{EXPAND_LIMIT_ENV} must be an integer, got {limit!r}") from None


class SuiteConfig(BaseModel):
    n_trees: int = 200
    max_vertices: int = 6
    entry_range: tuple[int, int] = (-5, 5)  # inclusive, zero skipped
    seed: int = 0
    expand_limit: int = 1_000_000
    workers: int = 1
