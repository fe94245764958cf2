#!/usr/bin/env python3
"""
Runtime settings for antimatroid-heapsort
Limits and measured-constant ceilings, read from the environment (and .env)
"""

import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field


class Settings(BaseModel):
    """Tunable limits shared by the library, the CLI and the bench suites"""
    bf_limit: int = Field(default=10, ge=0, le=20)
    rotation_count_limit: int = Field(default=14, ge=1, le=24)
    heap_ceiling: float = Field(default=8.0, gt=0)
    plain_ceiling: float = Field(default=8.0, gt=0)
    optimal_ceiling: float = Field(default=12.0, gt=0)


def _from_environment() -> Settings:
    load_dotenv()
    return Settings(
        bf_limit=os.getenv("ANTISORT_BF_LIMIT", "10"),
        rotation_count_limit=os.getenv("ANTISORT_ROTATION_COUNT_LIMIT", "14"),
        heap_ceiling=os.getenv("ANTISORT_HEAP_CEILING", "8.0"),
        plain_ceiling=os.getenv("ANTISORT_PLAIN_CEILING", "8.0"),
        optimal_ceiling=os.getenv("ANTISORT_OPTIMAL_CEILING", "12.0"),
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings (cached)"""
    return _from_environment()


def reload_settings() -> Settings:
    """Drop the cached settings and read the environment again"""
    get_settings.cache_clear()
    return get_settings()


def resolve_limit(limit):
    """Explicit limit wins; None falls back to the configured brute-force limit"""
    return get_settings().bf_limit if limit is None else limit
