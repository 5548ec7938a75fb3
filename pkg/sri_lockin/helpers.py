#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - Helper functions."""

import csv
import json
import math
import os
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .const import (
    DEFAULT_SEED,
    HAUSDORFF_DIRS_2D,
    HAUSDORFF_DIRS_3D,
    HAUSDORFF_DIRS_ND,
)
from .exceptions import DimensionMismatchError

CSV_FLOAT_FMT = ".17g"


def as_point(value, dim: Optional[int] = None) -> np.ndarray:
    """Return a value as a finite 1-D float array (optionally of a given dimension)."""

    point = np.atleast_1d(np.asarray(value, dtype=float))
    if point.ndim != 1:
        raise DimensionMismatchError(f"a point must be 1-D, not {point.shape}")
    if dim is not None and point.shape[0] != dim:
        raise DimensionMismatchError(f"expected d={dim}, got d={point.shape[0]}")
    if not np.all(np.isfinite(point)):
        raise DimensionMismatchError(f"non-finite coordinates: {point}")
    return point


def substream_rng(seed: Optional[int], *keys: int) -> np.random.Generator:
    """Return a counter-based generator for the substream (seed, *keys).

    The substream is keyed as SeedSequence(seed, spawn_key=keys), so trial i of a run
    with base seed s always draws from the same Philox stream, whatever the order (or
    the worker) in which the trials are executed.
    """

    seq = np.random.SeedSequence(
        entropy=DEFAULT_SEED if seed is None else int(seed),
        spawn_key=tuple(int(k) for k in keys),
    )
    return np.random.Generator(np.random.Philox(seq))


@lru_cache(maxsize=64)
def _direction_grid(dim: int, count: int) -> np.ndarray:
    if dim == 1:
        return np.array([[1.0], [-1.0]])

    if dim == 2:
        theta = 2 * np.pi * np.arange(count) / count
        return np.column_stack((np.cos(theta), np.sin(theta)))

    if dim == 3:  # Fibonacci lattice
        idx = np.arange(count) + 0.5
        z = 1 - 2 * idx / count
        rho = np.sqrt(1 - z**2)
        phi = np.pi * (1 + 5**0.5) * idx
        return np.column_stack((rho * np.cos(phi), rho * np.sin(phi), z))

    dirs = substream_rng(DEFAULT_SEED, dim, count).standard_normal((count, dim))
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def direction_grid(dim: int, count: Optional[int] = None) -> np.ndarray:
    """Return a deterministic (count, dim) array of unit directions.

    d=1: {+1, -1}; d=2: equally spaced angles; d=3: a Fibonacci lattice; d>3: a seeded
    Gaussian sample, normalised. The default density is the Hausdorff grid's.
    """

    if count is None:
        count = {2: HAUSDORFF_DIRS_2D, 3: HAUSDORFF_DIRS_3D}.get(dim, HAUSDORFF_DIRS_ND)
    grid = _direction_grid(int(dim), int(count))
    grid.flags.writeable = False
    return grid


def ball_grid(center: np.ndarray, radius: float, n_samples: int) -> np.ndarray:
    """Return a deterministic sample of the closed ball, centre & boundary included.

    d=1: n_samples equally spaced points (made odd, so the centre is a sample).
    d>1: the centre plus shells at radius k/S (k=1..S) of n_samples directions each.
    """

    center = np.asarray(center, dtype=float)
    dim = center.shape[0]

    if dim == 1:
        count = n_samples + (1 - n_samples % 2)
        return center + radius * np.linspace(-1.0, 1.0, count)[:, None]

    shells = max(1, int(math.ceil(n_samples ** (1 / dim))))
    dirs = direction_grid(dim, max(n_samples, 2 * dim))
    points = [center[None, :]]
    for k in range(1, shells + 1):
        points.append(center + radius * k / shells * dirs)
    return np.vstack(points)


def fmt_float(value) -> str:
    """Format a number with 17 significant digits (round-trips any double)."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), CSV_FLOAT_FMT)


def to_jsonable(obj):
    """Return obj with numpy arrays, scalars & enums turned into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):  # Enum
        return obj.value
    return obj


def write_json(data: dict, out_path: str) -> None:
    """Write a (numpy-aware) dict as indented JSON."""
    os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
    with open(out_path, "w") as f:
        json.dump(to_jsonable(data), f, indent=2, sort_keys=False)
        f.write("\n")


def write_csv(rows: Iterable[dict], out_path: str, header: Sequence[str]) -> int:
    """Write dict rows as CSV ('.' decimal, 17 significant digits); return the count."""

    os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
    count = 0
    with open(out_path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(header), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {
                    k: v if isinstance(v, str) else fmt_float(v)
                    for k, v in row.items()
                }
            )
            count += 1
    return count


def coord_names(prefix: str, dim: int) -> List[str]:
    return [f"{prefix}_{i}" for i in range(dim)]
