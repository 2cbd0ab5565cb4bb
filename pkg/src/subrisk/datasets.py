"""The three worked examples bundled with the package."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .table import ProbTable, validate_table
from .tablefile import parse_table_text


@dataclass(frozen=True)
class Example:
    id: int
    name: str
    table: ProbTable
    n_values: tuple[int, ...]
    # ratios: four decimals for the uniform example, three for the rest
    ratio_digits: int = 3


def _read(name: str):
    return parse_table_text(resources.files(__package__).joinpath("data", name).read_text())


def uniform_table(rows: int = 100, cols: int = 2) -> ProbTable:
    return validate_table(np.full((rows, cols), 1.0 / (rows * cols)), "cols")


def breast_cancer(published: bool = False) -> ProbTable:
    """Malignancy by age group, columns known.

    By default built from the integer counts behind the published
    frequencies; ``published=True`` uses the rounded entries instead.
    """
    if published:
        return _read("breast_cancer.csv").to_table(renormalize=True)
    tf = _read("breast_cancer_counts.csv")
    return validate_table(tf.values / tf.values.sum(), tf.groups)


def household() -> ProbTable:
    return _read("household.csv").to_table(renormalize=True)


def load_example(example_id: int) -> Example:
    if example_id == 1:
        return Example(1, "uniform 100x2", uniform_table(), (100, 200, 300, 400, 500, 1000, 2000), 4)
    if example_id == 2:
        return Example(2, "breast cancer", breast_cancer(), (200, 400, 600, 800, 1000))
    if example_id == 3:
        return Example(3, "household", household(), (1000, 1500, 2000, 2500, 3000))
    raise ValueError(f"example id must be 1, 2 or 3, got {example_id!r}")
