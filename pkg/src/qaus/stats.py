"""Median-of-ensemble estimation with bootstrap error bars.

The reporting convention for noise ensembles: resample the ensemble
with replacement, record the median of each resample, and quote the
mean of those medians with an error bar of two standard deviations.
The bootstrap RNG lives in its own seed domain so that statistics
reproducibility never couples to the physics streams.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["BootstrapEstimate", "median", "bootstrap_median"]


@dataclass(frozen=True)
class BootstrapEstimate:
    mean_of_medians: float
    std_of_medians: float
    resamples: int
    sample_size: int

    @property
    def error_bar(self) -> float:
        return 2.0 * self.std_of_medians


def median(values) -> float:
    """Sample median; even counts take the midpoint of the central pair."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("median of empty input")
    return float(np.median(values))


def bootstrap_median(values, resamples: int = 1000, seed: int = 0) -> BootstrapEstimate:
    """Bootstrap the median: mean and std over resampled medians.

    Deterministic in the seed and invariant under permutation of the
    input (values are sorted before resampling).
    """
    values = np.sort(np.asarray(values, dtype=float))
    if values.size == 0:
        raise ValueError("bootstrap of empty input")
    if resamples < 1:
        raise ValueError(f"need at least one resample, got {resamples}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    idx = rng.integers(values.size, size=(resamples, values.size))
    medians = np.median(values[idx], axis=1)
    return BootstrapEstimate(
        mean_of_medians=float(medians.mean()),
        std_of_medians=float(medians.std()),
        resamples=resamples,
        sample_size=int(values.size),
    )
