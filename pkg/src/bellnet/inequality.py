"""Subset-correlator spectra and the star-network Bell inequality.

The central object is the spectrum of signed, setting-averaged full
correlators indexed by subsets of branch positions.  For a subset mask X
the entry is

    2^-T sum_x sign(x, X) sum_{a,b} (-1)^(b + weight(a)) P(a, b | x, y_X)

where T is the total branch-observer count, ``sign`` flips with the
parity of the settings chosen inside X (truncated per source on uneven
networks) and y_X is the center-observer setting assigned to X by an
explicit map.  Classical models obey

    sum_X |entry_X|^(1/n)  <=  classical_bound(config)

with bound 1 when all sources have the same branch count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .network import (
    NetworkConfig,
    bob_setting_bit,
    subset_setting_mask,
    subsets_of,
)
from .quantum import CorrelationTable, MeasurementScheme, network_table, scheme_setting_map

_ENTRY_TOL = 1e-9


def parity_signs(width: int) -> np.ndarray:
    """Vector of (-1)**bit_count(i) for all words i of the given width."""
    signs = np.ones(1)
    for _ in range(width):
        signs = np.concatenate([signs, -signs])
    return signs


@dataclass(frozen=True, eq=False)
class SubsetSpectrum:
    """Correlator entries for every subset mask, plus the map that chose
    the center setting per subset (None when no table was involved)."""

    config: NetworkConfig
    entries: np.ndarray  # (2**max_branch,)
    setting_map: np.ndarray | None = None

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.float64)
        object.__setattr__(self, "entries", entries)
        if entries.shape != (1 << self.config.max_branch,):
            raise ValueError("spectrum length does not match the branch count")
        if np.abs(entries).max() > 1.0 + _ENTRY_TOL:
            raise ValueError("correlator entry outside [-1, 1]")
        if self.setting_map is not None:
            smap = np.asarray(self.setting_map)
            object.__setattr__(self, "setting_map", smap)
            if smap.shape != entries.shape:
                raise ValueError("setting map length does not match the spectrum")

    def entry(self, mask: int) -> float:
        return float(self.entries[mask])

    def as_dict(self) -> dict[int, float]:
        return {mask: float(v) for mask, v in enumerate(self.entries)}


def table_correlators(table: CorrelationTable) -> np.ndarray:
    """Full correlators (outcome-parity expectations), one per (x, y)."""
    sa = parity_signs(table.config.total)
    return np.einsum("xyab,a,b->xy", table.values, sa, np.array([1.0, -1.0]))


def truncated_spectrum(table: CorrelationTable, setting_map) -> SubsetSpectrum:
    """Spectrum with per-source truncation of each subset.

    Sources with fewer branches than the subset mask addresses ignore the
    excess positions; on even networks this reduces to the plain spectrum.
    """
    config = table.config
    setting_map = np.asarray(setting_map)
    if setting_map.shape != (1 << config.max_branch,):
        raise ValueError("need one center setting per subset mask")
    if setting_map.min() < 0 or setting_map.max() >= table.n_bob_settings:
        raise ValueError("setting map refers to a missing center setting")
    corr = table_correlators(table)
    dim = 1 << config.total
    words = np.arange(dim)
    entries = np.empty(1 << config.max_branch)
    for mask in subsets_of(config.max_branch):
        word = subset_setting_mask(mask, config)
        signs = parity_signs(config.total) if word == dim - 1 else _mask_signs(words, word)
        entries[mask] = signs @ corr[:, setting_map[mask]] / dim
    return SubsetSpectrum(config, entries, setting_map)


def _mask_signs(words: np.ndarray, word: int) -> np.ndarray:
    masked = words & word
    weights = np.zeros_like(words)
    while word:
        bit = word & -word
        weights += (masked & bit) != 0
        word ^= bit
    return np.where(weights & 1, -1.0, 1.0)


def subset_spectrum(table: CorrelationTable, setting_map) -> SubsetSpectrum:
    """Spectrum for an even network (every source the same branch count)."""
    if not table.config.is_homogeneous():
        raise ValueError("uneven network: use truncated_spectrum")
    return truncated_spectrum(table, setting_map)


def bell_value(spectrum: SubsetSpectrum) -> float:
    """sum_X |entry_X|**(1/n)."""
    n = spectrum.config.n
    return float((np.abs(spectrum.entries) ** (1.0 / n)).sum())


def classical_bound(config: NetworkConfig) -> float:
    """Largest Bell value any classical model can reach.

    1 for even networks; 2**Lmax * 2**(-sum(L_j)/n) in general.
    """
    return 2.0 ** config.max_branch * 2.0 ** (-sum(config.branches) / config.n)


def predicted_quantum_value(config: NetworkConfig, kind: str) -> float:
    """Closed-form Bell value of GHZ sources under the named scheme."""
    if kind == "xy":
        if not config.is_homogeneous():
            raise ValueError("the xy scheme has no closed form on uneven networks")
        return 2.0 ** (config.max_branch // 2)
    if kind == "rotated":
        s = sum(config.branches)
        return 2.0 ** config.max_branch * 2.0 ** (-s / (2.0 * config.n))
    raise ValueError(f"unknown scheme kind {kind!r}")


def critical_visibility(config: NetworkConfig) -> float:
    """Total network visibility below which no violation is possible.

    2**(-sum(L_j)/2); the rotated scheme attains this threshold.
    """
    return 2.0 ** (-sum(config.branches) / 2.0)


def find_critical_visibility(
    config: NetworkConfig, scheme: MeasurementScheme, tol: float = 1e-6
):
    """Locate the violation threshold by bisection on simulated tables.

    The total visibility V is split evenly as V**(1/n) per source; each
    probe simulates the noisy network from scratch.  Returns None when the
    noiseless value does not exceed the classical bound.
    """
    smap = scheme_setting_map(scheme)
    bound = classical_bound(config)

    def value_at(total: float) -> float:
        per_source = total ** (1.0 / config.n)
        table = network_table(scheme, (per_source,) * config.n)
        return bell_value(truncated_spectrum(table, smap))

    if value_at(1.0) <= bound + 1e-9:
        return None
    lo, hi = 0.0, 1.0
    while hi - lo > tol / 4:
        mid = (lo + hi) / 2
        if value_at(mid) > bound:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def contribution_count(size: int, residue: int) -> int:
    """Number of setting words of the given length whose weight is ≡
    ``residue`` (mod 4); only residues 0 and 3 occur in the analysis.

    Evaluates both the binomial sum and its trigonometric closed form and
    checks that they agree before returning.
    """
    exact = _contribution_sum(size, residue)
    closed = contribution_count_closed_form(size, residue)
    if abs(closed - exact) > 1e-6:
        raise ArithmeticError(
            f"count mismatch at size={size}, residue={residue}: {exact} vs {closed}"
        )
    return exact


def _contribution_sum(size: int, residue: int) -> int:
    if size < 1:
        raise ValueError("size must be at least 1")
    if residue not in (0, 3):
        raise ValueError("residue must be 0 or 3")
    return sum(comb(size, k) for k in range(residue, size + 1, 4))


def contribution_count_closed_form(size: int, residue: int) -> float:
    """Trigonometric closed form of :func:`contribution_count`."""
    if residue not in (0, 3):
        raise ValueError("residue must be 0 or 3")
    half = 2.0 ** (size / 2.0)
    quarter = math.pi * size / 4.0
    parity = -1.0 if size & 1 else 1.0
    if residue == 0:
        inner = half + math.cos(quarter) + parity * math.cos(3 * quarter)
    else:
        inner = half - math.sin(quarter) + parity * math.sin(3 * quarter)
    return inner * half / 4.0


def correlator_expansion_coefficient(size: int, cardinality: int, k: int) -> int:
    """Coefficient of t**k in (1+t)**(size-cardinality) * (1-t)**cardinality.

    These weight the cosine harmonics when the subset correlator of a
    one-source experiment is expanded over common measurement angles.
    """
    if not 0 <= cardinality <= size:
        raise ValueError("cardinality must lie in 0..size")
    if not 0 <= k <= size:
        raise ValueError("k must lie in 0..size")
    return sum(
        (-1) ** s * comb(size - cardinality, k - s) * comb(cardinality, s)
        for s in range(0, min(cardinality, k) + 1)
        if k - s <= size - cardinality
    )


def sweep_value(theta0: float, theta1: float, size: int) -> float:
    """Bell value when every branch observer measures at (theta0, theta1).

    Closed-form evaluation through the harmonic expansion; entries depend
    only on subset cardinality, so subsets enter with binomial
    multiplicity.  The result is the same for every source count because
    per-source factors are identical.
    """
    total = 0.0
    for c in range(size + 1):
        y = bob_setting_bit((1 << c) - 1, size)
        acc = 0.0
        for k in range(size + 1):
            beta = correlator_expansion_coefficient(size, c, k)
            if beta:
                acc += beta * math.cos(k * theta1 + (size - k) * theta0 + math.pi * y / 2)
        total += comb(size, c) * abs(acc) / 2.0 ** size
    return total


def diagonal_sweep_closed_form(theta: float, size: int) -> float:
    """Conjectured value of the sweep along theta1 = pi/2 - theta0.

    2**floor(L/2) * cos(theta)**L on [0, pi/4], the sine branch beyond;
    checked numerically for L <= 6, unproven in general.
    """
    scale = 2.0 ** (size // 2)
    edge = math.cos(theta) if theta <= math.pi / 4 else math.sin(theta)
    return scale * edge ** size


def single_experiment_value(correlators, setting_map) -> float:
    """Bell value of a one-source experiment given its raw correlators.

    ``correlators[x, y]`` is the full-correlator of the branch outcomes
    and the center outcome at branch settings x and center setting y.
    With one branch this is the CHSH expression; with two, Mermin's.
    """
    corr = np.asarray(correlators, dtype=np.float64)
    if corr.ndim != 2 or corr.shape[0] & (corr.shape[0] - 1):
        raise ValueError("correlators must have shape (2**L, settings)")
    size = corr.shape[0].bit_length() - 1
    setting_map = np.asarray(setting_map)
    if setting_map.shape != (corr.shape[0],):
        raise ValueError("need one center setting per subset mask")
    if setting_map.min() < 0 or setting_map.max() >= corr.shape[1]:
        raise ValueError("setting map refers to a missing center setting")
    words = np.arange(corr.shape[0])
    total = 0.0
    for mask in subsets_of(size) if size else [0]:
        signs = _mask_signs(words, mask) if mask else np.ones(corr.shape[0])
        total += abs(signs @ corr[:, setting_map[mask]]) / corr.shape[0]
    return float(total)


def spectrum_report(spectrum: SubsetSpectrum) -> dict:
    """JSON-ready summary of a spectrum and its inequality verdict."""
    bell = bell_value(spectrum)
    bound = classical_bound(spectrum.config)
    return {
        "config": spectrum.config.to_json(),
        "entries": {str(mask): float(v) for mask, v in enumerate(spectrum.entries)},
        "bell_value": bell,
        "classical_bound": bound,
        "violated": bool(bell > bound + 1e-9),
    }
