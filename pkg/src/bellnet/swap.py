"""Spectra for the entangled center measurement.

The center observer projects his qubits onto the GHZ-like basis and
announces an n-bit outcome.  Each subset's correlator is built from one
derived bit of that outcome: a parity over a caller-chosen set of outcome
bit positions, supplied as a mask per subset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .network import NetworkConfig, subset_setting_mask, subsets_of
from .quantum import swap_joint_table
from .inequality import SubsetSpectrum, parity_signs


@dataclass(frozen=True, eq=False)
class SwapConditioning:
    """Per-subset parity masks over the center observer's outcome bits."""

    n: int
    masks: np.ndarray  # (2**max_branch,), each in [0, 2**n)

    def __post_init__(self):
        masks = np.asarray(self.masks, dtype=np.int64)
        object.__setattr__(self, "masks", masks)
        if masks.ndim != 1 or masks.size & (masks.size - 1):
            raise ValueError("need one mask per subset, a power-of-two count")
        if masks.min() < 0 or masks.max() >= (1 << self.n):
            raise ValueError("conditioning mask addresses a missing outcome bit")


def default_conditioning(config: NetworkConfig, setting_map) -> SwapConditioning:
    """The conditioning that reproduces the separable-center statistics.

    Subsets whose separable center setting is 0 (all his qubits on the
    first axis) read outcome bit 0, which carries the same stabilizer;
    setting-1 subsets read the parity of all n bits.  The second half
    holds only for an even source count, and the map must be two-valued.
    """
    setting_map = np.asarray(setting_map)
    if setting_map.max() > 1:
        raise ValueError("default conditioning needs a two-setting map")
    if config.n % 2:
        raise ValueError("no default conditioning for an odd source count")
    all_bits = (1 << config.n) - 1
    masks = np.where(setting_map == 0, 1, all_bits)
    return SwapConditioning(config.n, masks)


def conditioning_from_json(text: str, config: NetworkConfig) -> SwapConditioning:
    """Parse {"<subset mask>": {"bit": i} | {"parity": [i, ...]}, ...}."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"conditioning is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ValueError("conditioning must be a JSON object keyed by subset mask")
    count = 1 << config.max_branch
    masks = np.zeros(count, dtype=np.int64)
    seen = set()
    for key, rule in data.items():
        try:
            subset = int(key)
        except ValueError:
            raise ValueError(f"subset key {key!r} is not an integer") from None
        if not 0 <= subset < count:
            raise ValueError(f"subset key {key!r} outside 0..{count - 1}")
        if not isinstance(rule, dict) or len(rule) != 1:
            raise ValueError(f"rule for subset {key!r} must be a single-entry object")
        (kind, value), = rule.items()
        if kind == "bit":
            if not isinstance(value, int) or not 0 <= value < config.n:
                raise ValueError(f"subset {key!r}: bit index must lie in 0..{config.n - 1}")
            masks[subset] = 1 << value
        elif kind == "parity":
            if not isinstance(value, list) or not all(
                isinstance(b, int) and 0 <= b < config.n for b in value
            ):
                raise ValueError(
                    f"subset {key!r}: parity must list bit indices in 0..{config.n - 1}"
                )
            mask = 0
            for b in value:
                mask ^= 1 << b
            masks[subset] = mask
        else:
            raise ValueError(f"subset {key!r}: unknown rule kind {kind!r}")
        seen.add(subset)
    missing = [m for m in range(count) if m not in seen]
    if missing:
        raise ValueError(f"conditioning missing subsets: {missing}")
    return SwapConditioning(config.n, masks)


def conditioning_to_json(conditioning: SwapConditioning) -> str:
    data = {}
    for subset, mask in enumerate(conditioning.masks):
        bits = [b for b in range(conditioning.n) if (mask >> b) & 1]
        data[str(subset)] = {"bit": bits[0]} if len(bits) == 1 else {"parity": bits}
    return json.dumps(data, indent=2)


def swap_spectrum(
    config: NetworkConfig, branch_angles, conditioning: SwapConditioning
) -> SubsetSpectrum:
    """Subset correlators of the jointly measured network.

    The conditioning mask of each subset replaces the separable center
    parity bit; the remaining outcome bits are marginalized by the parity
    sum itself.
    """
    if conditioning.n != config.n:
        raise ValueError("conditioning source count does not match the network")
    table = swap_joint_table(config, branch_angles)
    dim = 1 << config.total
    sa = parity_signs(config.total)
    words = np.arange(dim)
    center_words = np.arange(1 << config.n)
    entries = np.empty(1 << config.max_branch)
    for mask in subsets_of(config.max_branch):
        word = subset_setting_mask(mask, config)
        sx = np.where(_bit_parity(words & word), -1.0, 1.0)
        sv = np.where(_bit_parity(center_words & int(conditioning.masks[mask])), -1.0, 1.0)
        entries[mask] = np.einsum("xav,x,a,v->", table.values, sx, sa, sv) / dim
    return SubsetSpectrum(config, entries, None)


def _bit_parity(words: np.ndarray) -> np.ndarray:
    parity = np.zeros(words.shape, dtype=np.int64)
    w = words.copy()
    while w.any():
        parity ^= w & 1
        w >>= 1
    return parity.astype(bool)
