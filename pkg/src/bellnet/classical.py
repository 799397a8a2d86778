"""Classical (per-source hidden variable) models of the star network.

Three routes are provided: the exactly saturating response family (each
observer flips a shared source bit with a setting-dependent probability),
reproducible random sampling of finite classical models, and exhaustive
enumeration of deterministic strategies for single-source networks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import NetworkConfig, subsets_of, xy_setting_map
from .quantum import CorrelationTable

MAX_HIDDEN_COMBINATIONS = 1 << 16
MAX_ENUMERATION_BRANCHES = 4


def _check_probabilities(p: np.ndarray) -> None:
    if p.min() < 0.0 or p.max() > 1.0:
        raise ValueError("response probabilities must lie in [0, 1]")


def saturating_probabilities(p, config: NetworkConfig) -> np.ndarray:
    """Broadcast ``p`` to one response probability per (source, branch)."""
    if not config.is_homogeneous():
        raise ValueError("the saturating family is defined on even networks")
    arr = np.broadcast_to(
        np.asarray(p, dtype=np.float64), (config.n, config.max_branch)
    ).copy()
    _check_probabilities(arr)
    return arr


def saturating_entries(p, config: NetworkConfig) -> np.ndarray:
    """Closed-form spectrum entries of the saturating family.

    Entry for subset X: prod_j (prod_{k in X} (1-p_j^k)) (prod_{k not in X} p_j^k).
    Source-symmetric p makes the entries a product distribution over branch
    positions, so the Bell value hits the classical bound exactly.
    """
    arr = saturating_probabilities(p, config)
    size = config.max_branch
    entries = np.empty(1 << size)
    for mask in subsets_of(size):
        inside = np.array([(mask >> k) & 1 for k in range(size)], dtype=bool)
        entries[mask] = np.prod(np.where(inside, 1.0 - arr, arr))
    return entries


def saturating_table(p, config: NetworkConfig) -> CorrelationTable:
    """Execute the saturating strategy by exact expectation.

    Every source carries a uniform bit; each observer answers that bit,
    flipped with probability 1-p_j^k when its setting is 1.  The center
    observer announces the XOR of the source bits when the branch count is
    odd and 0 otherwise, for both of his settings.
    """
    arr = saturating_probabilities(p, config)
    size = config.max_branch
    dim_src = 1 << size
    per_source = np.empty((config.n, 2, dim_src, dim_src))
    for j in range(config.n):
        for lam in (0, 1):
            mat = np.ones((1, 1))
            for k in range(size):
                keep, flip = arr[j, k], 1.0 - arr[j, k]
                bit = np.empty((2, 2))
                bit[0, lam], bit[0, 1 - lam] = 1.0, 0.0
                bit[1, lam], bit[1, 1 - lam] = keep, flip
                mat = np.kron(bit, mat)
            per_source[j, lam] = mat
    dim = 1 << config.total
    values = np.zeros((dim, 2, dim, 2))
    odd = size & 1
    for lams in range(1 << config.n):
        joint = np.ones((1, 1))
        parity = 0
        for j in range(config.n):
            lam = (lams >> j) & 1
            parity ^= lam
            joint = np.kron(per_source[j, lam], joint)
        b = parity if odd else 0
        for y in (0, 1):
            values[:, y, :, b] += joint / (1 << config.n)
    return CorrelationTable(config, values)


@dataclass(frozen=True, eq=False)
class SampledModel:
    """A finite classical model drawn from one seed.

    ``weights[j]`` is the hidden-variable distribution of source ``j``;
    ``responses[j][k, x, v]`` is observer (j,k)'s answer to setting ``x``
    at hidden value ``v``; ``center_bits[w, y]`` is the center observer's
    answer at setting ``y`` when the packed hidden word is ``w`` (source 0
    in the lowest base-``lattice`` digit).
    """

    config: NetworkConfig
    lattice: int
    weights: np.ndarray
    responses: tuple
    center_bits: np.ndarray
    seed: int

    @property
    def n_center_settings(self) -> int:
        return self.center_bits.shape[1]


def sample_model(seed: int, config: NetworkConfig, lattice: int = 2) -> SampledModel:
    """Draw a random classical model, reproducibly from the seed."""
    if lattice < 1:
        raise ValueError("lattice must hold at least one hidden value")
    combos = lattice ** config.n
    if combos > MAX_HIDDEN_COMBINATIONS:
        raise ValueError("hidden-variable combination count too large")
    rng = np.random.default_rng(seed)
    # flat Dirichlet via normalized exponentials; true division keeps a
    # one-point lattice at weight exactly 1.0
    weights = rng.gamma(1.0, size=(config.n, lattice))
    weights /= weights.sum(axis=1, keepdims=True)
    responses = tuple(
        rng.integers(0, 2, size=(size, 2, lattice), dtype=np.uint8)
        for size in config.branches
    )
    n_y = 1 << len(config.block_sizes)
    center = rng.integers(0, 2, size=(combos, n_y), dtype=np.uint8)
    return SampledModel(config, lattice, weights, responses, center, seed)


def model_table(model: SampledModel) -> CorrelationTable:
    """Exact correlation table induced by a sampled model."""
    config = model.config
    dim = 1 << config.total
    n_y = model.n_center_settings
    values = np.zeros((dim, n_y, dim, 2))
    words = np.arange(dim)
    # Per source: outcome word for each (setting word, hidden value).
    local = []
    for j, size in enumerate(config.branches):
        table = np.zeros((1 << size, model.lattice), dtype=np.int64)
        for k in range(size):
            bits = (np.arange(1 << size) >> k) & 1
            table |= model.responses[j][k][bits, :].astype(np.int64) << k
        local.append(table)
    for combo in range(model.lattice ** config.n):
        digits = [(combo // model.lattice ** j) % model.lattice for j in range(config.n)]
        weight = 1.0
        outcome = np.zeros(dim, dtype=np.int64)
        for j in range(config.n):
            weight *= model.weights[j, digits[j]]
            sub = (words >> config.offsets[j]) & ((1 << config.branches[j]) - 1)
            outcome |= local[j][sub, digits[j]] << config.offsets[j]
        for y in range(n_y):
            values[words, y, outcome, model.center_bits[combo, y]] += weight
    return CorrelationTable(config, values)


def sampled_spectra(seeds, config: NetworkConfig, lattice: int = 2, setting_map=None):
    """Spectrum entries for many seeded models at once.

    Works directly on the factorized response algebra instead of building
    each model's table, so large seed batches stay cheap.  Rows follow the
    seed order; columns follow ascending subset masks.
    """
    if setting_map is None:
        setting_map = xy_setting_map(config.max_branch)
    setting_map = np.asarray(setting_map)
    models = [sample_model(int(s), config, lattice) for s in seeds]
    batch = len(models)
    combos = lattice ** config.n
    size_max = config.max_branch

    # Signed half-sums per observer: index 0 pairs with settings outside
    # the subset, index 1 with settings inside it.
    half = []
    for j, size in enumerate(config.branches):
        resp = np.stack([m.responses[j] for m in models])  # (B, size, 2, lattice)
        signed = 1.0 - 2.0 * resp
        half.append(
            np.stack(
                [
                    (signed[:, :, 0, :] + signed[:, :, 1, :]) / 2,
                    (signed[:, :, 0, :] - signed[:, :, 1, :]) / 2,
                ],
                axis=2,
            )
        )  # (B, size, 2, lattice)
    weights = np.stack([m.weights for m in models])  # (B, n, lattice)
    center = np.stack([m.center_bits for m in models])  # (B, combos, n_y)
    center_signs = 1.0 - 2.0 * center

    # Per-source subset factors: product over branches of the matching
    # half-sum, for every local mask.
    factors = []
    for j, size in enumerate(config.branches):
        f = np.ones((batch, 1 << size, lattice))
        for mask in range(1 << size):
            prod = np.ones((batch, lattice))
            for k in range(size):
                prod = prod * half[j][:, k, (mask >> k) & 1, :]
            f[:, mask] = prod
        factors.append(f)

    entries = np.zeros((batch, 1 << size_max))
    for mask in subsets_of(size_max):
        y = int(setting_map[mask])
        acc = np.zeros(batch)
        for combo in range(combos):
            term = center_signs[:, combo, y].copy()
            for j in range(config.n):
                digit = (combo // lattice ** j) % lattice
                sub = mask & ((1 << config.branches[j]) - 1)
                term *= weights[:, j, digit] * factors[j][:, sub, digit]
            acc += term
        entries[:, mask] = acc
    return entries


def sampled_bell_values(seeds, config: NetworkConfig, lattice: int = 2, setting_map=None):
    """Bell value of each seeded model, batch-evaluated."""
    entries = sampled_spectra(seeds, config, lattice, setting_map)
    return (np.abs(entries) ** (1.0 / config.n)).sum(axis=1)


def deterministic_maximum(config: NetworkConfig, setting_map=None):
    """Exhaustive maximum of the Bell value over deterministic strategies.

    Sound as a classical bound certificate only for one source, where the
    value is convex in the model; more sources need sampling instead.
    Returns the maximum and one strategy attaining it, with each response
    encoded as (answer at setting 0, answer at setting 1).
    """
    if config.n != 1:
        raise ValueError("enumeration certifies the bound only for one source")
    size = config.max_branch
    if size > MAX_ENUMERATION_BRANCHES:
        raise ValueError(f"enumeration limited to {MAX_ENUMERATION_BRANCHES} branches")
    if setting_map is None:
        setting_map = xy_setting_map(size)
    setting_map = np.asarray(setting_map)
    best, best_strategy = -1.0, None
    for codes in range(1 << (2 * size)):
        answers = [((codes >> (2 * k)) & 1, (codes >> (2 * k + 1)) & 1) for k in range(size)]
        signs = [(1 - 2 * a0, 1 - 2 * a1) for a0, a1 in answers]
        outside = [(s0 + s1) / 2 for s0, s1 in signs]
        inside = [(s0 - s1) / 2 for s0, s1 in signs]
        for center in range(4):
            center_bits = (center & 1, center >> 1)
            value = 0.0
            for mask in subsets_of(size):
                prod = 1.0
                for k in range(size):
                    prod *= inside[k] if (mask >> k) & 1 else outside[k]
                sign = -1.0 if center_bits[setting_map[mask]] else 1.0
                value += abs(sign * prod)
            if value > best:
                best = value
                best_strategy = {"responses": answers, "center": center_bits}
    return best, best_strategy


def region_slice(
    config: NetworkConfig,
    fixed_value: float,
    grid: int,
    fixed_mask: int = 3,
    tol: float | None = None,
):
    """Sample the classical spectrum region on an L=2 network slice.

    Sweeps the source-symmetric saturating family over a (p1, p2) grid,
    keeps the points whose fixed-subset entry is within ``tol`` of
    ``fixed_value``, and returns (column names, rows) for the other three
    entries.  The default tolerance tracks the grid pitch.
    """
    if not config.is_homogeneous() or config.max_branch != 2:
        raise ValueError("region slices are defined for two-branch even networks")
    if grid < 2:
        raise ValueError("grid must have at least two points")
    if not 0 <= fixed_mask < 4:
        raise ValueError("fixed subset mask must lie in 0..3")
    if tol is None:
        tol = config.n / (grid - 1)
    ps = np.linspace(0.0, 1.0, grid)
    p1, p2 = np.meshgrid(ps, ps, indexing="ij")
    n = config.n
    entries = [
        (p1 * p2) ** n,
        ((1 - p1) * p2) ** n,
        (p1 * (1 - p2)) ** n,
        ((1 - p1) * (1 - p2)) ** n,
    ]
    keep = np.abs(entries[fixed_mask] - fixed_value) < tol
    free = [m for m in range(4) if m != fixed_mask]
    names = {0: "K_empty", 1: "K_1", 2: "K_2", 3: "K_12"}
    rows = np.stack([entries[m][keep] for m in free], axis=1)
    return [names[m] for m in free], rows


def geometric_mean_inequality_sides(c) -> tuple[float, float]:
    """Both sides of the mixed-power bound used by the classical proof.

    For a nonnegative matrix c with one row per source: the sum over
    columns of the geometric means never exceeds the geometric mean of the
    row sums.
    """
    c = np.asarray(c, dtype=np.float64)
    if c.ndim != 2:
        raise ValueError("need a 2-d array (sources by terms)")
    if c.min() < 0:
        raise ValueError("entries must be nonnegative")
    n = c.shape[0]
    lhs = float((np.prod(c, axis=0) ** (1.0 / n)).sum())
    rhs = float(np.prod(c.sum(axis=1) ** (1.0 / n)))
    return lhs, rhs
