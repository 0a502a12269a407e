"""Synthetic dataset generators: ground truth, social, ownership, assessments.

All generators are pure functions of (config, rng).  ``build_scenario``
derives one independent RNG substream per generator from a single master
seed, in a fixed order (truth, ownership, social, assessments), so the same
seed always yields the same dataset and changing e.g. the social model does
not perturb the assessment draws.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError
from .graph import Dataset, GroundTruth, from_matrices


@dataclass(frozen=True)
class MixtureConfig:
    """Two-component normal mixture for ground-truth values."""

    pi: tuple[float, float] = (0.2, 0.8)
    mu: tuple[float, float] = (0.3, 0.7)
    sigma: tuple[float, float] = (0.1, 0.1)

    def __post_init__(self):
        if len(self.pi) != 2 or len(self.mu) != 2 or len(self.sigma) != 2:
            raise ValidationError("mixture config requires exactly two components")
        if any(p < 0 for p in self.pi) or abs(sum(self.pi) - 1.0) > 1e-12:
            raise ValidationError(f"mixing probabilities {self.pi} must be nonnegative and sum to 1")
        if any(s < 0 for s in self.sigma):
            raise ValidationError(f"mixture sigmas {self.sigma} must be nonnegative")
        if any(not 0.0 <= m <= 1.0 for m in self.mu):
            raise ValidationError(f"mixture means {self.mu} must lie in [0, 1]")


@dataclass(frozen=True)
class ErConfig:
    """Erdos-Renyi social network: each user pair connected with probability p."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("ErConfig.n must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError(f"connection probability {self.p} must lie in [0, 1]")


@dataclass(frozen=True)
class HomophilyConfig:
    """Connect two users iff their owned items' true values differ by <= tau."""

    tau: float

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValidationError(f"tau {self.tau} must lie in [0, 1]")


@dataclass(frozen=True)
class StrategicConfig:
    """Friends of an item's owner grade 1.0; strangers grade Normal(v_i, sigma_h)."""

    k: int = 3
    sigma_h: float = 0.25

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError("grader count k must be >= 1")
        if self.sigma_h < 0:
            raise ValidationError("sigma_h must be >= 0")


@dataclass(frozen=True)
class BiasReliabilityConfig:
    """Grades ~ Normal(v_i + alpha, sigma_max * (1 - beta * v_own)) clamped to [0, 1].

    ``alpha`` shifts grades (generous > 0, strict < 0); ``beta`` couples a
    grader's noise level to the true value of their own item.
    """

    k: int = 3
    alpha: float = 0.0
    beta: float = 0.0
    sigma_max: float = 0.25

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError("grader count k must be >= 1")
        if not -1.0 <= self.alpha <= 1.0:
            raise ValidationError(f"bias alpha {self.alpha} must lie in [-1, 1]")
        if self.sigma_max < 0:
            raise ValidationError("sigma_max must be >= 0")


SocialConfig = Union[ErConfig, HomophilyConfig]
AssessmentConfig = Union[StrategicConfig, BiasReliabilityConfig]


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to generate one synthetic dataset."""

    n: int = 500
    m: int = 500
    seed: int = 0
    mixture: MixtureConfig = field(default_factory=MixtureConfig)
    social: Optional[SocialConfig] = None
    assessment: AssessmentConfig = field(default_factory=BiasReliabilityConfig)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValidationError("scenario requires n >= 1 and m >= 1")


def default_scenario(seed: int = 0, n: int = 500, m: int = 500) -> ScenarioConfig:
    """Bias-reliability scenario with k=3, sigma_max=0.25, no social network."""
    return ScenarioConfig(n=n, m=m, seed=seed)


def strategic_scenario(seed: int = 0, n: int = 500, m: int = 500, p: float = 0.05) -> ScenarioConfig:
    """Strategic grading over an Erdos-Renyi social network (p=0.05, sigma_h=0.25)."""
    return ScenarioConfig(
        n=n, m=m, seed=seed,
        social=ErConfig(n=n, p=p),
        assessment=StrategicConfig(k=3, sigma_h=0.25),
    )


def gen_ground_truth(m: int, cfg: MixtureConfig, rng: np.random.Generator) -> GroundTruth:
    """Sample item values from the mixture, clamped into [0, 1]."""
    if m < 1:
        raise ValidationError("item count must be >= 1")
    comp = rng.choice(2, size=m, p=np.asarray(cfg.pi, dtype=np.float64))
    mu = np.asarray(cfg.mu)[comp]
    sigma = np.asarray(cfg.sigma)[comp]
    v = np.clip(rng.normal(mu, sigma), 0.0, 1.0)
    return GroundTruth.full(v)


def gen_ownership_one_to_one(n: int, m: int, rng: np.random.Generator) -> sp.csr_matrix:
    """Random permutation matrix: each user owns exactly one item, weight 1."""
    if n != m:
        raise ValidationError(f"one-to-one ownership requires n == m, got n={n}, m={m}")
    perm = rng.permutation(n)
    return sp.csr_matrix((np.ones(n), (np.arange(n), perm)), shape=(n, m))


def gen_social_er(cfg: ErConfig, rng: np.random.Generator) -> sp.csr_matrix:
    """Symmetric 0/1 adjacency with zero diagonal; pairs drawn independently."""
    iu, ju = np.triu_indices(cfg.n, k=1)
    keep = rng.random(iu.shape[0]) < cfg.p
    r, c = iu[keep], ju[keep]
    rows = np.concatenate([r, c])
    cols = np.concatenate([c, r])
    return sp.csr_matrix((np.ones(rows.shape[0]), (rows, cols)), shape=(cfg.n, cfg.n))


def _owner_maps(O: sp.spmatrix, n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (item owned by each user, owner of each item) for one-to-one O."""
    coo = O.tocoo()
    user_counts = np.bincount(coo.row, minlength=n)
    item_counts = np.bincount(coo.col, minlength=m)
    if np.any(user_counts != 1) or np.any(item_counts != 1):
        raise ValidationError("ownership must be one-to-one (each user owns exactly one item)")
    item_of = np.empty(n, dtype=np.int64)
    owner_of = np.empty(m, dtype=np.int64)
    item_of[coo.row] = coo.col
    owner_of[coo.col] = coo.row
    return item_of, owner_of


def gen_social_homophily(truth: GroundTruth, O: sp.spmatrix, cfg: HomophilyConfig) -> sp.csr_matrix:
    """Deterministic social net: users linked iff their items' values are within tau."""
    n = O.shape[0]
    item_of, _ = _owner_maps(O, n, O.shape[1])
    if not np.all(truth.mask[item_of]):
        raise ValidationError("homophily generation requires known values for all owned items")
    own_vals = truth.v[item_of]
    close = np.abs(own_vals[:, None] - own_vals[None, :]) <= cfg.tau
    np.fill_diagonal(close, False)
    rows, cols = np.nonzero(close)
    return sp.csr_matrix((np.ones(rows.shape[0]), (rows, cols)), shape=(n, n))


def _grader_sets(m: int, n: int, k: int, owner_of: np.ndarray, rng: np.random.Generator) -> list[np.ndarray]:
    """Per item, a uniform random set of k distinct users excluding the owner."""
    if k > n - 1:
        raise ValidationError(f"k={k} graders requested but only {n - 1} non-owners exist")
    sets = []
    for i in range(m):
        picks = rng.choice(n - 1, size=k, replace=False)
        sets.append(picks + (picks >= owner_of[i]))  # skip over the owner index
    return sets


def gen_assess_strategic(
    truth: GroundTruth,
    O: sp.spmatrix,
    S: sp.spmatrix,
    cfg: StrategicConfig,
    rng: np.random.Generator,
) -> sp.csr_matrix:
    """Friends of the owner award 1.0; everyone else grades Normal(v_i, sigma_h)."""
    n, m = O.shape
    _, owner_of = _owner_maps(O, n, m)
    S_dense = np.asarray(S.todense())
    O_dense = np.asarray(O.todense())
    graders = _grader_sets(m, n, cfg.k, owner_of, rng)

    rows, cols, vals = [], [], []
    for i in range(m):
        owner = owner_of[i]
        users = graders[i]
        friend = S_dense[users, owner] * O_dense[owner, i] == 1.0
        grades = np.empty(cfg.k)
        grades[friend] = 1.0
        honest = ~friend
        if honest.any():
            grades[honest] = np.clip(
                rng.normal(truth.v[i], cfg.sigma_h, size=int(honest.sum())), 0.0, 1.0
            )
        rows.extend(users)
        cols.extend([i] * cfg.k)
        vals.extend(grades)
    return sp.csr_matrix(
        sp.coo_matrix((vals, (rows, cols)), shape=(n, m))
    )


def gen_assess_bias_reliability(
    truth: GroundTruth,
    O: sp.spmatrix,
    cfg: BiasReliabilityConfig,
    rng: np.random.Generator,
) -> sp.csr_matrix:
    """Biased, reliability-scaled grades clamped to [0, 1]."""
    n, m = O.shape
    item_of, owner_of = _owner_maps(O, n, m)
    if not np.all(truth.mask[item_of]):
        raise ValidationError("bias-reliability generation requires known values for all owned items")
    sigma_of_user = cfg.sigma_max * (1.0 - cfg.beta * truth.v[item_of])
    if np.any(sigma_of_user < 0):
        raise ValidationError(
            f"beta={cfg.beta} gives a negative grading standard deviation for some grader"
        )
    graders = _grader_sets(m, n, cfg.k, owner_of, rng)

    rows, cols, vals = [], [], []
    for i in range(m):
        users = graders[i]
        grades = np.clip(
            rng.normal(truth.v[i] + cfg.alpha, sigma_of_user[users]), 0.0, 1.0
        )
        rows.extend(users)
        cols.extend([i] * cfg.k)
        vals.extend(grades)
    return sp.csr_matrix(
        sp.coo_matrix((vals, (rows, cols)), shape=(n, m))
    )


def _node_ids(prefix: str, count: int) -> tuple[str, ...]:
    width = len(str(count - 1))
    return tuple(f"{prefix}{i:0{width}d}" for i in range(count))


def build_scenario(cfg: ScenarioConfig) -> Dataset:
    """Compose the generators per config; splitting is left to the harness."""
    streams = np.random.SeedSequence(cfg.seed).spawn(4)
    rng_truth, rng_own, rng_social, rng_assess = (np.random.default_rng(s) for s in streams)

    truth = gen_ground_truth(cfg.m, cfg.mixture, rng_truth)
    O = gen_ownership_one_to_one(cfg.n, cfg.m, rng_own)

    if cfg.social is None:
        S = sp.csr_matrix((cfg.n, cfg.n))
    elif isinstance(cfg.social, ErConfig):
        if cfg.social.n != cfg.n:
            raise ValidationError(f"ErConfig.n={cfg.social.n} disagrees with scenario n={cfg.n}")
        S = gen_social_er(cfg.social, rng_social)
    elif isinstance(cfg.social, HomophilyConfig):
        S = gen_social_homophily(truth, O, cfg.social)
    else:
        raise ValidationError(f"unknown social config {type(cfg.social).__name__}")

    if isinstance(cfg.assessment, StrategicConfig):
        A = gen_assess_strategic(truth, O, S, cfg.assessment, rng_assess)
    elif isinstance(cfg.assessment, BiasReliabilityConfig):
        A = gen_assess_bias_reliability(truth, O, cfg.assessment, rng_assess)
    else:
        raise ValidationError(f"unknown assessment config {type(cfg.assessment).__name__}")

    graph = from_matrices(S, O, A, _node_ids("u", cfg.n), _node_ids("i", cfg.m))
    return Dataset(graph=graph, truth=truth, split=None)
