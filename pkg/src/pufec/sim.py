"""Channel model and block-error evaluation.

Monte Carlo and importance-sampled estimators run over any codec object
exposing ``n``/``k``/``encode``/``decode``.  Every trial derives its own
counter-based Philox stream from (seed, trial index), so results are
bit-identical for a fixed seed no matter how trials are chunked across
worker processes.
"""

from __future__ import annotations

import json
import math
import multiprocessing
import time
from dataclasses import dataclass, asdict

import numpy as np
from scipy import stats
from scipy.special import gammaln, logsumexp

from . import codes, kernels

__all__ = [
    "BscSpec",
    "SimReport",
    "InnerOutcomeDistribution",
    "trial_rng",
    "bsc_apply",
    "monte_carlo_block_error",
    "importance_sampled_block_error",
    "inner_outcome_distribution",
    "baseline_bch_rep_perr",
    "clopper_pearson",
]

_MASK64 = (1 << 64) - 1
_CHUNK = 1024  # fixed so chunk boundaries never depend on the worker count


@dataclass(frozen=True)
class BscSpec:
    """Binary symmetric channel: crossover probability and RNG seed."""

    p: float
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.p <= 0.5):
            raise ValueError(f"crossover probability must be in [0, 0.5], got {self.p}")


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for one trial of one campaign."""
    key = np.array([seed & _MASK64, index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def bsc_apply(rng: np.random.Generator, word, p: float) -> np.ndarray:
    """Flip each bit independently with probability p."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"invalid flip probability {p}")
    word = np.asarray(word, dtype=np.uint8)
    flips = rng.random(word.size) < p
    return word ^ flips.astype(np.uint8)


@dataclass
class SimReport:
    """Outcome of one estimation campaign.

    ``failures`` counts every block error (decode failures plus silently
    wrong outputs); ``wrong_key`` is the silent-wrong subset.  The interval
    [ci_low, ci_high] is a 95% bound on the block error probability.
    """

    code_id: str
    n: int
    k: int
    mode: str
    p: float
    trials: int
    failures: int
    wrong_key: int
    p_err_estimate: float
    ci_low: float
    ci_high: float
    seed: int
    workers: int
    wall_time: float
    p_star: float | None = None
    rel_err: float | None = None

    def to_text(self) -> str:
        """One key: value per line plus a machine-readable json line.

        ``wall_time`` appears only as a text line so that reports from equal
        (seed, workers) runs differ in no other byte.
        """
        d = asdict(self)
        wall = d.pop("wall_time")
        lines = [f"{key}: {d[key]}" for key in d]
        lines.append(f"wall_time: {wall:.3f}")
        lines.append("json: " + json.dumps(d, sort_keys=True))
        return "\n".join(lines) + "\n"


def clopper_pearson(errors: int, trials: int, alpha: float = 0.05) -> tuple[float, float]:
    """Exact binomial confidence interval; valid at zero observed errors."""
    if errors == 0:
        lo = 0.0
    else:
        lo = float(stats.beta.ppf(alpha / 2, errors, trials - errors + 1))
    if errors == trials:
        hi = 1.0
    else:
        hi = float(stats.beta.ppf(1 - alpha / 2, errors + 1, trials - errors))
    return lo, hi


# ---------------------------------------------------------------------------
# worker plumbing

_G: dict = {}


def _init_worker(codec, p, p_star, seed):
    _G["codec"] = codec
    _G["p"] = p
    _G["p_star"] = p_star
    _G["seed"] = seed


def _mc_chunk(span) -> tuple[int, int]:
    codec, p, seed = _G["codec"], _G["p"], _G["seed"]
    failures = wrong = 0
    for t in range(*span):
        rng = trial_rng(seed, t)
        info = rng.integers(0, 2, codec.k, dtype=np.uint8)
        noisy = bsc_apply(rng, codec.encode(info), p)
        out = codec.decode(noisy)
        if not out.is_unique:
            failures += 1
        elif not np.array_equal(out.info, info):
            failures += 1
            wrong += 1
    return failures, wrong


def _is_chunk(span) -> tuple[int, int, float, float]:
    codec, p, p_star, seed = _G["codec"], _G["p"], _G["p_star"], _G["seed"]
    n = codec.n
    log_flip = math.log(p) - math.log(p_star)
    log_keep = math.log1p(-p) - math.log1p(-p_star) if p_star < 1 else 0.0
    failures = wrong = 0
    s1 = s2 = 0.0
    for t in range(*span):
        rng = trial_rng(seed, t)
        info = rng.integers(0, 2, codec.k, dtype=np.uint8)
        word = codec.encode(info)
        flips = (rng.random(n) < p_star).astype(np.uint8)
        out = codec.decode(word ^ flips)
        err = not out.is_unique or not np.array_equal(out.info, info)
        if err:
            failures += 1
            if out.is_unique:
                wrong += 1
            w = int(flips.sum())
            lr = math.exp(w * log_flip + (n - w) * log_keep)
            s1 += lr
            s2 += lr * lr
    return failures, wrong, s1, s2


def _run_chunks(fn, codec, p, p_star, trials, seed, workers):
    spans = [(a, min(a + _CHUNK, trials)) for a in range(0, trials, _CHUNK)]
    if workers <= 1:
        _init_worker(codec, p, p_star, seed)
        return [fn(s) for s in spans]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(workers, initializer=_init_worker,
                  initargs=(codec, p, p_star, seed)) as pool:
        # ordered map keeps float accumulation order fixed across worker counts
        return pool.map(fn, spans, chunksize=1)


def monte_carlo_block_error(codec, p: float, trials: int, seed: int,
                            workers: int = 1) -> SimReport:
    """Plain Monte Carlo block-error estimate with a Clopper-Pearson 95% CI."""
    BscSpec(p, seed)
    if trials < 1:
        raise ValueError("need at least one trial")
    t0 = time.perf_counter()
    parts = _run_chunks(_mc_chunk, codec, p, None, trials, seed, workers)
    failures = sum(f for f, _ in parts)
    wrong = sum(w for _, w in parts)
    lo, hi = clopper_pearson(failures, trials)
    return SimReport(
        code_id=getattr(codec, "code_id", "?"), n=codec.n, k=codec.k,
        mode="mc", p=p, trials=trials, failures=failures, wrong_key=wrong,
        p_err_estimate=failures / trials, ci_low=lo, ci_high=hi,
        seed=seed, workers=workers, wall_time=time.perf_counter() - t0,
    )


def importance_sampled_block_error(codec, p: float, p_star: float, trials: int,
                                   seed: int, workers: int = 1) -> SimReport:
    """Unbiased block-error estimate from errors drawn at the heavier
    crossover ``p_star``, each trial weighted by its likelihood ratio."""
    BscSpec(p, seed)
    if not (p <= p_star <= 0.5):
        raise ValueError(f"need p <= p_star <= 0.5, got p={p}, p_star={p_star}")
    if trials < 1:
        raise ValueError("need at least one trial")
    t0 = time.perf_counter()
    parts = _run_chunks(_is_chunk, codec, p, p_star, trials, seed, workers)
    failures = sum(x[0] for x in parts)
    wrong = sum(x[1] for x in parts)
    s1 = sum(x[2] for x in parts)
    s2 = sum(x[3] for x in parts)
    est = s1 / trials
    # normal-approximation interval on the weighted indicator mean
    var = max(s2 / trials - est * est, 0.0) / max(trials - 1, 1)
    se = math.sqrt(var)
    rel = se / est if est > 0 else None
    return SimReport(
        code_id=getattr(codec, "code_id", "?"), n=codec.n, k=codec.k,
        mode="is", p=p, trials=trials, failures=failures, wrong_key=wrong,
        p_err_estimate=est, ci_low=max(est - 1.96 * se, 0.0),
        ci_high=min(est + 1.96 * se, 1.0), seed=seed, workers=workers,
        wall_time=time.perf_counter() - t0, p_star=p_star, rel_err=rel,
    )


# ---------------------------------------------------------------------------
# exact inner-decoder statistics

@dataclass(eq=False)
class InnerOutcomeDistribution:
    """Exact per-outcome probabilities of one ML-decoded inner row.

    For the transmitted all-zero codeword over BSC(p): ``probs[c, t]`` is the
    probability of decoding to codeword index ``c`` at distance ``t``, and
    ``erasure`` the probability of a distance tie.
    """

    code_label: str
    p: float
    probs: np.ndarray
    erasure: float

    @property
    def p_correct(self) -> float:
        return float(self.probs[0].sum())

    @property
    def p_wrong(self) -> float:
        return float(self.probs[1:].sum())

    def total(self) -> float:
        return float(self.probs.sum() + self.erasure)


def inner_outcome_distribution(cb: codes.Codebook, p: float) -> InnerOutcomeDistribution:
    """Enumerate every received word of a short code and ML-decode it.

    Exact up to float rounding; requires block length <= 20.
    """
    n = cb.code.n
    if n > 20:
        raise ValueError(f"full enumeration needs n <= 20, got {n}")
    BscSpec(min(p, 0.5), 0)
    size = 1 << n
    words = np.arange(size, dtype=np.uint64)[:, None]
    best, dist, tie = kernels.nearest_codeword(words, cb.packed)
    weight = np.bitwise_count(words[:, 0]).astype(np.int64)
    if p == 0:
        prob = np.where(weight == 0, 1.0, 0.0)
    else:
        prob = np.exp(weight * np.log(p) + (n - weight) * np.log1p(-p))
    probs = np.zeros((len(cb), n + 1), dtype=np.float64)
    ok = ~tie
    np.add.at(probs, (best[ok], dist[ok]), prob[ok])
    return InnerOutcomeDistribution(
        code_label=cb.code.label, p=p, probs=probs, erasure=float(prob[tie].sum())
    )


# ---------------------------------------------------------------------------
# analytic reference scheme: BCH(318,174,35) outer over (7,1,7) repetition

def baseline_bch_rep_perr(p: float) -> float:
    """Block error probability of the reference concatenation.

    The inner length-7 repetition code fails on 4 or more flips; the outer
    (318, 174, 35) BCH stage, decoded bounded-distance with t = 17, fails on
    18 or more inner failures.  The outer tail is summed in the log domain
    (its terms span hundreds of orders of magnitude).
    """
    if not (0.0 <= p <= 0.5):
        raise ValueError(f"crossover probability must be in [0, 0.5], got {p}")
    if p == 0.0:
        return 0.0
    i = np.arange(4, 8)
    p_inner = float(
        np.exp(
            gammaln(8) - gammaln(i + 1) - gammaln(8 - i)
            + i * np.log(p) + (7 - i) * np.log1p(-p)
        ).sum()
    )
    n, t = 318, 17
    j = np.arange(t + 1, n + 1)
    log_terms = (
        gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1)
        + j * np.log(p_inner) + (n - j) * np.log1p(-p_inner)
    )
    return float(np.exp(logsumexp(log_terms)))
