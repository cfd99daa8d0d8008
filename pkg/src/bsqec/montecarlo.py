"""Logical failure estimation: direct Monte Carlo and subset importance sampling.

An *experiment* is anything with

* ``probs``: array of per-location fault probabilities,
* ``outcomes(i)``: list of ``(injection, probability)`` for location ``i``
  given that it fires (probabilities sum to 1),
* ``run_trial(injection, rng) -> bool``: True if the trial fails,

so toy circuits can be checked against brute-force enumeration.  Randomness
is derived from ``(seed, stream, chunk)`` with a fixed chunk size, so the
worker count never changes a result.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circuits import compile_to_ms, simple_circuit
from .codes import CodeSpec
from .decoders import SimpleRunner
from .noise import Depolarizing, IonTrap, enumerate_locations, outcomes

CHUNK = 512
_DIRECT_STREAM = 0


def config_digest(config) -> str:
    """Short stable hash of a JSON-serialisable config."""
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _rng(seed: int, stream: int, chunk: int):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, chunk)))


def n_workers() -> int:
    try:
        return max(1, int(os.environ.get("BSQEC_WORKERS", "1")))
    except ValueError:
        return 1


# -- experiments -----------------------------------------------------------------------
class CircuitExperiment:
    """The simple circuit of a code under a noise model.

    For the ion model the circuit is compiled to MS gates and op durations
    come from ``ion_layout.assign_durations`` with the given arrangement.
    """

    def __init__(self, code: CodeSpec, rounds: int, model, order: str = "gauge",
                 arrangement=None, timing=None):
        self.code = code
        self.rounds = rounds
        self.model = model
        circuit = simple_circuit(code, rounds, order)
        if isinstance(model, IonTrap):
            from . import ion_layout

            circuit = compile_to_ms(circuit)
            if arrangement is None:
                arrangement = ion_layout.published_arrangement(code, "MA")
            circuit = ion_layout.assign_durations(circuit, arrangement, timing)
        self.circuit = circuit
        locs = enumerate_locations(circuit, model)
        self.all_locations = locs
        self.locations = [l for l in locs if l.probability > 0]
        self.probs = np.array([l.probability for l in self.locations], dtype=float)
        self._outs = []
        for l in self.locations:
            self._outs.append([([(l.op_index, l.after, q, c) for q, c in f], float(pr))
                               for f, pr in outcomes(l, circuit)])
        self.runner = SimpleRunner(circuit, code)

    @property
    def homogeneous(self) -> bool:
        return len(self.probs) > 0 and bool(np.all(self.probs == self.probs[0]))

    def outcomes(self, i):
        return self._outs[i]

    def sample_outcome(self, i, rng):
        outs = self._outs[i]
        if len(outs) == 1:
            return outs[0][0]
        return outs[int(rng.integers(len(outs)))][0]

    def run_trial(self, injection, rng) -> bool:
        return self.runner.run(injection, rng).failed


def _sample_outcome(exp, i, rng):
    if hasattr(exp, "sample_outcome"):
        return exp.sample_outcome(i, rng)
    outs = exp.outcomes(i)
    pr = np.array([p for _, p in outs])
    return outs[int(rng.choice(len(outs), p=pr / pr.sum()))][0]


# -- results ------------------------------------------------------------------------------
@dataclass
class SubsetStratum:
    k: int
    weight: float
    trials: int
    failures: float  # may be fractional for exhaustively weighted strata
    exact: bool = False

    @property
    def A(self) -> float:
        return self.failures / self.trials if self.trials else 0.0

    @property
    def variance(self) -> float:
        if self.exact or self.trials == 0:
            return 0.0
        a = self.A
        return a * (1 - a) / self.trials


@dataclass
class SimResult:
    trials: int
    failures: int
    p_logical: float
    stderr: float
    seed: int
    digest: str = ""
    method: str = "direct"
    tail: float = 0.0
    strata: list = field(default_factory=list)

    def interval(self, z: float = 2.0):
        return self.p_logical - z * self.stderr, self.p_logical + z * self.stderr


# -- direct sampling --------------------------------------------------------------------------
def _direct_chunk(args):
    exp, seed, chunk, n = args
    rng = _rng(seed, _DIRECT_STREAM, chunk)
    probs = exp.probs
    fails = 0
    for _ in range(n):
        hit = np.flatnonzero(rng.random(len(probs)) < probs)
        inj = []
        for i in hit:
            inj.extend(_sample_outcome(exp, int(i), rng))
        fails += bool(exp.run_trial(inj, rng))
    return fails


def _map(fn, tasks, workers):
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


def _chunks(trials):
    out = []
    c = 0
    left = trials
    while left > 0:
        n = min(CHUNK, left)
        out.append((c, n))
        c += 1
        left -= n
    return out


def run_direct(exp, trials: int, seed: int = 0, workers: int | None = None,
               digest: str = "") -> SimResult:
    """Plain Monte Carlo: every location fires independently with its probability."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    workers = n_workers() if workers is None else workers
    tasks = [(exp, seed, c, n) for c, n in _chunks(trials)]
    fails = sum(_map(_direct_chunk, tasks, workers))
    p = fails / trials
    return SimResult(trials, fails, p, math.sqrt(p * (1 - p) / trials), seed, digest, "direct")


# -- Poisson-binomial weights -------------------------------------------------------------------
def poisson_binomial(probs, k_max: int):
    """Exact ``P(#faults = k)`` for ``k <= k_max``; returns ``(weights, tail)``."""
    probs = np.asarray(probs, dtype=float)
    if np.any((probs < 0) | (probs > 1)):
        raise ValueError("probabilities must lie in [0, 1]")
    k_max = max(0, int(k_max))
    w = np.zeros(k_max + 1)
    w[0] = 1.0
    for p in probs:
        w[1:] = w[1:] * (1 - p) + w[:-1] * p
        w[0] *= 1 - p
    tail = max(0.0, 1.0 - float(w.sum()))
    return w, tail


class SubsetSampler:
    """Draws k-subsets with probability proportional to ``prod r_i``, ``r_i = p_i/(1-p_i)``.

    That is the exact law of the faulting set conditioned on its size.
    Suffix elementary symmetric sums ``E[i, j] = e_j(r_i, ..., r_{N-1})``
    give the next included index by inverse-CDF search.
    """

    def __init__(self, probs, k_max: int):
        p = np.asarray(probs, dtype=float)
        if np.any(p >= 1):
            raise ValueError("locations with probability 1 cannot be stratified")
        self.N = len(p)
        self.k_max = k_max
        self.r = p / (1 - p)
        N = self.N
        E = np.zeros((N + 1, k_max + 1))
        E[:, 0] = 1.0
        # forward cumsums of w_j[l] = r_l * E[l+1, j-1], one per j
        self.F = np.zeros((k_max + 1, N))
        for j in range(1, k_max + 1):
            wj = self.r * E[1:, j - 1]
            E[:N, j] = np.cumsum(wj[::-1])[::-1]
            self.F[j] = np.cumsum(wj)
        self.E = E

    def sample(self, k: int, rng) -> list[int]:
        if k > self.N:
            raise ValueError("k exceeds the number of locations")
        out = []
        s = 0
        for j in range(k, 0, -1):
            total = self.E[s, j]
            base = self.F[j, s - 1] if s > 0 else 0.0
            target = base + rng.random() * total
            i = int(np.searchsorted(self.F[j], target, side="right"))
            i = min(max(i, s), self.N - j)  # guard against round-off at the edges
            out.append(i)
            s = i + 1
        return out

    def subset_weight(self, subset) -> float:
        """Conditional probability of an exact subset given its size."""
        k = len(subset)
        return float(np.prod(self.r[list(subset)])) / self.E[0, k] if k else 1.0


# -- importance sampling ------------------------------------------------------------------------
def _stratum_chunk(args):
    exp, sampler, seed, k, chunk, n = args
    rng = _rng(seed, 1 + k, chunk)
    fails = 0
    for _ in range(n):
        inj = []
        for i in sampler.sample(k, rng):
            inj.extend(_sample_outcome(exp, i, rng))
        fails += bool(exp.run_trial(inj, rng))
    return fails


def _exhaustive_size(exp, k):
    """Number of (subset, outcome) combinations with exactly k faults: e_k of the outcome counts."""
    e = [1] + [0] * k
    for i in range(len(exp.probs)):
        m = len(exp.outcomes(i))
        for j in range(k, 0, -1):
            e[j] += e[j - 1] * m
    return e[k]


def _exhaustive_stratum(exp, sampler, k, seed):
    """Exact A_k: every subset and outcome combination, weighted.

    Each combination runs once with a fixed seed; for circuits whose
    decoding does not depend on measurement randomness this is exact.
    """
    total = 0.0
    runs = 0
    rng_seed = np.random.SeedSequence(seed, spawn_key=(10_000 + k,))
    for subset in itertools.combinations(range(len(exp.probs)), k):
        ws = sampler.subset_weight(subset)
        if ws == 0:
            continue
        for combo in itertools.product(*(exp.outcomes(i) for i in subset)):
            inj = []
            pr = ws
            for f, p in combo:
                inj.extend(f)
                pr *= p
            runs += 1
            if exp.run_trial(inj, np.random.default_rng(rng_seed)):
                total += pr
    return SubsetStratum(k, 0.0, 1, total, exact=True), runs


def estimate_strata(exp, k_max: int, trials_per_stratum: int, seed: int = 0,
                    exhaustive_budget: int = 20_000, a0_runs: int = 8,
                    workers: int | None = None, k_min: int = 0) -> list[SubsetStratum]:
    """Conditional failure rates ``A_k`` for ``k = k_min..k_max`` (weights left at 0).

    Each stratum has its own random stream, so extending a list of strata
    gives the same numbers as computing it in one go.
    """
    workers = n_workers() if workers is None else workers
    N = len(exp.probs)
    if k_max > N:
        raise ValueError(f"k_max={k_max} exceeds the {N} fault locations")
    sampler = SubsetSampler(exp.probs, k_max)
    strata = []
    if k_min == 0:
        # no faults: a handful of runs covers measurement randomness
        f0 = sum(bool(exp.run_trial([], _rng(seed, 1, c))) for c in range(a0_runs))
        strata.append(SubsetStratum(0, 0.0, a0_runs, f0))
    for k in range(max(1, k_min), k_max + 1):
        if _exhaustive_size(exp, k) <= exhaustive_budget:
            st, _ = _exhaustive_stratum(exp, sampler, k, seed)
            strata.append(st)
            continue
        tasks = [(exp, sampler, seed, k, c, n) for c, n in _chunks(trials_per_stratum)]
        fails = sum(_map(_stratum_chunk, tasks, workers))
        strata.append(SubsetStratum(k, 0.0, trials_per_stratum, fails))
    return strata


def combine(strata, probs, seed: int = 0, digest: str = "") -> SimResult:
    """Weight conditional rates by Poisson-binomial stratum probabilities."""
    k_max = strata[-1].k
    w, tail = poisson_binomial(probs, k_max)
    est = 0.0
    var = 0.0
    out = []
    for st in strata:
        wk = float(w[st.k])
        out.append(SubsetStratum(st.k, wk, st.trials, st.failures, st.exact))
        est += wk * st.A
        var += wk * wk * st.variance
    trials = sum(s.trials for s in strata if not s.exact)
    fails = int(sum(s.failures for s in strata if not s.exact))
    return SimResult(trials, fails, est, math.sqrt(var) + tail, seed, digest, "importance",
                     tail, out)


def run_importance(exp, trials_per_stratum: int = 2000, k_max: int = 4, seed: int = 0,
                   exhaustive_budget: int = 20_000, workers: int | None = None,
                   digest: str = "", k_cap: int = 12) -> SimResult:
    """Subset-sampling estimate of the logical failure probability.

    Strata ``k <= k_max`` are estimated (exactly when small enough); the
    untreated tail probability is added to the standard error.  ``k_max``
    grows, up to ``k_cap``, while the tail exceeds 10% of the estimate.
    """
    if k_max < 2 and len(exp.probs) >= 2:
        raise ValueError("k_max must be >= 2")
    N = len(exp.probs)
    if k_max > N:
        raise ValueError(f"k_max={k_max} exceeds the {N} fault locations")
    while True:
        strata = estimate_strata(exp, k_max, trials_per_stratum, seed, exhaustive_budget,
                                 workers=workers)
        res = combine(strata, exp.probs, seed, digest)
        if res.tail <= 0.1 * res.p_logical or k_max >= min(N, k_cap):
            return res
        k_max += 1


def exact_failure_probability(exp) -> float:
    """Brute force over every fault pattern; only for toy experiments."""
    N = len(exp.probs)
    total = 0.0
    for mask in range(1 << N):
        subset = [i for i in range(N) if (mask >> i) & 1]
        base = 1.0
        for i in range(N):
            base *= exp.probs[i] if (mask >> i) & 1 else 1 - exp.probs[i]
        if base == 0:
            continue
        for combo in itertools.product(*(exp.outcomes(i) for i in subset)):
            inj = []
            pr = base
            for f, p in combo:
                inj.extend(f)
                pr *= p
            if exp.run_trial(inj, np.random.default_rng(0)):
                total += pr
    return total


# -- threshold and crossover searches ------------------------------------------------------------
@dataclass
class ThresholdResult:
    p_star: float
    low: float
    high: float
    evaluations: int
    strata: list = field(default_factory=list)


def _binom_probs(N, p):
    return np.full(N, p)


def _cross(fn, lo, hi, tol):
    flo, fhi = fn(lo), fn(hi)
    if flo > 0 or fhi < 0:
        return None
    n = 0
    while hi / lo > 1 + tol:
        mid = math.sqrt(lo * hi)
        if fn(mid) < 0:
            lo = mid
        else:
            hi = mid
        n += 1
    return math.sqrt(lo * hi), n


def pseudothreshold(code: CodeSpec, rounds: int = 1, comparator=None, bracket=(1e-4, 3e-2),
                    tolerance: float = 0.01, trials_per_stratum: int = 20_000, k_max: int = 4,
                    seed: int = 0, model_family=Depolarizing, workers: int | None = None,
                    k_cap: int = 10):
    """Physical rate where the encoded failure rate meets ``comparator(p)`` (default ``p``).

    Under a homogeneous model the conditional rates ``A_k`` do not depend on
    ``p``, so they are estimated once and the bisection only reweights them.
    Probability beyond ``k_max`` faults is charged at ``A_{k_max}`` (failure
    rates grow with the fault count), and ``k_max`` is raised while that
    tail exceeds 10% of ``p_L`` at the crossing.  The reported interval
    solves the same equation for ``p_L -+ 2 sigma``.
    """
    comparator = comparator or (lambda p: p)
    exp = CircuitExperiment(code, rounds, model_family(bracket[0]))
    if not exp.homogeneous:
        raise ValueError("pseudothreshold bisection needs a homogeneous model")
    N = len(exp.probs)
    k_max = min(k_max, N)
    strata = estimate_strata(exp, k_max, trials_per_stratum, seed, workers=workers)
    while True:
        def curve(shift, strata=strata):
            def f(p):
                r = combine(strata, _binom_probs(N, p))
                est = r.p_logical + r.tail * strata[-1].A
                sd = r.stderr - r.tail
                return est + shift * sd - comparator(p)
            return f

        mid = _cross(curve(0.0), *bracket, tolerance)
        if mid is None:
            raise ValueError(f"no sign change of p_L(p) - comparator(p) in {bracket}")
        p_star, n = mid
        r = combine(strata, _binom_probs(N, p_star))
        if r.tail <= 0.1 * max(r.p_logical, 1e-300) or k_max >= min(N, k_cap):
            break
        k_max += 1
        strata = strata + estimate_strata(exp, k_max, trials_per_stratum, seed,
                                          workers=workers, k_min=k_max)
    hi_p = _cross(curve(-2.0), *bracket, tolerance)
    lo_p = _cross(curve(+2.0), *bracket, tolerance)
    return ThresholdResult(p_star, lo_p[0] if lo_p else bracket[0],
                           hi_p[0] if hi_p else bracket[1], n, strata)


class NoCrossingError(RuntimeError):
    """No significant crossing up to the round limit; ``table`` holds the sweep."""

    def __init__(self, msg, table):
        super().__init__(msg)
        self.table = table


@dataclass
class CrossoverResult:
    rounds: int | None
    table: list  # (rounds, SimResult for Surface-17, SimResult for Bacon-Shor-13)


def estimate(exp, trials: int, seed: int, method: str = "auto", k_max: int = 4,
             workers: int | None = None) -> SimResult:
    """Pick direct sampling when faults are common, subset sampling when rare."""
    if method == "auto":
        method = "direct" if float(np.sum(exp.probs)) > 0.5 else "importance"
    if method == "direct":
        return run_direct(exp, trials, seed, workers)
    return run_importance(exp, trials, k_max, seed, workers=workers)


def crossover_rounds(p: float, max_rounds: int = 12, trials: int = 20_000, seed: int = 0,
                     method: str = "auto", start: int = 1, workers: int | None = None,
                     z: float = 2.0) -> CrossoverResult:
    """First round count where Surface-17 beats Bacon-Shor-13 with non-overlapping z-sigma bars.

    Raises NoCrossingError, carrying the sweep, if none occurs by ``max_rounds``.
    """
    if p <= 0:
        raise ValueError("p must be > 0")
    from .codes import baconshor, surface17

    s17, bs = surface17(), baconshor(3)
    rows = []
    for r in range(start, max_rounds + 1):
        a = estimate(CircuitExperiment(s17, r, Depolarizing(p)), trials, seed, method,
                     workers=workers)
        b = estimate(CircuitExperiment(bs, r, Depolarizing(p)), trials, seed, method,
                     workers=workers)
        rows.append((r, a, b))
        if a.p_logical + z * a.stderr < b.p_logical - z * b.stderr:
            return CrossoverResult(r, rows)
    raise NoCrossingError(f"no significant crossing up to {max_rounds} rounds at p={p}", rows)
