"""Linear angle schedules, their multistart optimization, and the search for the
smallest depth reaching a target approximation ratio.

A schedule is four numbers: the first and last beta and gamma; intermediate
layers interpolate linearly. Optimization is Nelder-Mead over that 4-box from
seeded random starts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import optimize

from .errors import InvalidParamsError, SizeLimitError
from .graphs import Graph
from .reduced import (
    GENERIC_N_CAP,
    ReducedEngine,
    build_orbit_basis,
    hamming_reduced_ops,
    reduce_operators,
)
from .simulator import MAX_QUBITS, Angles, Engine, maxcut_diagonal

BETA_MAX = math.pi
GAMMA_MAX = 2.0 * math.pi
_BOX_HI = np.array([BETA_MAX, BETA_MAX, GAMMA_MAX, GAMMA_MAX])

REDUCED_DIM_CAP = 1024


@dataclass(frozen=True)
class LinearSchedule:
    p: int
    beta_start: float
    beta_end: float
    gamma_start: float
    gamma_end: float

    def __post_init__(self):
        if self.p < 1:
            raise InvalidParamsError(f"depth must be >= 1, got {self.p}")

    def expand(self) -> Angles:
        """Per-layer angles; p = 1 uses the start values alone."""
        if self.p == 1:
            return Angles((self.beta_start,), (self.gamma_start,))
        betas = np.linspace(self.beta_start, self.beta_end, self.p)
        gammas = np.linspace(self.gamma_start, self.gamma_end, self.p)
        return Angles(tuple(betas), tuple(gammas))


def max_cut_brute(g: Graph) -> int:
    """Exact maximum cut; vertex n-1 is pinned to side 0 (complement symmetry)."""
    if g.n > MAX_QUBITS:
        raise SizeLimitError(f"brute force needs n <= {MAX_QUBITS}, got {g.n}")
    total = 1 << max(g.n - 1, 0)
    best = 0
    chunk = 1 << 22
    for lo in range(0, total, chunk):
        x = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        cuts = np.zeros(len(x), dtype=np.int64)
        for u, v in g.edges:
            cuts += ((x >> u) ^ (x >> v)) & 1
        best = max(best, int(cuts.max()) if len(cuts) else 0)
    return best


def _is_complete(g: Graph) -> bool:
    return g.n >= 2 and g.m == g.n * (g.n - 1) // 2


def make_engine(g: Graph):
    """Cheapest exact evaluator for a graph: the Hamming ladder for complete
    graphs, a generic orbit basis when it is small enough, else the full
    statevector."""
    if _is_complete(g):
        return ReducedEngine(hamming_reduced_ops(g.n))
    if g.n <= GENERIC_N_CAP:
        basis = build_orbit_basis(g, include_flip=True)
        if basis.dim <= REDUCED_DIM_CAP:
            return ReducedEngine(reduce_operators(maxcut_diagonal(g), basis))
    return Engine(maxcut_diagonal(g))


class ScheduleEvaluator:
    """Engine plus exact optimum for one graph, reused across many schedules."""

    def __init__(self, g: Graph):
        self.graph = g
        self.optimum = max_cut_brute(g)
        if self.optimum == 0:
            raise InvalidParamsError("graph has no edges; approximation ratio undefined")
        self.engine = make_engine(g)

    def ratio_of(self, p: int, params: np.ndarray) -> float:
        if p == 1:
            betas = params[0:1]
            gammas = params[2:3]
        else:
            betas = np.linspace(params[0], params[1], p)
            gammas = np.linspace(params[2], params[3], p)
        return self.engine.expectation(betas, gammas) / self.optimum

    def ratio(self, schedule: LinearSchedule) -> float:
        params = np.array(
            [schedule.beta_start, schedule.beta_end, schedule.gamma_start, schedule.gamma_end]
        )
        return self.ratio_of(schedule.p, params)


def approx_ratio(g: Graph, schedule: LinearSchedule) -> float:
    return ScheduleEvaluator(g).ratio(schedule)


def _initial_simplex(x0: np.ndarray) -> np.ndarray:
    simplex = np.tile(x0, (5, 1))
    for j in range(4):
        step = 0.15 if x0[j] + 0.15 <= _BOX_HI[j] else -0.15
        simplex[j + 1, j] += step
    return simplex


def optimize_linear(
    g: Graph,
    p: int,
    restarts: int = 50,
    seed=None,
    evaluator: ScheduleEvaluator | None = None,
) -> tuple[LinearSchedule, float]:
    """Best linear schedule over seeded Nelder-Mead restarts.

    Deterministic for a fixed seed; the winner is the strictly best final
    ratio, ties going to the earliest restart, and the returned ratio is
    re-evaluated exactly at the returned schedule.
    """
    if restarts < 1:
        raise InvalidParamsError(f"need restarts >= 1, got {restarts}")
    if p < 1:
        raise InvalidParamsError(f"depth must be >= 1, got {p}")
    ev = evaluator if evaluator is not None else ScheduleEvaluator(g)
    rng = np.random.default_rng(seed)
    starts = rng.random((restarts, 4)) * _BOX_HI
    bounds = [(0.0, BETA_MAX), (0.0, BETA_MAX), (0.0, GAMMA_MAX), (0.0, GAMMA_MAX)]

    def objective(x: np.ndarray) -> float:
        return -ev.ratio_of(p, x)

    best_x = None
    best_val = -math.inf
    for x0 in starts:
        res = optimize.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "initial_simplex": _initial_simplex(x0),
                "fatol": 1e-6,
                "xatol": np.inf,
                "maxfev": 500,
                "maxiter": 10**6,
                "disp": False,
            },
        )
        val = -float(res.fun)
        if val > best_val:
            best_val = val
            best_x = np.clip(res.x, 0.0, _BOX_HI)
    schedule = LinearSchedule(p, *(float(v) for v in best_x))
    return schedule, ev.ratio_of(p, best_x)


class TraceEntry(NamedTuple):
    p: int
    ratio: float
    schedule: LinearSchedule


@dataclass(frozen=True)
class PminResult:
    """Outcome of the depth search: the smallest depth whose optimized ratio
    reached the target, or a censored marker when the cap was exhausted."""

    p_min: int | None
    censored: bool
    ratio_achieved: float
    best_schedule: LinearSchedule
    optimum_cut: int
    trace: tuple[TraceEntry, ...]


def find_pmin(
    g: Graph,
    target_ratio: float = 0.95,
    p_start: int = 2,
    p_cap: int = 25,
    restarts: int = 50,
    seed=None,
) -> PminResult:
    """Scan depths p_start..p_cap until the optimized ratio meets the target.

    Each depth draws an independent seed stream keyed by p, so results for one
    depth do not depend on where the scan started. A target above 1 is allowed
    and simply censors (no ratio can exceed 1).
    """
    if target_ratio <= 0:
        raise InvalidParamsError(f"target ratio must be positive, got {target_ratio}")
    if p_start < 1 or p_cap < p_start:
        raise InvalidParamsError(f"bad depth range [{p_start}, {p_cap}]")
    entropy = np.random.SeedSequence(seed).entropy
    ev = ScheduleEvaluator(g)
    trace: list[TraceEntry] = []
    for p in range(p_start, p_cap + 1):
        child = np.random.SeedSequence(entropy=entropy, spawn_key=(p,))
        schedule, ratio = optimize_linear(g, p, restarts=restarts, seed=child, evaluator=ev)
        trace.append(TraceEntry(p, ratio, schedule))
        if ratio >= target_ratio:
            return PminResult(p, False, ratio, schedule, ev.optimum, tuple(trace))
    best = max(trace, key=lambda t: t.ratio)
    return PminResult(None, True, best.ratio, best.schedule, ev.optimum, tuple(trace))


def trace_csv(result: PminResult) -> str:
    lines = ["p,best_ratio,beta_start,beta_end,gamma_start,gamma_end"]
    for entry in result.trace:
        s = entry.schedule
        lines.append(
            f"{entry.p},{entry.ratio!r},{s.beta_start!r},{s.beta_end!r},"
            f"{s.gamma_start!r},{s.gamma_end!r}"
        )
    return "\n".join(lines) + "\n"
