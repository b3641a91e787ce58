"""Allocation solvers.

``solve_umpma`` is the swap-based heuristic: place patients that cannot meet
their bound locally, then alternate two-way swaps, one-way moves and greedy
placement until the utility stops rising. ``solve_base`` is the one-pass
criticality-ordered greedy used for comparison and ``solve_exact`` enumerates
every assignment.

The swap and greedy passes evaluate all candidate moves at once with numpy
but pick the first improving candidate in the same order a nested
server/patient scan would visit them, restarting after each change.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .allocation import LOCAL, Allocation, Instance, Objective
from .economics import PricingConfig
from .errors import BudgetExceededError, InfeasibleInstanceError
from .system import MEGACYCLE, PatientProfile, SystemParams

IMPROVEMENT_EPS = 1e-9
DEFAULT_BUDGET = 10 ** 7
_NO_LIMIT = np.iinfo(np.int64).max


@dataclass
class SolveReport:
    solver_name: str
    allocation: Allocation
    objective: Objective
    outer_iterations: int
    utility_trace: List[float]
    infeasible_patients: List[int]
    wall_time: float
    greedy_maxima: List[List[float]] = field(default_factory=list)
    stats: Dict[str, int] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return not self.infeasible_patients

    @property
    def n_fog_assigned(self) -> int:
        return sum(self.allocation.occupancy)


class _Search:
    """Mutable allocation plus per-server aggregates used by the vectorised passes."""

    def __init__(self, inst: Instance, audit: bool = False):
        self.inst = inst
        self.audit = audit
        F = inst.num_fs
        self.alloc = Allocation(inst.num_patients, F)
        self.where = np.full(inst.num_patients, LOCAL, dtype=np.int64)
        self.occ = np.zeros(F, dtype=np.int64)
        self.load = np.zeros(F)
        self.floor = np.full(F, _NO_LIMIT, dtype=np.int64)
        self.gamma = inst.params.fog_capacity_hz
        self.lam1 = inst.params.lambda1
        self.lam2 = inst.params.lambda2
        self.stats = {"two_way_swaps": 0, "one_way_moves": 0, "greedy_assignments": 0}

    # bookkeeping

    def _refresh(self, *servers):
        inst = self.inst
        for f in servers:
            members = sorted(self.alloc.members[f])
            self.occ[f] = len(members)
            self.load[f] = math.fsum(inst.rho_beta[q] for q in members)
            self.floor[f] = inst.n_max[members, f].min() if members else _NO_LIMIT
        if self.audit:
            self.check()

    def check(self):
        self.alloc.check()
        assert list(self.occ) == self.alloc.occupancy
        for f, members in enumerate(self.alloc.members):
            for q in members:
                assert self.occ[f] <= self.inst.n_max[q, f], f"server {f} over capacity for patient {q}"

    def place(self, p, f):
        self.alloc.place(p, f)
        self.where[p] = f
        self._refresh(f)

    def move(self, p, g):
        f = self.alloc.server(p)
        self.alloc.move(p, g)
        self.where[p] = g
        self._refresh(f, g)

    def swap(self, p, q):
        f, g = self.alloc.server(p), self.alloc.server(q)
        self.alloc.swap(p, q)
        self.where[p], self.where[q] = g, f
        self._refresh(f, g)

    # candidate evaluation

    def assign_gains(self, cand: np.ndarray) -> np.ndarray:
        """Utility change for every (local candidate, server); ``-inf`` where there is no room."""
        inst = self.inst
        occ = self.occ[None, :]
        own = inst.rho[cand, None] * (inst.t_local[cand, None]
                                      - (inst.beta[cand, None] * (occ + 1) / self.gamma + inst.t_tr[cand, :]))
        gains = self.lam1 * inst.margin[cand, None] + self.lam2 * own - self.lam2 * self.load[None, :] / self.gamma
        room = occ + 1 <= np.minimum(self.floor[None, :], inst.n_max[cand, :])
        return np.where(room, gains, -np.inf)

    def two_way_gains(self, a: np.ndarray, b: np.ndarray):
        """Cost drop and admissibility of exchanging each fog patient in ``a`` with each in ``b``.

        Both matrices are symmetric under exchanging the roles of ``a`` and ``b``.
        """
        inst = self.inst
        sa, sb = self.where[a], self.where[b]
        na, nb = self.occ[sa], self.occ[sb]
        drop = (inst.rho[a, None] * (inst.t_tr[a, sa][:, None] - inst.t_tr[a[:, None], sb[None, :]])
                + inst.rho[b][None, :] * (inst.t_tr[b, sb][None, :] - inst.t_tr[b[None, :], sa[:, None]])
                + (inst.rho_beta[a, None] - inst.rho_beta[b][None, :]) * (na[:, None] - nb[None, :]) / self.gamma)
        a_fits = nb[None, :] <= inst.n_max[a[:, None], sb[None, :]]   # a may join b's server
        b_fits = na[:, None] <= inst.n_max[b[None, :], sa[:, None]]
        allowed = a_fits & b_fits & (sa[:, None] != sb[None, :])
        return drop, allowed

    def one_way_gains(self, idx: np.ndarray):
        inst = self.inst
        s = self.where[idx]
        rho = inst.rho[idx]
        rb = inst.rho_beta[idx]
        occ = self.occ[None, :]
        drop = (rho[:, None] * (inst.t_tr[idx, s][:, None] - inst.t_tr[idx, :])
                + rb[:, None] * (self.occ[s][:, None] - occ - 1) / self.gamma
                + (self.load[s][:, None] - rb[:, None]) / self.gamma
                - self.load[None, :] / self.gamma)
        room = occ + 1 <= np.minimum(self.floor[None, :], inst.n_max[idx, :])
        allowed = room & (np.arange(self.inst.num_fs)[None, :] != s[:, None])
        return drop, allowed

    # passes

    def place_violators(self, order: Sequence[int]) -> List[int]:
        """Put each violator on its best server with room, even at negative gain."""
        stranded = []
        for p in order:
            gains = self.assign_gains(np.array([p]))[0]
            f = int(np.argmax(gains))
            if gains[f] == -np.inf:
                stranded.append(p)
            else:
                self.place(p, f)
        return stranded

    def _first_in_scan_order(self, idx: np.ndarray, ok: np.ndarray):
        """Position of the entry a server-major, patient-minor nested scan would reach first."""
        rows = np.flatnonzero(ok.any(axis=1))
        if rows.size == 0:
            return None
        i = rows[np.lexsort((idx[rows], self.where[idx[rows]]))[0]]
        cols = np.flatnonzero(ok[i])
        j = cols[np.lexsort((idx[cols], self.where[idx[cols]]))[0]]
        return i, j

    def two_way_pass(self) -> int:
        # A swap leaves every occupancy unchanged, so only the two swapped
        # patients' rows and columns need re-evaluating before the rescan.
        idx = np.flatnonzero(self.where != LOCAL)
        swaps = 0
        if idx.size >= 2:
            drop, allowed = self.two_way_gains(idx, idx)
            ok = allowed & (drop > IMPROVEMENT_EPS)
            while True:
                hit = self._first_in_scan_order(idx, ok)
                if hit is None:
                    break
                i, j = hit
                self.swap(int(idx[i]), int(idx[j]))
                swaps += 1
                changed = np.array([i, j])
                d, a = self.two_way_gains(idx[changed], idx)
                ok[changed, :] = a & (d > IMPROVEMENT_EPS)
                ok[:, changed] = ok[changed, :].T
        self.stats["two_way_swaps"] += swaps
        return swaps

    def one_way_pass(self) -> int:
        moves = 0
        idx = np.flatnonzero(self.where != LOCAL)
        if idx.size and self.inst.num_fs > 1:
            while True:
                drop, allowed = self.one_way_gains(idx)
                ok = allowed & (drop > IMPROVEMENT_EPS)
                rows = np.flatnonzero(ok.any(axis=1))
                if rows.size == 0:
                    break
                i = rows[np.lexsort((idx[rows], self.where[idx[rows]]))[0]]
                self.move(int(idx[i]), int(np.argmax(ok[i])))
                moves += 1
        self.stats["one_way_moves"] += moves
        return moves

    def greedy(self, remaining: Sequence[int]) -> List[float]:
        """Repeatedly place the single best (patient, server) pair while it gains utility.

        Returns the best gain of every round, which never increases.
        """
        pool = np.array(sorted(p for p in remaining if self.where[p] == LOCAL), dtype=np.int64)
        maxima = []
        if pool.size == 0 or self.inst.num_fs == 0:
            return maxima
        gains = self.assign_gains(pool)
        placed = np.zeros(pool.size, dtype=bool)
        for _ in range(pool.size):
            k = int(np.argmax(gains))
            best = gains.flat[k]
            if not best > 0.0:
                break
            i, f = divmod(k, self.inst.num_fs)
            self.place(int(pool[i]), f)
            maxima.append(float(best))
            placed[i] = True
            # only server f changed; placed patients stay out of the pool
            gains[:, f] = self.assign_gains(pool)[:, f]
            gains[placed, :] = -np.inf
        self.stats["greedy_assignments"] += len(maxima)
        return maxima


def _instance(profiles, params, pricing, num_fs, instance):
    if instance is not None:
        return instance
    return Instance(profiles, params, pricing, num_fs)


def solve_umpma(profiles: Sequence[PatientProfile], params: SystemParams, pricing: PricingConfig,
                num_fs: int, *, audit: bool = False, instance: Optional[Instance] = None) -> SolveReport:
    started = time.perf_counter()
    inst = _instance(profiles, params, pricing, num_fs, instance)
    search = _Search(inst, audit)

    stranded = search.place_violators(inst.violators)
    search.two_way_pass()
    search.one_way_pass()
    remaining = [p for p in range(inst.num_patients) if not inst.is_violator[p]]
    maxima = [search.greedy(remaining)]
    trace = [inst.objective(search.alloc).utility]

    iterations = 0
    while True:
        iterations += 1
        search.two_way_pass()
        search.one_way_pass()
        maxima.append(search.greedy(remaining))
        trace.append(inst.objective(search.alloc).utility)
        if not trace[-1] > trace[-2] + IMPROVEMENT_EPS:
            break

    return SolveReport(
        solver_name="umpma",
        allocation=search.alloc,
        objective=inst.objective(search.alloc),
        outer_iterations=iterations,
        utility_trace=trace,
        infeasible_patients=stranded,
        wall_time=time.perf_counter() - started,
        greedy_maxima=maxima,
        stats=dict(search.stats),
    )


def solve_base(profiles: Sequence[PatientProfile], params: SystemParams, pricing: PricingConfig,
               num_fs: int, *, audit: bool = False, instance: Optional[Instance] = None) -> SolveReport:
    """Criticality-ordered single pass; nobody is ever moved once placed."""
    started = time.perf_counter()
    inst = _instance(profiles, params, pricing, num_fs, instance)
    search = _Search(inst, audit)
    stranded = search.place_violators(inst.violators)
    rest = sorted((p for p in range(inst.num_patients) if not inst.is_violator[p]),
                  key=lambda p: (-inst.rho[p], p))
    for p in rest:
        gains = search.assign_gains(np.array([p]))[0]
        f = int(np.argmax(gains))
        if gains[f] > 0.0:
            search.place(p, f)
            search.stats["greedy_assignments"] += 1
    objective = inst.objective(search.alloc)
    return SolveReport(
        solver_name="base",
        allocation=search.alloc,
        objective=objective,
        outer_iterations=1,
        utility_trace=[objective.utility],
        infeasible_patients=stranded,
        wall_time=time.perf_counter() - started,
        stats=dict(search.stats),
    )


def solve_exact(profiles: Sequence[PatientProfile], params: SystemParams, pricing: PricingConfig,
                num_fs: int, *, budget: int = DEFAULT_BUDGET,
                instance: Optional[Instance] = None) -> SolveReport:
    """Maximum-utility feasible allocation by depth-first enumeration.

    Branches are cut as soon as a server holds more patients than any of its
    occupants tolerates, since occupancy only grows deeper in the tree.
    Raises :class:`BudgetExceededError` when ``(F+1)**P`` exceeds ``budget``
    and :class:`InfeasibleInstanceError` when no feasible allocation exists.
    """
    P, F = len(profiles), num_fs
    leaves = (F + 1) ** P
    if leaves > budget:
        raise BudgetExceededError(f"{leaves} assignments for P={P}, F={F} exceeds budget {budget}")
    started = time.perf_counter()
    inst = _instance(profiles, params, pricing, num_fs, instance)
    lam1, lam2, gamma = params.lambda1, params.lambda2, params.fog_capacity_hz

    local_val = [lam1 * pricing.local_price - lam2 * inst.rho[p] * inst.t_local[p] for p in range(P)]
    fog_val = [[lam1 * (pricing.fog_price - pricing.per_cycle_cost * inst.beta[p] / MEGACYCLE)
                - lam2 * inst.rho[p] * inst.t_tr[p, f] for f in range(F)] for p in range(P)]
    n_max = inst.n_max.tolist()
    rho_beta = inst.rho_beta.tolist()
    may_stay = [not v for v in inst.is_violator.tolist()]
    fixed = -lam1 * pricing.fixed_fs_cost * F

    occ = [0] * F
    load = [0.0] * F
    floor = [P + 1] * F
    choice = [LOCAL] * P
    best_val = -math.inf
    best_choice = None
    visited = 0

    def descend(p, acc):
        nonlocal best_val, best_choice, visited
        if p == P:
            visited += 1
            share = 0.0
            for f in range(F):
                share += occ[f] * load[f]
            val = acc + fixed - lam2 * share / gamma
            if val > best_val:
                best_val, best_choice = val, list(choice)
            return
        if may_stay[p]:
            choice[p] = LOCAL
            descend(p + 1, acc + local_val[p])
        bounds = n_max[p]
        for f in range(F):
            n1 = occ[f] + 1
            if n1 > floor[f] or n1 > bounds[f]:
                continue
            old_load, old_floor = load[f], floor[f]
            occ[f] = n1
            load[f] = old_load + rho_beta[p]
            floor[f] = min(old_floor, bounds[f])
            choice[p] = f
            descend(p + 1, acc + fog_val[p][f])
            occ[f] -= 1
            load[f], floor[f] = old_load, old_floor
        choice[p] = LOCAL

    descend(0, 0.0)
    if best_choice is None:
        raise InfeasibleInstanceError(f"no feasible allocation for P={P}, F={F}")
    alloc = Allocation.from_assignment(best_choice, F)
    objective = inst.objective(alloc)
    return SolveReport(
        solver_name="exact",
        allocation=alloc,
        objective=objective,
        outer_iterations=1,
        utility_trace=[objective.utility],
        infeasible_patients=[],
        wall_time=time.perf_counter() - started,
        stats={"leaves_visited": visited},
    )


SOLVERS = {"umpma": solve_umpma, "base": solve_base, "exact": solve_exact}
