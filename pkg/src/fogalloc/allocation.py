"""Allocation state, objective, latency feasibility and incremental utility changes.

Patients are addressed by their position in the profile sequence and fog
servers by a 0-based index; ``LOCAL`` marks a patient computing on its own
device.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence

import numpy as np

from .economics import PricingConfig, profit_breakdown
from .system import (
    PatientProfile,
    SystemParams,
    fog_compute_time,
    latency_bound,
    local_compute_time,
    transmission_rate,
    transmission_time,
)

LOCAL = -1


class Allocation:
    """Which server (or the local device) computes each patient's data.

    Occupancy counts and member sets are maintained alongside the
    per-patient assignment; :meth:`check` recomputes them from scratch.
    """

    def __init__(self, num_patients: int, num_fs: int):
        self.num_fs = num_fs
        self.assignment: List[int] = [LOCAL] * num_patients
        self.members: List[set] = [set() for _ in range(num_fs)]
        self.occupancy: List[int] = [0] * num_fs

    @classmethod
    def from_assignment(cls, assignment: Iterable[int], num_fs: int) -> "Allocation":
        assignment = list(assignment)
        alloc = cls(len(assignment), num_fs)
        for p, f in enumerate(assignment):
            if f != LOCAL:
                alloc.place(p, f)
        return alloc

    @property
    def num_patients(self) -> int:
        return len(self.assignment)

    def server(self, p: int) -> int:
        return self.assignment[p]

    def on_fog(self, p: int) -> bool:
        return self.assignment[p] != LOCAL

    def fog_flags(self) -> List[bool]:
        return [f != LOCAL for f in self.assignment]

    def fog_patients(self) -> List[int]:
        return [p for p, f in enumerate(self.assignment) if f != LOCAL]

    def local_patients(self) -> List[int]:
        return [p for p, f in enumerate(self.assignment) if f == LOCAL]

    def place(self, p: int, f: int) -> None:
        if self.assignment[p] != LOCAL:
            raise ValueError(f"patient {p} is already on server {self.assignment[p]}")
        if not 0 <= f < self.num_fs:
            raise IndexError(f"no fog server {f}")
        self.assignment[p] = f
        self.members[f].add(p)
        self.occupancy[f] += 1

    def release(self, p: int) -> None:
        f = self.assignment[p]
        if f == LOCAL:
            raise ValueError(f"patient {p} is not on a fog server")
        self.assignment[p] = LOCAL
        self.members[f].remove(p)
        self.occupancy[f] -= 1

    def move(self, p: int, f: int) -> None:
        self.release(p)
        self.place(p, f)

    def swap(self, p: int, q: int) -> None:
        fp, fq = self.assignment[p], self.assignment[q]
        if fp == LOCAL or fq == LOCAL or fp == fq:
            raise ValueError("swap needs two patients on different fog servers")
        self.members[fp].remove(p)
        self.members[fq].remove(q)
        self.members[fp].add(q)
        self.members[fq].add(p)
        self.assignment[p], self.assignment[q] = fq, fp

    def copy(self) -> "Allocation":
        return Allocation.from_assignment(self.assignment, self.num_fs)

    def check(self) -> None:
        """Raise ``AssertionError`` if the maintained bookkeeping has drifted."""
        members = [set() for _ in range(self.num_fs)]
        for p, f in enumerate(self.assignment):
            if f != LOCAL:
                members[f].add(p)
        assert members == self.members, "member sets out of sync"
        assert [len(m) for m in members] == self.occupancy, "occupancy out of sync"

    def __eq__(self, other):
        if not isinstance(other, Allocation):
            return NotImplemented
        return self.num_fs == other.num_fs and self.assignment == other.assignment

    def __repr__(self):
        return f"Allocation(assignment={self.assignment}, num_fs={self.num_fs})"


@dataclass(frozen=True)
class Objective:
    utility: float
    profit: float
    patient_cost: float
    revenue: float = 0.0
    expenditure: float = 0.0


# -- from-scratch evaluation -------------------------------------------------

def patient_latency(p: int, allocation: Allocation, profiles: Sequence[PatientProfile],
                    params: SystemParams) -> float:
    prof = profiles[p]
    f = allocation.server(p)
    if f == LOCAL:
        return local_compute_time(prof.cpu_cycles, params)
    t_tr = transmission_time(prof.data_bits, transmission_rate(prof, f, params))
    return t_tr + fog_compute_time(prof.cpu_cycles, allocation.occupancy[f], params)


def cost_J(allocation: Allocation, profiles: Sequence[PatientProfile], params: SystemParams) -> float:
    """Criticality-weighted latency summed over all patients."""
    return math.fsum(prof.criticality * patient_latency(p, allocation, profiles, params)
                     for p, prof in enumerate(profiles))


def utility_U(allocation: Allocation, profiles: Sequence[PatientProfile], params: SystemParams,
              pricing: PricingConfig, num_fs: int) -> Objective:
    money = profit_breakdown(allocation.fog_flags(), profiles, pricing, num_fs)
    cost = cost_J(allocation, profiles, params)
    utility = params.lambda1 * money.profit - params.lambda2 * cost
    return Objective(utility, money.profit, cost, money.revenue, money.expenditure)


def latency_violations(allocation: Allocation, profiles: Sequence[PatientProfile],
                       params: SystemParams) -> List[int]:
    """Patients whose latency exceeds their criticality-scaled bound."""
    return [p for p, prof in enumerate(profiles)
            if patient_latency(p, allocation, profiles, params) > latency_bound(prof, params)]


def is_feasible(allocation: Allocation, profiles: Sequence[PatientProfile], params: SystemParams) -> bool:
    return not latency_violations(allocation, profiles, params)


def violators(profiles: Sequence[PatientProfile], params: SystemParams) -> List[int]:
    """Patients that cannot meet their bound on the local device, most critical first."""
    found = [p for p, prof in enumerate(profiles)
             if local_compute_time(prof.cpu_cycles, params) > latency_bound(prof, params)]
    return sorted(found, key=lambda p: (-profiles[p].criticality, p))


def _n_max_from(beta: float, t_tr: float, bound: float, params: SystemParams, cap: int) -> int:
    slack = bound - t_tr
    if slack < 0 or cap <= 0:
        return 0
    n = min(math.floor(params.fog_capacity_hz / beta * slack), cap)
    # nudge across float boundaries so the count agrees with the direct latency test
    while n < cap and t_tr + fog_compute_time(beta, n + 1, params) <= bound:
        n += 1
    while n > 0 and t_tr + fog_compute_time(beta, n, params) > bound:
        n -= 1
    return n


def n_max(p: int, f: int, profiles: Sequence[PatientProfile], params: SystemParams) -> int:
    """Largest occupancy of server ``f`` under which patient ``p`` still meets its bound.

    Zero means ``p`` can never use ``f``; the value is capped at the number
    of patients.
    """
    prof = profiles[p]
    t_tr = transmission_time(prof.data_bits, transmission_rate(prof, f, params))
    return _n_max_from(prof.cpu_cycles, t_tr, latency_bound(prof, params), params, len(profiles))


def room_for(p: int, f: int, allocation: Allocation, n_max_table) -> bool:
    """True if adding ``p`` to ``f`` keeps every occupant within its own occupancy bound."""
    limit = n_max_table[p][f]
    for q in allocation.members[f]:
        limit = min(limit, n_max_table[q][f])
    return allocation.occupancy[f] + 1 <= limit


# -- precomputed instance and incremental deltas ------------------------------

class Instance:
    """Per-patient and per-(patient, server) quantities that never change during a solve."""

    def __init__(self, profiles: Sequence[PatientProfile], params: SystemParams,
                 pricing: PricingConfig, num_fs: int):
        self.profiles = tuple(profiles)
        self.params = params
        self.pricing = pricing
        self.num_fs = num_fs
        P = len(self.profiles)
        self.num_patients = P
        self.rho = np.array([x.criticality for x in self.profiles], dtype=float)
        self.eta = np.array([x.data_bits for x in self.profiles], dtype=float)
        self.beta = np.array([x.cpu_cycles for x in self.profiles], dtype=float)
        self.rho_beta = self.rho * self.beta
        self.t_local = np.array([local_compute_time(x.cpu_cycles, params) for x in self.profiles])
        self.bound = np.array([latency_bound(x, params) for x in self.profiles])
        self.margin = np.array([pricing.fog_margin(x.cpu_cycles) for x in self.profiles])
        self.t_tr = np.empty((P, num_fs))
        self.n_max = np.empty((P, num_fs), dtype=np.int64)
        for p, prof in enumerate(self.profiles):
            for f in range(num_fs):
                t = transmission_time(prof.data_bits, transmission_rate(prof, f, params))
                self.t_tr[p, f] = t
                self.n_max[p, f] = _n_max_from(prof.cpu_cycles, t, self.bound[p], params, P)
        self.is_violator = self.t_local > self.bound
        self.violators = violators(self.profiles, params)

    def load(self, allocation: Allocation, f: int) -> float:
        """Sum of criticality times cycles over the occupants of ``f``."""
        return math.fsum(self.rho_beta[q] for q in sorted(allocation.members[f]))

    def objective(self, allocation: Allocation) -> Objective:
        return utility_U(allocation, self.profiles, self.params, self.pricing, self.num_fs)


def delta_assign(p: int, f: int, allocation: Allocation, inst: Instance) -> float:
    """Utility gained by moving local patient ``p`` onto server ``f``.

    Covers the profit margin, ``p``'s own latency change and the slowdown
    every current occupant of ``f`` suffers from one more sharer.
    """
    prm = inst.params
    gamma = prm.fog_capacity_hz
    n = allocation.occupancy[f]
    own = inst.rho[p] * (inst.t_local[p] - (inst.beta[p] * (n + 1) / gamma + inst.t_tr[p, f]))
    return prm.lambda1 * inst.margin[p] + prm.lambda2 * own - prm.lambda2 * inst.load(allocation, f) / gamma


def delta_two_way(p: int, q: int, allocation: Allocation, inst: Instance) -> float:
    """Decrease in patient cost when ``p`` and ``q`` exchange servers.

    The utility changes by ``lambda2`` times this value; profit is unaffected.
    """
    f, g = allocation.server(p), allocation.server(q)
    gamma = inst.params.fog_capacity_hz
    nf, ng = allocation.occupancy[f], allocation.occupancy[g]
    rp, rq = inst.rho[p], inst.rho[q]
    return (rp * inst.eta[p] / _rate(inst, p, f) - rp * inst.eta[p] / _rate(inst, p, g)
            + rq * inst.eta[q] / _rate(inst, q, g) - rq * inst.eta[q] / _rate(inst, q, f)
            + rp * inst.beta[p] * nf / gamma - rp * inst.beta[p] * ng / gamma
            + rq * inst.beta[q] * ng / gamma - rq * inst.beta[q] * nf / gamma)


def delta_one_way(p: int, g: int, allocation: Allocation, inst: Instance) -> float:
    """Decrease in patient cost when ``p`` leaves its server for server ``g``."""
    f = allocation.server(p)
    gamma = inst.params.fog_capacity_hz
    nf, ng = allocation.occupancy[f], allocation.occupancy[g]
    rp = inst.rho[p]
    stay = math.fsum(inst.rho_beta[q] for q in sorted(allocation.members[f]) if q != p)
    return (rp * inst.eta[p] / _rate(inst, p, f) - rp * inst.eta[p] / _rate(inst, p, g)
            + rp * inst.beta[p] * (nf - ng - 1) / gamma
            + stay / gamma - inst.load(allocation, g) / gamma)


def _rate(inst: Instance, p: int, f: int) -> float:
    return transmission_rate(inst.profiles[p], f, inst.params)
