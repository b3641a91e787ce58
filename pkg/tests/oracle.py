"""Independent high-precision reference evaluation used by the tests.

Written directly from the model formulas with mpmath, sharing no code with
the package, so delta and solver results can be checked against it.
"""
from mpmath import log, mp, mpf

mp.dps = 50

LOCAL = -1


def rate(prof, f, params):
    gain = mpf(prof.distance_m[f]) ** (-mpf(params.path_loss_exponent))
    snr = mpf(params.tx_power_watts) * gain / mpf(params.noise_watts)
    return mpf(params.bandwidth_hz) * log(1 + snr, 2)


def latencies(assignment, profiles, params, num_fs):
    occ = [0] * num_fs
    for f in assignment:
        if f != LOCAL:
            occ[f] += 1
    out = []
    for p, f in enumerate(assignment):
        prof = profiles[p]
        if f == LOCAL:
            out.append(mpf(prof.cpu_cycles) / mpf(params.local_capacity_hz))
        else:
            out.append(mpf(prof.data_bits) / rate(prof, f, params)
                       + mpf(prof.cpu_cycles) * occ[f] / mpf(params.fog_capacity_hz))
    return out


def profit(assignment, profiles, pricing, num_fs):
    total = -mpf(pricing.fixed_fs_cost) * num_fs
    for p, f in enumerate(assignment):
        if f == LOCAL:
            total += mpf(pricing.local_price)
        else:
            total += mpf(pricing.fog_price) - mpf(pricing.per_cycle_cost) * mpf(profiles[p].cpu_cycles) / 10 ** 6
    return total


def cost(assignment, profiles, params, num_fs):
    lat = latencies(assignment, profiles, params, num_fs)
    return sum((mpf(profiles[p].criticality) * lat[p] for p in range(len(profiles))), mpf(0))


def utility(assignment, profiles, params, pricing, num_fs):
    return (mpf(params.lambda1) * profit(assignment, profiles, pricing, num_fs)
            - mpf(params.lambda2) * cost(assignment, profiles, params, num_fs))


def feasible(assignment, profiles, params, num_fs):
    lat = latencies(assignment, profiles, params, num_fs)
    return all(lat[p] <= mpf(params.latency_budget_s) / mpf(profiles[p].criticality)
               for p in range(len(profiles)))


def close(got, want, rel=1e-9, floor=1e-12):
    """Relative agreement, with an absolute floor for values that should be near zero."""
    return abs(mpf(got) - want) <= max(rel * abs(want), mpf(floor))
