"""Capacity planning strategies.

Three planners share the same contract: given a workload and horizon
parameters they return a schedule of capacity changes.

* adaptive_schedule: a look-ahead heuristic that provisions the smallest
  conference size visible inside each scan window, as late as the join
  delay allows.
* greedy_schedule: a fixed-period baseline that re-targets capacity to the
  occupancy peak of the next window.
* exact_oracle: exhaustive search over request placements and integer
  assignments, exact but restricted to tiny instances.

All planners are pure functions of their inputs.
"""

import math
import time
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .ilp import SolutionMatrices
from .schedule import Schedule
from .workload import Config, Workload, mandatory_load, occupancy, _require_matching


class OracleLimitError(RuntimeError):
    """Raised when an instance is too large for exhaustive search."""


class OracleInfeasibleError(RuntimeError):
    """Raised when no assignment satisfies the constraints."""


class LiftError(RuntimeError):
    """Raised when a schedule cannot be earmarked into per-arrival matrices."""


def adaptive_schedule(workload: Workload, config: Config) -> Schedule:
    """Plan capacity by chasing the smallest upcoming conference size.

    Starting from slot i, the planner scans candidate effect slots t from
    i + delta through i + theta (clipped to the horizon) and computes the
    conference size at each, recomputing the running total from the first
    slot on every scan.  The latest t attaining the minimum wins; the
    capacity change lands delta slots before it, so the new level becomes
    active exactly when the size bottoms out.  A change of zero is not
    recorded as a request.  The scan then restarts delta slots after the
    chosen request slot, and planning stops once no effect slot fits the
    horizon.
    """
    _require_matching(workload, config)
    n, delta, theta = config.n, config.delta, config.theta
    a = workload.arrivals
    d = workload.departures
    changes = np.zeros(n, dtype=np.int64)

    old_size = 0
    i = 1
    while i + delta <= n:
        min_size = math.inf
        best_t = 0
        for t in range(i + delta, min(i + theta, n) + 1):
            total_size = 0
            for p in range(1, t + 1):
                total_size += int(a[p - 1]) - int(d[p - 1])
            if min_size >= total_size:
                min_size = total_size
                best_t = t - delta
        new_size = int(min_size)
        if new_size != old_size:
            changes[best_t - 1] = new_size - old_size
        old_size = new_size
        i = best_t + delta
    return Schedule(changes)


def greedy_schedule(workload: Workload, config: Config) -> Schedule:
    """Re-target capacity every delta slots to the next window's occupancy peak.

    Ticks run at slots 1, 1 + delta, 1 + 2*delta, ... while the tick still
    has time to take effect (tick <= n - delta).  Each tick sets capacity to
    the maximum occupancy over slots [tick + delta, tick + 2*delta] clipped
    to the horizon, emitting the difference from the current level when it
    is nonzero.
    """
    _require_matching(workload, config)
    n, delta = config.n, config.delta
    occ = occupancy(workload)
    changes = np.zeros(n, dtype=np.int64)
    level = 0
    t = 1
    while t <= n - delta:
        lo = t + delta
        hi = min(t + 2 * delta, n)
        target = int(occ[lo - 1: hi].max())
        if target != level:
            changes[t - 1] = target - level
            level = target
        t += delta
    return Schedule(changes)


@dataclass(frozen=True)
class OracleLimits:
    """Hard ceilings for exhaustive search; beyond them the oracle refuses."""

    max_n: int = 10
    max_total_participants: int = 8
    time_budget: float = 60.0


def _request_slot_sets(last_slot: int, delta: int) -> List[Tuple[int, ...]]:
    # every ascending tuple from 1..last_slot with pairwise gaps >= delta
    out: List[Tuple[int, ...]] = []

    def grow(start: int, acc: List[int]) -> None:
        out.append(tuple(acc))
        for j in range(start, last_slot + 1):
            acc.append(j)
            grow(j + delta, acc)
            acc.pop()

    grow(1, [])
    return out


def _column_hall_ok(demands: List[int], supplies: List[Tuple[int, List[int]]]) -> bool:
    # demands per column; supplies as (amount, eligible column list);
    # checks every nonempty column subset, small m only
    m = len(demands)
    for mask in range(1, 1 << m):
        need = 0
        for k in range(m):
            if mask >> k & 1:
                need += demands[k]
        if need == 0:
            continue
        have = 0
        for amount, cols in supplies:
            if any(mask >> k & 1 for k in cols):
                have += amount
        if need > have:
            return False
    return True


def _lexmin_transport(rows: List[Tuple[int, int, List[int]]], demands: List[int],
                      exact: bool) -> Dict[Tuple[int, int], int]:
    """Split column demands over supply rows, smallest row-major assignment first.

    rows are (row index, amount, eligible columns); exact means every
    supply must be fully placed (amounts and demands then balance).
    """
    rem_demand = list(demands)
    rem_supply = [amount for _, amount, _ in rows]
    assign: Dict[Tuple[int, int], int] = {}
    for pos, (row, _, cols) in enumerate(rows):
        for ci, col in enumerate(cols):
            ub = min(rem_supply[pos], rem_demand[col])
            chosen = None
            for v in range(0, ub + 1):
                rest: List[Tuple[int, List[int]]] = []
                leftover = rem_supply[pos] - v
                if leftover:
                    rest.append((leftover, cols[ci + 1:]))
                for later_pos in range(pos + 1, len(rows)):
                    rest.append((rem_supply[later_pos], rows[later_pos][2]))
                trial = list(rem_demand)
                trial[col] -= v
                if exact and sum(amt for amt, _ in rest) != sum(trial):
                    continue
                if exact and rest and any(not cs for amt, cs in rest if amt):
                    # a supply with nowhere to go can never be placed
                    continue
                if _column_hall_ok(trial, rest):
                    chosen = v
                    break
            if chosen is None:
                raise OracleInfeasibleError("no transport decomposition exists")
            if chosen:
                assign[(row, col)] = chosen
                rem_supply[pos] -= chosen
                rem_demand[col] -= chosen
    return assign


def exact_oracle(workload: Workload, config: Config,
                 limits: Optional[OracleLimits] = None,
                 skip_families: Iterable[str] = ()) -> Tuple[SolutionMatrices, int]:
    """Minimum-cost assignment by exhaustive search.

    Enumerates request slot placements with the minimum spacing, then all
    integer coverings of each arrival cohort over its admissible request
    slots (each cohort covered exactly), then all release totals per column
    within the departure budgets.  Candidates are screened with exact
    integer arithmetic; branches are cut only when no completion can be
    feasible.  Ties on cost resolve to the smallest solution in row-major
    allocation, de-allocation, flag order.

    skip_families accepts the tags EQ7 and EQ8 to drop those families from
    the screen; the remaining families are built into the enumeration
    itself and cannot be disabled.

    Instances beyond the limits, or searches beyond the time budget, raise
    OracleLimitError rather than approximating.
    """
    _require_matching(workload, config)
    limits = limits if limits is not None else OracleLimits()
    n, delta, theta = config.n, config.delta, config.theta
    total = int(workload.arrivals.sum())
    if n > limits.max_n:
        raise OracleLimitError(f"n={n} exceeds the search limit max_n={limits.max_n}")
    if total > limits.max_total_participants:
        raise OracleLimitError(
            f"{total} participants exceed the search limit "
            f"max_total_participants={limits.max_total_participants}")
    deadline = time.monotonic() + limits.time_budget
    skip = set(skip_families)
    check7 = "EQ7" not in skip
    check8 = "EQ8" not in skip

    a = [int(v) for v in workload.arrivals]
    d = [int(v) for v in workload.departures]
    load = [int(v) for v in mandatory_load(workload, config).values]
    last = n - delta
    weight = [n - j - delta for j in range(1, n + 1)]
    arr_cohorts = [(i, a[i - 1]) for i in range(1, n + 1) if a[i - 1]]
    dep_cohorts = [(i, d[i - 1]) for i in range(1, n + 1) if d[i - 1]]

    best_cost: Optional[int] = None
    best_key = None
    best_pick = None  # (slots, xassign, yassign)

    leaf_counter = 0

    def out_of_time() -> bool:
        return time.monotonic() > deadline

    for slots in _request_slot_sets(last, delta):
        if out_of_time():
            raise OracleLimitError(
                f"time budget {limits.time_budget}s exhausted during search")
        m = len(slots)
        # eligible column count per arrival cohort (columns are a prefix)
        xwin = []
        feasible_r = True
        for i, amount in arr_cohorts:
            bound = min(i + theta - delta, last)
            k = sum(1 for j in slots if j <= bound)
            if k == 0:
                feasible_r = False
                break
            xwin.append(k)
        if not feasible_r:
            continue
        # release eligibility per column and per equal-cost screen interval
        dk = [sum(amount for i, amount in dep_cohorts if i <= j + delta) for j in slots]
        maxl = []
        for k in range(m + 1):
            lo = slots[k - 1] + delta if k else delta + 1
            hi = slots[k] + delta - 1 if k < m else n
            hi = min(hi, n)
            seg = [load[j - 1] for j in range(lo, hi + 1)]
            maxl.append(max(seg) if seg else 0)
        if check8 and maxl[0] > 0:
            continue
        # arrival mass that can still be placed at or after column k
        suffix_budget = [0] * (m + 1)
        for k in range(m - 1, -1, -1):
            suffix_budget[k] = sum(
                amount for (i, amount), win in zip(arr_cohorts, xwin) if win >= k + 1)

        u_vec = [0] * m
        v_vec = [0] * m

        def search_v(c: int, cu: List[int], cv_prev: int, gain: int, cost_u: int) -> None:
            nonlocal best_cost, best_key, best_pick, leaf_counter
            if c == m:
                leaf_counter += 1
                if leaf_counter % 4096 == 0 and out_of_time():
                    raise OracleLimitError(
                        f"time budget {limits.time_budget}s exhausted during search")
                cost = cost_u - gain
                if best_cost is not None and cost > best_cost:
                    return
                pick = (slots, tuple(u_vec), tuple(v_vec))
                key = None
                if best_cost is None or cost < best_cost or (
                        key := _candidate_key(pick, n, arr_cohorts, dep_cohorts,
                                              theta, delta, last)) < best_key:
                    if key is None:
                        key = _candidate_key(pick, n, arr_cohorts, dep_cohorts,
                                             theta, delta, last)
                    best_cost = cost
                    best_key = key
                    best_pick = pick
                return
            ub = dk[c] - cv_prev
            if check7:
                ub = min(ub, cu[c] - cv_prev)
            if check8:
                ub = min(ub, cu[c] - maxl[c + 1] - cv_prev)
            if ub < 0:
                return
            for v in range(ub + 1):
                v_vec[c] = v
                search_v(c + 1, cu, cv_prev + v, gain + v * weight[slots[c] - 1],
                         cost_u)
                v_vec[c] = 0

        def search_u(c: int, placed: int, cu: List[int], cost_u: int) -> None:
            if c == m:
                if placed == total:
                    search_v(0, cu, 0, 0, cost_u)
                return
            rem = total - placed
            if rem > suffix_budget[c]:
                return
            for u in range(rem + 1):
                u_vec[c] = u
                cu.append((cu[-1] if cu else 0) + u)
                search_u(c + 1, placed + u, cu, cost_u + u * weight[slots[c] - 1])
                cu.pop()
                u_vec[c] = 0

        if m == 0:
            if total == 0:
                search_v(0, [], 0, 0, 0)
            continue
        search_u(0, 0, [], 0)

    if best_pick is None:
        raise OracleInfeasibleError("no feasible assignment exists for this workload")
    matrices = _pick_to_matrices(best_pick, n, arr_cohorts, dep_cohorts,
                                 theta, delta, last)
    return matrices, int(best_cost)


def _decompose_pick(pick, arr_cohorts, dep_cohorts, theta, delta, last):
    slots, u_vec, v_vec = pick
    xrows = []
    for i, amount in arr_cohorts:
        bound = min(i + theta - delta, last)
        cols = [k for k, j in enumerate(slots) if j <= bound]
        xrows.append((i, amount, cols))
    xassign = _lexmin_transport(xrows, list(u_vec), exact=True)
    yrows = []
    for i, amount in dep_cohorts:
        cols = [k for k, j in enumerate(slots) if j >= max(i - delta, 1)]
        yrows.append((i, amount, cols))
    yassign = _lexmin_transport(yrows, list(v_vec), exact=False)
    return xassign, yassign


def _candidate_key(pick, n, arr_cohorts, dep_cohorts, theta, delta, last):
    slots = pick[0]
    xassign, yassign = _decompose_pick(pick, arr_cohorts, dep_cohorts,
                                       theta, delta, last)
    xflat = [0] * (n * n)
    for (i, k), amt in xassign.items():
        xflat[(i - 1) * n + slots[k] - 1] = amt
    yflat = [0] * (n * n)
    for (i, k), amt in yassign.items():
        yflat[(i - 1) * n + slots[k] - 1] = amt
    rflat = [0] * n
    for j in slots:
        rflat[j - 1] = 1
    return tuple(xflat), tuple(yflat), tuple(rflat)


def _pick_to_matrices(pick, n, arr_cohorts, dep_cohorts, theta, delta, last):
    slots = pick[0]
    xassign, yassign = _decompose_pick(pick, arr_cohorts, dep_cohorts,
                                       theta, delta, last)
    x = np.zeros((n, n), dtype=np.int64)
    for (i, k), amt in xassign.items():
        x[i - 1, slots[k] - 1] = amt
    y = np.zeros((n, n), dtype=np.int64)
    for (i, k), amt in yassign.items():
        y[i - 1, slots[k] - 1] = amt
    r = np.zeros(n, dtype=np.int64)
    for j in slots:
        r[j - 1] = 1
    return SolutionMatrices(x, y, r)


def lift_schedule(workload: Workload, schedule: Schedule, config: Config) -> SolutionMatrices:
    """Earmark a feasible schedule's capacity to concrete arrivals and departures.

    Arrival cohorts are allocated first-in-first-out to the earliest request
    with gross room that can still cover them; extra gross allocation at a
    request is paired with releases drawn first-in-first-out from departures
    that have happened by the request's effect slot, so reused capacity shows
    up as matched allocation and de-allocation mass at the same request slot.
    A cohort that outlives every such request rides capacity freed by
    departures instead: it is covered at a host request inside its window
    together with an equal release, a zero-net pairing that leaves every
    column sum unchanged.  When no flagged slot falls inside the window, a
    fresh request flag with zero net change is inserted, provided the
    spacing rule leaves a legal slot.  The net change at every request slot
    therefore equals the schedule's change, so the assignment costs exactly
    what the schedule costs and collapses back to the same schedule.

    Raises LiftError when this first-fit earmarking cannot be completed:
    the schedule fails feasibility checking, or reuse of freed capacity
    cannot be expressed because a cohort's window holds no usable host and
    the spacing rule leaves no slot to flag.  With the join threshold at
    least twice the lag minus two, a host slot always exists; narrower
    thresholds combined with lags of four or more can defeat the greedy
    host choice even when a cleverer earmarking would fit.
    """
    _require_matching(workload, config)
    n, delta, theta = config.n, config.delta, config.theta
    s = [int(v) for v in schedule.changes]
    cols = [j for j in range(1, n + 1) if s[j - 1]]
    if any(j > n - delta for j in cols):
        raise LiftError("request past the usable range cannot be earmarked")
    cum_dep = np.concatenate([[0], np.cumsum(workload.departures)])

    cs = []
    running = 0
    for j in cols:
        running += s[j - 1]
        cs.append(running)
    budget = [cs[c] + int(cum_dep[min(cols[c] + delta, n)]) for c in range(len(cols))]
    suffix_cap = list(budget)
    for c in range(len(cols) - 2, -1, -1):
        suffix_cap[c] = min(suffix_cap[c], suffix_cap[c + 1])

    arr_queue = [[i, int(workload.arrivals[i - 1])]
                 for i in range(1, n + 1) if workload.arrivals[i - 1]]
    dep_queue = [[i, int(workload.departures[i - 1])]
                 for i in range(1, n + 1) if workload.departures[i - 1]]
    x = np.zeros((n, n), dtype=np.int64)
    y = np.zeros((n, n), dtype=np.int64)
    r = np.zeros(n, dtype=np.int64)
    flagged = set(cols)
    di = 0

    def draw_releases(col, amount):
        nonlocal di
        while amount > 0:
            if di >= len(dep_queue) or dep_queue[di][0] > col + delta:
                raise LiftError(
                    f"release at slot {col} has no departed participants to draw on")
            dep_slot, rem = dep_queue[di]
            take = min(rem, amount)
            y[dep_slot - 1, col - 1] += take
            amount -= take
            dep_queue[di][1] -= take
            if dep_queue[di][1] == 0:
                di += 1

    def host_reuse(i, amount):
        hi = min(i + theta - delta, n - delta)
        col = 0
        for j in range(hi, 0, -1):
            if j in flagged or all(abs(j - f) >= delta for f in flagged):
                col = j
                break
        if not col:
            raise LiftError(
                f"arrival cohort at slot {i} rides freed capacity but no request "
                f"flag fits at any slot up to {hi}")
        if col not in flagged:
            flagged.add(col)
            r[col - 1] = 1
        x[i - 1, col - 1] += amount
        draw_releases(col, amount)

    cu = 0
    ai = 0
    for c, j in enumerate(cols):
        while ai < len(arr_queue) and min(arr_queue[ai][0] + theta - delta, n - delta) < j:
            host_reuse(arr_queue[ai][0], arr_queue[ai][1])
            ai += 1
        r[j - 1] = 1
        room = suffix_cap[c] - cu
        assigned = 0
        while assigned < room and ai < len(arr_queue):
            i, rem = arr_queue[ai]
            take = min(rem, room - assigned)
            x[i - 1, j - 1] += take
            assigned += take
            arr_queue[ai][1] -= take
            if arr_queue[ai][1] == 0:
                ai += 1
        gross = assigned + max(0, s[j - 1] - assigned)
        if gross > room:
            raise LiftError(f"request at slot {j} exceeds the earmarking budget")
        if gross > assigned:
            x[n - 1, j - 1] += gross - assigned
        cu += gross
        draw_releases(j, gross - s[j - 1])
    while ai < len(arr_queue):
        host_reuse(arr_queue[ai][0], arr_queue[ai][1])
        ai += 1
    return SolutionMatrices(x, y, r)
