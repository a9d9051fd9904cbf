"""Compiled event loop of the tandem polling simulator.

Clocks: 0/1 arrivals of type 1/2, 2 the station-1 server (setup or service),
3/4 station-2 service of type 1/2.  A disabled clock holds ``inf``.  All
delays are exponential, so a station-2 service interrupted by a phase
change is simply redrawn when the gate reopens.
"""
import numpy as np
from numba import njit

S1, S2, U1, U2 = 0, 1, 2, 3
INF = np.inf

# per-product window statistics, offset 16 * k
AREA1, AREA2, DONE1, DONE2, LOST1, LOST2, SOJ1, NSOJ1, SOJ2, NSOJ2 = range(10)
# whole-run counters for the conservation identity
OFFERED, ALL_LOST1, ALL_LOST2, DEPARTED, END_Q1, END_Q2 = range(10, 16)
STRIDE = 16
N_EVENTS_SLOT = 2 * STRIDE
STATS_LEN = 2 * STRIDE + 1


@njit(cache=True)
def _draw(rate):
    if rate <= 0.0:
        return INF
    return np.random.exponential(1.0 / rate)


@njit(cache=True)
def run_replication(seed, lam, mu1, mu2, mus, caps, gate, horizon, warmup, trace):
    """Simulate one replication.

    ``lam``, ``mu1``, ``mu2``, ``mus`` and ``caps`` are length-2 arrays
    indexed by product; ``gate[k]`` is the station-1 phase during which
    station 2 serves product ``k``.  ``trace`` has shape ``(m, 6)``; the first
    ``m`` post-event states ``(time, phase, l11, l21, l12, l22)`` are written
    there.  Returns ``(stats, n_traced)``.
    """
    np.random.seed(seed)
    stats = np.zeros(STATS_LEN)
    q1 = np.zeros(2, dtype=np.int64)
    q2 = np.zeros(2, dtype=np.int64)
    cap_max = max(caps[0], caps[1])
    # FIFO arrival stamps: ring buffers per queue
    ring1 = np.zeros((2, cap_max))
    ring2 = np.zeros((2, cap_max))
    head1 = np.zeros(2, dtype=np.int64)
    head2 = np.zeros(2, dtype=np.int64)

    phase = S1
    clock = np.full(5, INF)
    t = 0.0
    clock[0] = _draw(lam[0])
    clock[1] = _draw(lam[1])
    clock[2] = _draw(mus[0])
    n_traced = 0
    n_events = 0

    while True:
        ev = 0
        t_next = clock[0]
        for c in range(1, 5):
            if clock[c] < t_next:
                t_next = clock[c]
                ev = c
        stop = t_next > horizon
        t_end = horizon if stop else t_next
        lo = t if t > warmup else warmup
        if t_end > lo:
            dt = t_end - lo
            for k in range(2):
                stats[STRIDE * k + AREA1] += q1[k] * dt
                stats[STRIDE * k + AREA2] += q2[k] * dt
        if stop:
            break
        t = t_next
        n_events += 1
        counting = t >= warmup

        if ev < 2:
            k = ev
            base = STRIDE * k
            stats[base + OFFERED] += 1
            if q1[k] < caps[k]:
                ring1[k, (head1[k] + q1[k]) % caps[k]] = t
                q1[k] += 1
            else:
                stats[base + ALL_LOST1] += 1
                if counting:
                    stats[base + LOST1] += 1
            clock[k] = t + _draw(lam[k])
        elif ev == 2:
            if phase == S1 or phase == S2:
                k = 0 if phase == S1 else 1
                if q1[k] > 0:
                    phase = U1 if k == 0 else U2
                    clock[2] = t + _draw(mu1[k])
                else:
                    phase = S2 if k == 0 else S1
                    clock[2] = t + _draw(mus[1 - k])
            else:
                k = 0 if phase == U1 else 1
                base = STRIDE * k
                arrived = ring1[k, head1[k]]
                head1[k] = (head1[k] + 1) % caps[k]
                q1[k] -= 1
                if counting:
                    stats[base + DONE1] += 1
                    stats[base + SOJ1] += t - arrived
                    stats[base + NSOJ1] += 1
                if q2[k] < caps[k]:
                    ring2[k, (head2[k] + q2[k]) % caps[k]] = t
                    q2[k] += 1
                else:
                    stats[base + ALL_LOST2] += 1
                    if counting:
                        stats[base + LOST2] += 1
                if q1[k] == 0:
                    phase = S2 if k == 0 else S1
                    clock[2] = t + _draw(mus[1 - k])
                else:
                    clock[2] = t + _draw(mu1[k])
        else:
            k = ev - 3
            base = STRIDE * k
            arrived = ring2[k, head2[k]]
            head2[k] = (head2[k] + 1) % caps[k]
            q2[k] -= 1
            stats[base + DEPARTED] += 1
            if counting:
                stats[base + DONE2] += 1
                stats[base + SOJ2] += t - arrived
                stats[base + NSOJ2] += 1
            clock[ev] = INF

        for k in range(2):
            if phase == gate[k] and q2[k] >= 1:
                if clock[3 + k] == INF:
                    clock[3 + k] = t + _draw(mu2[k])
            else:
                clock[3 + k] = INF

        if n_traced < trace.shape[0]:
            trace[n_traced, 0] = t
            trace[n_traced, 1] = phase
            trace[n_traced, 2] = q1[0]
            trace[n_traced, 3] = q1[1]
            trace[n_traced, 4] = q2[0]
            trace[n_traced, 5] = q2[1]
            n_traced += 1

    for k in range(2):
        stats[STRIDE * k + END_Q1] = q1[k]
        stats[STRIDE * k + END_Q2] = q2[k]
    stats[N_EVENTS_SLOT] = n_events
    return stats, n_traced
