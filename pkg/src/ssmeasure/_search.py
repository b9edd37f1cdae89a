"""Compiled kernels for the windowed packing and centered-ball searches.

Both searches are exact branch and bound over centers:

1. a cheap pass computes, for every center, a sound bound on its best
   density ratio from a radius histogram (no sorting);
2. centers are visited in bound order, in fixed-size chunks; inside a chunk
   centers run in parallel against the incumbent fixed at chunk start;
3. a center is skipped only when its bound is worse than the incumbent by
   more than the ratio tie tolerance, so every candidate that can tie the
   final optimum is always evaluated.

Chunk composition does not depend on the thread count, and the final
reduction is an ordered scan, so results are bit-identical for any number
of threads.

Distances are ``sqrt(sum((y_j - x_j)**2))`` accumulated in coordinate
order, ball masses are integer unit sums, and ratios are
``(2 d) ** s / (units / denominator)``; the brute-force reference in
:mod:`ssmeasure.oracle` follows the same arithmetic so the two agree bit for
bit.
"""

import math
import warnings

import numpy as np
from numba import NumbaWarning, njit, prange

# an old system TBB is skipped in favour of OpenMP or workqueue; nothing to act on
warnings.filterwarnings("ignore", message="The TBB threading layer", category=NumbaWarning)

BIG = 1e300
# ratios this close are one tie; the search keeps every such candidate alive
H_TIE = 1e-12
SLACK = 4e-12


@njit(cache=True, inline="always")
def _dist(coords, q, x, n):
    d2 = 0.0
    for j in range(n):
        t = coords[q, j] - x[j]
        d2 += t * t
    return math.sqrt(d2)


@njit(cache=True)
def _cell_range(x, radius, origin, shape, cell_size, n):
    lo = np.zeros(3, np.int64)
    hi = np.zeros(3, np.int64)
    for j in range(3):
        if j >= n:
            continue
        if radius >= BIG:
            hi[j] = shape[j] - 1
            continue
        a = math.floor((x[j] - radius - origin[j]) / cell_size)
        b = math.floor((x[j] + radius - origin[j]) / cell_size)
        lo[j] = max(int(min(a, shape[j] - 1.0)), 0)
        hi[j] = min(int(max(b, 0.0)), shape[j] - 1)
    return lo, hi


@njit(cache=True)
def _gather(c, radius, coords, order, cell_start, origin, shape, cell_size, buf_d, buf_i):
    """Collect every point within ``radius`` of center ``c`` (center included)."""
    n = coords.shape[1]
    x = coords[c]
    margin = cell_size * 1e-9
    lo, hi = _cell_range(x, radius + margin, origin, shape, cell_size, n)
    cnt = 0
    for i0 in range(lo[0], hi[0] + 1):
        for i1 in range(lo[1], hi[1] + 1):
            for i2 in range(lo[2], hi[2] + 1):
                cell = (i0 * shape[1] + i1) * shape[2] + i2
                for p in range(cell_start[cell], cell_start[cell + 1]):
                    q = order[p]
                    d = _dist(coords, q, x, n)
                    if d <= radius:
                        buf_d[cnt] = d
                        buf_i[cnt] = q
                        cnt += 1
    return cnt


# -- packing: maximise (2d)^s / mu_k(open ball) over the radius window --------

@njit(parallel=True, cache=True)
def packing_bounds(coords, units, order, cell_start, origin, shape, cell_size,
                   lo, hi, s, denom, nbins, chain):
    """Upper bound of the best windowed ratio for every center."""
    N, n = coords.shape
    ub = np.empty(N)
    width = (hi - lo) / nbins
    reach = hi + chain
    margin = cell_size * 1e-9
    for c in prange(N):
        hist = np.zeros(nbins, np.int64)
        base = 0
        x = coords[c]
        clo, chi = _cell_range(x, reach + margin, origin, shape, cell_size, n)
        for i0 in range(clo[0], chi[0] + 1):
            for i1 in range(clo[1], chi[1] + 1):
                for i2 in range(clo[2], chi[2] + 1):
                    cell = (i0 * shape[1] + i1) * shape[2] + i2
                    for p in range(cell_start[cell], cell_start[cell + 1]):
                        q = order[p]
                        d = _dist(coords, q, x, n)
                        if d < lo:
                            base += units[q]
                        elif d <= reach:
                            b = int((d - lo) / width)
                            if b >= nbins:
                                b = nbins - 1
                            hist[b] += units[q]
        # a group whose smallest distance falls in bin b has every point of
        # bins < b-1 (and everything below lo) strictly inside its open ball
        best = 0.0
        run = base
        for b in range(nbins):
            if b >= 2:
                run += hist[b - 2]
            if hist[b] > 0:
                top = lo + (b + 2) * width
                val = (2.0 * top) ** s / (run / denom)
                if val > best:
                    best = val
        ub[c] = best * (1.0 + 1e-12)
    return ub


@njit(cache=True)
def _packing_center(c, coords, units, order, cell_start, origin, shape, cell_size,
                    lo, hi, s, denom, tol, chain, buf_d, buf_i):
    cnt = _gather(c, hi + chain, coords, order, cell_start, origin, shape, cell_size,
                  buf_d, buf_i)
    d = buf_d[:cnt]
    idx = buf_i[:cnt]
    o = np.argsort(d)
    best_h = -1.0
    best_rep = 0.0
    best_units = 0
    best_partner = -1
    cum = 0
    i = 0
    while i < cnt:
        rep = d[o[i]]
        if rep > hi:
            break
        gu = units[idx[o[i]]]
        gmin = idx[o[i]]
        j = i + 1
        while j < cnt:
            dj = d[o[j]]
            if dj - d[o[j - 1]] <= tol * max(1.0, dj):
                q = idx[o[j]]
                gu += units[q]
                if q < gmin:
                    gmin = q
                j += 1
            else:
                break
        if rep >= lo:
            h = (2.0 * rep) ** s / (cum / denom)
            if h > best_h or (h == best_h and gmin < best_partner):
                best_h = h
                best_rep = rep
                best_units = cum
                best_partner = gmin
        cum += gu
        i = j
    return best_h, best_rep, best_units, best_partner


@njit(parallel=True, cache=True)
def packing_search(visit, ub, chunk, coords, units, order, cell_start, origin, shape,
                   cell_size, lo, hi, s, denom, tol, chain):
    N = coords.shape[0]
    res_h = np.full(N, -1.0)
    res_rep = np.zeros(N)
    res_units = np.zeros(N, np.int64)
    res_partner = np.full(N, -1, np.int64)
    done = np.zeros(N, np.bool_)
    best = -1.0
    pos = 0
    while pos < N:
        if ub[visit[pos]] < best * (1.0 - SLACK):
            break
        end = min(pos + chunk, N)
        thr = best
        for t in prange(pos, end):
            c = visit[t]
            if ub[c] < thr * (1.0 - SLACK):
                continue
            buf_d = np.empty(N)
            buf_i = np.empty(N, np.int64)
            h, rep, u, p = _packing_center(c, coords, units, order, cell_start, origin,
                                           shape, cell_size, lo, hi, s, denom, tol, chain,
                                           buf_d, buf_i)
            res_h[c] = h
            res_rep[c] = rep
            res_units[c] = u
            res_partner[c] = p
            done[c] = True
        for t in range(pos, end):
            c = visit[t]
            if done[c] and res_h[c] > best:
                best = res_h[c]
        pos = end
    return res_h, res_rep, res_units, res_partner, done


# -- centered: minimise (2d)^s / mu_k(closed ball) over admissible radii ------

@njit(parallel=True, cache=True)
def centered_bounds(coords, units, first, dmax, s, denom, nbins, chain):
    """Lower bound of the best admissible closed-ball ratio for every center."""
    N, n = coords.shape
    lb = np.empty(N)
    width = dmax / nbins
    for c in prange(N):
        hist = np.zeros(nbins, np.int64)
        x = coords[c]
        fc = first[c]
        dcross = BIG
        for q in range(N):
            d = _dist(coords, q, x, n)
            b = int(d / width)
            if b >= nbins:
                b = nbins - 1
            hist[b] += units[q]
            if first[q] != fc and d < dcross:
                dcross = d
        rmin = dcross - chain
        cum = np.cumsum(hist)
        best = BIG
        for b in range(nbins):
            if hist[b] == 0:
                continue
            if (b + 2) * width < rmin:
                continue
            low = max(b - 1, 0) * width
            if rmin > low:
                low = rmin
            mass = cum[min(b + 2, nbins - 1)] / denom
            val = (2.0 * low) ** s / mass
            if val < best:
                best = val
        lb[c] = best * (1.0 - 1e-12)
    return lb


@njit(cache=True)
def _centered_center(c, cut, coords, units, first, order, cell_start, origin, shape,
                     cell_size, s, denom, tol, chain, buf_d, buf_i):
    cnt = _gather(c, cut + 2.0 * chain if cut < BIG else BIG, coords, order, cell_start,
                  origin, shape, cell_size, buf_d, buf_i)
    d = buf_d[:cnt]
    idx = buf_i[:cnt]
    o = np.argsort(d)
    fc = first[c]
    best_h = BIG
    best_rep = 0.0
    best_units = 0
    best_partner = -1
    cross = False
    cum = 0
    i = 0
    while i < cnt:
        rep = d[o[i]]
        if rep > cut:
            break
        q = idx[o[i]]
        cum += units[q]
        gmin = q
        if first[q] != fc:
            cross = True
        j = i + 1
        while j < cnt:
            dj = d[o[j]]
            if dj - d[o[j - 1]] <= tol * max(1.0, dj):
                q = idx[o[j]]
                cum += units[q]
                if q < gmin:
                    gmin = q
                if first[q] != fc:
                    cross = True
                j += 1
            else:
                break
        if cross:
            h = (2.0 * rep) ** s / (cum / denom)
            if h < best_h or (h == best_h and gmin < best_partner):
                best_h = h
                best_rep = rep
                best_units = cum
                best_partner = gmin
        i = j
    return best_h, best_rep, best_units, best_partner


@njit(parallel=True, cache=True)
def centered_search(visit, lb, chunk, coords, units, first, order, cell_start, origin,
                    shape, cell_size, s, denom, tol, chain):
    N = coords.shape[0]
    res_h = np.full(N, BIG)
    res_rep = np.zeros(N)
    res_units = np.zeros(N, np.int64)
    res_partner = np.full(N, -1, np.int64)
    done = np.zeros(N, np.bool_)
    best = BIG
    pos = 0
    while pos < N:
        if lb[visit[pos]] > best * (1.0 + SLACK):
            break
        end = min(pos + chunk, N)
        thr = best
        # radii beyond cut have (2d)^s > thr >= any closed-ball ratio worth keeping
        cut = BIG
        if thr < BIG:
            cut = 0.5 * (thr * (1.0 + 1e-9)) ** (1.0 / s)
        for t in prange(pos, end):
            c = visit[t]
            if lb[c] > thr * (1.0 + SLACK):
                continue
            buf_d = np.empty(N)
            buf_i = np.empty(N, np.int64)
            h, rep, u, p = _centered_center(c, cut, coords, units, first, order, cell_start,
                                            origin, shape, cell_size, s, denom, tol, chain,
                                            buf_d, buf_i)
            res_h[c] = h
            res_rep[c] = rep
            res_units[c] = u
            res_partner[c] = p
            done[c] = True
        for t in range(pos, end):
            c = visit[t]
            if done[c] and res_h[c] < best:
                best = res_h[c]
        pos = end
    return res_h, res_rep, res_units, res_partner, done


def pick(h, done, maximize):
    """Smallest center index whose ratio ties the optimum within ``H_TIE``."""
    vals = np.where(done, h, -np.inf if maximize else np.inf)
    if maximize:
        best = vals.max()
        return int(np.flatnonzero(vals >= best * (1.0 - H_TIE))[0])
    best = vals.min()
    return int(np.flatnonzero(vals <= best * (1.0 + H_TIE))[0])
