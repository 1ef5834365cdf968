"""Numba kernels behind the marching and sweeping solvers.

All kernels operate on raw (nx+1, ny+1) float64 arrays indexed [i, j] plus a
uint8 inside-mask.  Inside points never sit on the array border (the mask
type guarantees it), so stencils need no bounds checks.  The unified local
update solves

    sqrt( ((U-ax)/dx)+^2 + ((U-ay)/dy)+^2 ) = beta - alpha*U

which covers both the plain Eikonal equation (alpha = 0, beta = rhs/f) and
the randomly-terminated equation (alpha = psi/f, beta = (K + psi*(b+R))/f).
Kernels are compiled nogil so sweeps over lambda/b can run on worker threads.
"""

from __future__ import annotations

import numpy as np
from numba import njit

FAR = np.uint8(0)
NARROW = np.uint8(1)
ACCEPTED = np.uint8(2)
BLOCKED = np.uint8(3)

INF = np.inf


@njit(cache=True, nogil=True, inline="always")
def _heap_less(v1, i1, v2, i2):
    # deterministic ordering: value first, lexicographic flat index second
    return v1 < v2 or (v1 == v2 and i1 < i2)


@njit(cache=True, nogil=True)
def _heap_push(hval, hidx, n, v, idx):
    k = n
    hval[k] = v
    hidx[k] = idx
    while k > 0:
        p = (k - 1) >> 1
        if _heap_less(hval[k], hidx[k], hval[p], hidx[p]):
            hval[k], hval[p] = hval[p], hval[k]
            hidx[k], hidx[p] = hidx[p], hidx[k]
            k = p
        else:
            break
    return n + 1


@njit(cache=True, nogil=True)
def _heap_pop(hval, hidx, n):
    v = hval[0]
    idx = hidx[0]
    n -= 1
    hval[0] = hval[n]
    hidx[0] = hidx[n]
    k = 0
    while True:
        left = 2 * k + 1
        if left >= n:
            break
        right = left + 1
        small = left
        if right < n and _heap_less(hval[right], hidx[right], hval[left], hidx[left]):
            small = right
        if _heap_less(hval[small], hidx[small], hval[k], hidx[k]):
            hval[k], hval[small] = hval[small], hval[k]
            hidx[k], hidx[small] = hidx[small], hidx[k]
            k = small
        else:
            break
    return v, idx, n


@njit(cache=True, nogil=True)
def _local_update(ax, ay, dx, dy, alpha, beta):
    """Smallest consistent solution of the upwind point equation.

    ax, ay are the per-axis upwind neighbor values (inf when the axis has
    none).  The admissible root must not fall below a contributing neighbor
    and must keep the effective cost beta - alpha*U nonnegative; when no such
    root exists the value saturates where the effective cost hits zero.  The
    quadratic is solved in coordinates shifted by the smaller neighbor, so
    accuracy stays absolute even when the values themselves are large.
    """
    if ax <= ay:
        a1, h1, a2, h2 = ax, dx, ay, dy
    else:
        a1, h1, a2, h2 = ay, dy, ax, dx
    if a1 == INF:
        return INF
    bet = beta - alpha * a1  # effective cost at the smaller neighbor value
    if a2 < INF:
        d = a2 - a1
        qa = 1.0 / (h1 * h1) + 1.0 / (h2 * h2) - alpha * alpha
        qb = -2.0 * (d / (h2 * h2) - alpha * bet)
        qc = d * d / (h2 * h2) - bet * bet
        tol = 1e-12 * (1.0 + abs(bet) + d)
        v_best = INF
        res_best = INF
        if qa != 0.0:
            disc = qb * qb - 4.0 * qa * qc
            if disc >= 0.0:
                sq = np.sqrt(disc)
                for sgn in (-1.0, 1.0):
                    v = (-qb + sgn * sq) / (2.0 * qa)
                    if v >= d - tol and bet - alpha * v >= -tol:
                        g1 = v / h1
                        g2 = (v - d) / h2
                        if g2 < 0.0:
                            g2 = 0.0
                        res = abs(np.sqrt(g1 * g1 + g2 * g2) - (bet - alpha * v))
                        if res < res_best:
                            res_best = res
                            v_best = v
        elif qb != 0.0:
            v = -qc / qb
            if v >= d - tol and bet - alpha * v >= -tol:
                v_best = v
        if v_best < INF:
            # roots a rounding error below the larger neighbor would break the
            # monotone acceptance order; the exact root is never below it
            return a1 + (v_best if v_best >= d else d)
    # one-sided update from the smaller neighbor
    if bet >= 0.0:
        return a1 + bet * h1 / (1.0 + alpha * h1)
    # effective cost would go negative: clamp at its zero
    return beta / alpha


@njit(cache=True, nogil=True)
def _relax(u, status, alpha, beta, i, j, dx, dy):
    ax = INF
    if status[i - 1, j] == ACCEPTED:
        ax = u[i - 1, j]
    if status[i + 1, j] == ACCEPTED and u[i + 1, j] < ax:
        ax = u[i + 1, j]
    ay = INF
    if status[i, j - 1] == ACCEPTED:
        ay = u[i, j - 1]
    if status[i, j + 1] == ACCEPTED and u[i, j + 1] < ay:
        ay = u[i, j + 1]
    return _local_update(ax, ay, dx, dy, alpha[i, j], beta[i, j])


@njit(cache=True, nogil=True)
def fmm_solve(inside, blocked, alpha, beta, dx, dy, reopen):
    """Dijkstra-like marching solve of the upwind system.

    Returns (u, order, n_order, flag).  order holds the flat indices of
    inside points in acceptance sequence.  With reopen set (used by the
    randomly-terminated solver, whose cost-saturation branch can lower a
    value below an already-accepted neighbor) accepted points are re-examined
    and re-opened on a material decrease; the order is then not recorded past
    the first re-opening and flag is 1.  flag 2 means heap overflow.
    """
    nx1, ny1 = inside.shape
    u = np.full((nx1, ny1), INF)
    status = np.zeros((nx1, ny1), np.uint8)
    n_inside = 0
    for i in range(nx1):
        for j in range(ny1):
            if inside[i, j] == 0:
                u[i, j] = 0.0
                status[i, j] = ACCEPTED
            elif blocked[i, j] != 0:
                status[i, j] = BLOCKED
            else:
                n_inside += 1
    order = np.empty(n_inside, np.int64)
    n_acc = 0
    flag = 0
    if n_inside == 0:
        return u, order, 0, 0

    cap = 8 * n_inside + 64
    hval = np.empty(cap)
    hidx = np.empty(cap, np.int64)
    hn = 0

    # seed the narrow band from the Dirichlet data on outside points
    for i in range(1, nx1 - 1):
        for j in range(1, ny1 - 1):
            if status[i, j] != FAR:
                continue
            if (
                status[i - 1, j] == ACCEPTED
                or status[i + 1, j] == ACCEPTED
                or status[i, j - 1] == ACCEPTED
                or status[i, j + 1] == ACCEPTED
            ):
                cand = _relax(u, status, alpha, beta, i, j, dx, dy)
                if cand < u[i, j]:
                    u[i, j] = cand
                    status[i, j] = NARROW
                    hn = _heap_push(hval, hidx, hn, cand, i * ny1 + j)

    while hn > 0:
        v, idx, hn = _heap_pop(hval, hidx, hn)
        i = idx // ny1
        j = idx % ny1
        if status[i, j] != NARROW or v != u[i, j]:
            continue  # stale heap entry
        status[i, j] = ACCEPTED
        if flag == 0:
            order[n_acc] = idx
            n_acc += 1
        for k in range(4):
            if k == 0:
                ni, nj = i - 1, j
            elif k == 1:
                ni, nj = i + 1, j
            elif k == 2:
                ni, nj = i, j - 1
            else:
                ni, nj = i, j + 1
            st = status[ni, nj]
            if st == BLOCKED or inside[ni, nj] == 0:
                continue
            if st == ACCEPTED and not reopen:
                continue
            cand = _relax(u, status, alpha, beta, ni, nj, dx, dy)
            if st == ACCEPTED:
                # only a material decrease re-opens (hairline root noise is not)
                if cand >= u[ni, nj] - 1e-13 * (1.0 + abs(u[ni, nj])):
                    continue
                flag = 1
            elif cand >= u[ni, nj]:
                continue
            u[ni, nj] = cand
            status[ni, nj] = NARROW
            if hn >= cap:
                return u, order, n_acc, 2
            hn = _heap_push(hval, hidx, hn, cand, ni * ny1 + nj)
    return u, order, n_acc, flag


@njit(cache=True, nogil=True)
def sweep_solve(inside, blocked, alpha, beta, dx, dy, tol, max_rounds):
    """Gauss-Seidel fast sweeping over the four diagonal orderings.

    Independent validation oracle for fmm_solve: same discrete system,
    different iteration order.  Returns (u, rounds); rounds is -1 when the
    largest update never fell below tol within max_rounds.
    """
    nx1, ny1 = inside.shape
    u = np.full((nx1, ny1), INF)
    for i in range(nx1):
        for j in range(ny1):
            if inside[i, j] == 0:
                u[i, j] = 0.0
    for rounds in range(1, max_rounds + 1):
        max_change = 0.0
        for sweep in range(4):
            if sweep == 0:
                i0, i1, istep = 1, nx1 - 1, 1
                j0, j1, jstep = 1, ny1 - 1, 1
            elif sweep == 1:
                i0, i1, istep = nx1 - 2, 0, -1
                j0, j1, jstep = 1, ny1 - 1, 1
            elif sweep == 2:
                i0, i1, istep = nx1 - 2, 0, -1
                j0, j1, jstep = ny1 - 2, 0, -1
            else:
                i0, i1, istep = 1, nx1 - 1, 1
                j0, j1, jstep = ny1 - 2, 0, -1
            for i in range(i0, i1, istep):
                for j in range(j0, j1, jstep):
                    if inside[i, j] == 0 or blocked[i, j] != 0:
                        continue
                    ax = min(u[i - 1, j], u[i + 1, j])
                    ay = min(u[i, j - 1], u[i, j + 1])
                    cand = _local_update(ax, ay, dx, dy, alpha[i, j], beta[i, j])
                    if cand < u[i, j]:
                        change = u[i, j] - cand
                        if change == INF or change > max_change:
                            max_change = min(change, 1e300)
                        u[i, j] = cand
        if max_change < tol:
            return u, rounds
    return u, -1


@njit(cache=True, nogil=True, inline="always")
def _upwind_gradient(u, i, j, dx, dy):
    """Three-branch upwind differences of u at (i, j): (gx, dirx, gy, diry).

    dir is +1 for a forward stencil, -1 for backward, 0 for none; g is the
    chosen one-sided difference value (0 when dir is 0).  The same stencil
    choice drives the residual checks and the auxiliary transport solves.
    """
    dpx = (u[i + 1, j] - u[i, j]) / dx
    dmx = (u[i, j] - u[i - 1, j]) / dx
    gx = 0.0
    dirx = 0
    m = -dmx if -dmx < 0.0 else 0.0
    if dpx <= m:
        gx = dpx
        dirx = 1
    elif -dmx < (dpx if dpx < 0.0 else 0.0):
        gx = dmx
        dirx = -1
    dpy = (u[i, j + 1] - u[i, j]) / dy
    dmy = (u[i, j] - u[i, j - 1]) / dy
    gy = 0.0
    diry = 0
    m = -dmy if -dmy < 0.0 else 0.0
    if dpy <= m:
        gy = dpy
        diry = 1
    elif -dmy < (dpy if dpy < 0.0 else 0.0):
        gy = dmy
        diry = -1
    return gx, dirx, gy, diry


@njit(cache=True, nogil=True)
def transport_pair(u, order, n_order, psi, K, klam, f, dx, dy):
    """Solve the coupled linear transport equations along u's stencils.

    Processing in acceptance order makes every point depend only on already
    solved neighbors.  Returns (v1, v2, bad_idx); bad_idx >= 0 flags a
    degenerate stencil (no upwind axis at a finite-u inside point).
    """
    nx1, ny1 = u.shape
    v1 = np.zeros((nx1, ny1))
    v2 = np.zeros((nx1, ny1))
    for n in range(n_order):
        idx = order[n]
        i = idx // ny1
        j = idx % ny1
        gx, dirx, gy, diry = _upwind_gradient(u, i, j, dx, dy)
        denom = 0.0
        fij = f[i, j]
        q1 = psi[i, j] * klam[i, j] / (fij * fij)
        q2 = K[i, j] * klam[i, j] / (fij * fij)
        num1 = q1
        num2 = q2
        if dirx == 1:
            w = -gx / dx
            denom += w
            num1 += w * v1[i + 1, j]
            num2 += w * v2[i + 1, j]
        elif dirx == -1:
            w = gx / dx
            denom += w
            num1 += w * v1[i - 1, j]
            num2 += w * v2[i - 1, j]
        if diry == 1:
            w = -gy / dy
            denom += w
            num1 += w * v1[i, j + 1]
            num2 += w * v2[i, j + 1]
        elif diry == -1:
            w = gy / dy
            denom += w
            num1 += w * v1[i, j - 1]
            num2 += w * v2[i, j - 1]
        if denom == 0.0:
            return v1, v2, idx
        v1[i, j] = num1 / denom
        v2[i, j] = num2 / denom
    return v1, v2, -1


@njit(cache=True, nogil=True)
def eikonal_residual(u, inside, blocked, f, rhs, dx, dy):
    """Max |f*|grad u| - rhs| over inside, finite-u, unblocked points."""
    nx1, ny1 = u.shape
    worst = 0.0
    for i in range(1, nx1 - 1):
        for j in range(1, ny1 - 1):
            if inside[i, j] == 0 or blocked[i, j] != 0 or u[i, j] == INF:
                continue
            gx, _, gy, _ = _upwind_gradient(u, i, j, dx, dy)
            res = abs(f[i, j] * np.sqrt(gx * gx + gy * gy) - rhs[i, j])
            if res > worst:
                worst = res
    return worst


@njit(cache=True, nogil=True)
def terminated_residual(u, inside, blocked, f, psi, K, R, b, dx, dy):
    """Max residual of the randomly-terminated discrete equation (squared form)."""
    nx1, ny1 = u.shape
    worst = 0.0
    for i in range(1, nx1 - 1):
        for j in range(1, ny1 - 1):
            if inside[i, j] == 0 or blocked[i, j] != 0 or u[i, j] == INF:
                continue
            dpx = (u[i + 1, j] - u[i, j]) / dx
            dmx = (u[i, j] - u[i - 1, j]) / dx
            gx = min(min(dpx, -dmx), 0.0)
            dpy = (u[i, j + 1] - u[i, j]) / dy
            dmy = (u[i, j] - u[i, j - 1]) / dy
            gy = min(min(dpy, -dmy), 0.0)
            cost = K[i, j] + psi[i, j] * (b + R[i, j] - u[i, j])
            res = abs(gx * gx + gy * gy - (cost / f[i, j]) ** 2)
            if res > worst:
                worst = res
    return worst


@njit(cache=True, nogil=True)
def node_gradients(u, dx, dy):
    """Central-difference gradient per node; one-sided next to inf values.

    Nodes whose own value is inf (or with no finite neighbor on an axis) get
    a zero component, so descent paths stall rather than chase garbage.
    """
    nx1, ny1 = u.shape
    gx = np.zeros((nx1, ny1))
    gy = np.zeros((nx1, ny1))
    for i in range(nx1):
        for j in range(ny1):
            if u[i, j] == INF:
                continue
            lo = u[i - 1, j] if i > 0 else INF
            hi = u[i + 1, j] if i < nx1 - 1 else INF
            if lo < INF and hi < INF:
                gx[i, j] = (hi - lo) / (2.0 * dx)
            elif hi < INF:
                gx[i, j] = (hi - u[i, j]) / dx
            elif lo < INF:
                gx[i, j] = (u[i, j] - lo) / dx
            lo = u[i, j - 1] if j > 0 else INF
            hi = u[i, j + 1] if j < ny1 - 1 else INF
            if lo < INF and hi < INF:
                gy[i, j] = (hi - lo) / (2.0 * dy)
            elif hi < INF:
                gy[i, j] = (hi - u[i, j]) / dy
            elif lo < INF:
                gy[i, j] = (u[i, j] - lo) / dy
    return gx, gy
