"""Pure-Python kernels; the reference semantics for ``_kernels.pyx``.

Agents are indexed in id order, so "first" always means smallest id.
``rank[i, v]`` is agent i's class index for numerator v (lower is better).
"""


def first_blocking(color, rank, cur, s, strong):
    """Smallest numerator j admitting a (weakly) blocking coalition, or -1."""
    color = color.tolist()
    rank = rank.tolist()
    cur = cur.tolist()
    n = len(color)
    for j in range(s + 1):
        sr = sb = wr = wb = 0
        for i in range(n):
            row = rank[i]
            here = row[cur[i]]
            there = row[j]
            if there < here:
                if color[i]:
                    sr += 1
                else:
                    sb += 1
            if there <= here:
                if color[i]:
                    wr += 1
                else:
                    wb += 1
        if strong:
            usable = (j >= 1 and sr > 0) or (j <= s - 1 and sb > 0)
            if wr >= j and wb >= s - j and usable:
                return j
        elif sr >= j and sb >= s - j:
            return j
    return -1


def first_exchange(color, rank, room, theta, dim, same_type, strong):
    """First pair (a, b) in id order with an exchange deviation, or (-1, -1).

    Only pairs in different rooms and with ``dim[a] == dim[b]`` are scanned.
    With ``strong`` a weak deviation suffices: a strictly, b weakly better.
    """
    color = color.tolist()
    rank = rank.tolist()
    room = room.tolist()
    theta = theta.tolist()
    dim = dim.tolist()
    n = len(color)
    cur = [theta[room[i]] for i in range(n)]
    for a in range(n):
        ra = rank[a]
        here_a = ra[cur[a]]
        for b in range(n):
            if room[a] == room[b] or dim[a] != dim[b]:
                continue
            if same_type and color[a] != color[b]:
                continue
            if ra[cur[b] + color[a] - color[b]] >= here_a:
                continue
            rb = rank[b]
            new_b = rb[cur[a] + color[b] - color[a]]
            if new_b < rb[cur[b]] or (strong and new_b == rb[cur[b]]):
                return a, b
    return -1, -1


def first_envy(color, rank, room, theta, same_type):
    """First pair (envier, envied) in id order, or (-1, -1)."""
    color = color.tolist()
    rank = rank.tolist()
    room = room.tolist()
    theta = theta.tolist()
    n = len(color)
    cur = [theta[room[i]] for i in range(n)]
    for a in range(n):
        ra = rank[a]
        here_a = ra[cur[a]]
        for b in range(n):
            if room[a] == room[b]:
                continue
            if same_type and color[a] != color[b]:
                continue
            if ra[cur[b] + color[a] - color[b]] < here_a:
                return a, b
    return -1, -1


def _activity(c, lo, hi, ptr, var, coef, const):
    mn = mx = const[c]
    for t in range(ptr[c], ptr[c + 1]):
        v = var[t]
        a = coef[t]
        if a > 0:
            mn += a * lo[v]
            mx += a * hi[v]
        else:
            mn += a * hi[v]
            mx += a * lo[v]
    return mn, mx


def _tighten(c, lo, hi, ptr, var, coef, const, eq):
    """Bound-propagate one constraint; -1 infeasible, 1 changed, 0 unchanged."""
    mn, mx = _activity(c, lo, hi, ptr, var, coef, const)
    if mn > 0 or (eq[c] and mx < 0):
        return -1
    changed = 0
    slack = -mn
    for t in range(ptr[c], ptr[c + 1]):
        v = var[t]
        a = coef[t]
        if a > 0:
            nh = lo[v] + slack // a
            if nh < hi[v]:
                hi[v] = nh
                changed = 1
        else:
            nl = hi[v] - slack // (-a)
            if nl > lo[v]:
                lo[v] = nl
                changed = 1
        if lo[v] > hi[v]:
            return -1
    if eq[c]:
        slack = mx
        for t in range(ptr[c], ptr[c + 1]):
            v = var[t]
            a = coef[t]
            if a > 0:
                nl = hi[v] - slack // a
                if nl > lo[v]:
                    lo[v] = nl
                    changed = 1
            else:
                nh = lo[v] + slack // (-a)
                if nh < hi[v]:
                    hi[v] = nh
                    changed = 1
            if lo[v] > hi[v]:
                return -1
    return changed


def _possible(c, lo, hi, ptr, var, coef, const, eq):
    mn, mx = _activity(c, lo, hi, ptr, var, coef, const)
    return mn <= 0 and (not eq[c] or mx >= 0)


def propagate(lo, hi, hard, ptr, var, coef, const, eq, grp_ptr, br_ptr, br_cons, alive):
    """Tighten ``lo``/``hi`` in place to a fixpoint; False when infeasible.

    ``alive`` flags the disjunction branches still possible; dead branches
    are cleared in place.  A group left with a single live branch has that
    branch's constraints enforced.
    """
    L = lo.tolist()
    H = hi.tolist()
    A = alive.tolist()
    hard = hard.tolist()
    ptr = ptr.tolist()
    var = var.tolist()
    coef = coef.tolist()
    const = const.tolist()
    eq = eq.tolist()
    grp_ptr = grp_ptr.tolist()
    br_ptr = br_ptr.tolist()
    br_cons = br_cons.tolist()
    ok = True
    while ok:
        changed = 0
        for c in hard:
            res = _tighten(c, L, H, ptr, var, coef, const, eq)
            if res < 0:
                ok = False
                break
            changed |= res
        if not ok:
            break
        for g in range(len(grp_ptr) - 1):
            live = 0
            last = -1
            for br in range(grp_ptr[g], grp_ptr[g + 1]):
                if not A[br]:
                    continue
                if all(_possible(br_cons[t], L, H, ptr, var, coef, const, eq) for t in range(br_ptr[br], br_ptr[br + 1])):
                    live += 1
                    last = br
                else:
                    A[br] = 0
            if live == 0:
                ok = False
                break
            if live == 1:
                for t in range(br_ptr[last], br_ptr[last + 1]):
                    res = _tighten(br_cons[t], L, H, ptr, var, coef, const, eq)
                    if res < 0:
                        ok = False
                        break
                    changed |= res
                if not ok:
                    break
        if not changed:
            break
    lo[:] = L
    hi[:] = H
    alive[:] = A
    return ok
