"""Independent reference computations used by the tests.

Horizontal derivatives here come straight from the group law: ``Xu(p)`` is
``d/ds u(p ∘ (s,0,0))`` and ``XYu(p)`` is ``d/ds d/dtau u(p ∘ (s,0,0) ∘ (0,tau,0))``,
approximated by central differences.  Nothing from the jet calculus is used.
"""

import numpy as np

from hma.group import compose


def _shift(p, v):
    return np.asarray(compose(p, np.broadcast_to(np.asarray(v, dtype=float), p.shape)))


FIRST = ("Xu", "Yu", "Ut")


def group_fd_horizontal(u, p, h=1e-4, h2=1e-3, richardson=True):
    """Dict with Xu, Yu, Ut, XXu, YYu, XYu, YXu by group-law central differences.

    First derivatives use step ``h`` and second derivatives ``h2`` (a smaller
    step would be dominated by round-off).  With ``richardson`` each step is
    paired with its half to cancel the ``h^2`` truncation term.
    """
    if richardson:
        out = {}
        for step, keys in ((h, FIRST), (h2, None)):
            coarse = group_fd_horizontal(u, p, step, step, False)
            fine = group_fd_horizontal(u, p, step / 2, step / 2, False)
            for k in fine:
                if (keys is None) != (k in FIRST):
                    out[k] = (4.0 * fine[k] - coarse[k]) / 3.0
        return out
    p = np.asarray(p, dtype=float)
    ex, ey, et = np.eye(3)
    f = lambda *steps: _chain(u, p, steps)
    u0 = u(p)
    out = {
        "Xu": (f(h * ex) - f(-h * ex)) / (2 * h),
        "Yu": (f(h * ey) - f(-h * ey)) / (2 * h),
        "Ut": (f(h * et) - f(-h * et)) / (2 * h),
        "XXu": (f(h * ex) - 2 * u0 + f(-h * ex)) / h**2,
        "YYu": (f(h * ey) - 2 * u0 + f(-h * ey)) / h**2,
    }
    xy = sum(sa * sb * f(sa * h * ex, sb * h * ey) for sa in (1, -1) for sb in (1, -1))
    yx = sum(sa * sb * f(sa * h * ey, sb * h * ex) for sa in (1, -1) for sb in (1, -1))
    out["XYu"] = xy / (4 * h * h)
    out["YXu"] = yx / (4 * h * h)
    return out


def _chain(u, p, steps):
    q = p
    for s in steps:
        q = _shift(q, s)
    return np.asarray(u(q))


def eig_min_2x2(h11, h12, h22):
    """Smallest eigenvalue through numpy's symmetric eigensolver."""
    m = np.stack([np.stack([h11, h12], -1), np.stack([h12, h22], -1)], -2)
    return np.linalg.eigvalsh(m)[..., 0]


def random_points(rng, n, lo=(-1, -1, -1), hi=(1, 1, 1)):
    return rng.uniform(lo, hi, size=(n, 3))


def random_ball_points(rng, n, radius=1.0):
    """Points of the gauge ball by rejection from its bounding box."""
    from hma.group import gauge

    out = []
    while sum(len(o) for o in out) < n:
        q = rng.uniform((-radius, -radius, -radius**2), (radius, radius, radius**2), size=(4 * n, 3))
        out.append(q[np.asarray(gauge(q)) < radius])
    return np.concatenate(out)[:n]
