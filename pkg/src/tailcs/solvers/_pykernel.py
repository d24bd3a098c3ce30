"""Pure-numpy inner loop of the weighted-l1 splitting solver.

One step of the over-relaxed iteration, in coefficient space, for
``min sum_j w_j |y_j|`` over an affine set with projector ``y = L c + g``::

    y   = L (z - u) + g
    yh  = alpha * y + (1 - alpha) * z
    z+  = soft(yh + u, w / rho)
    u+  = u + yh - z+

``z``, ``u``, ``y`` and ``support`` are updated in place.
"""
import numpy as np

EXHAUSTED, CONVERGED, STABLE = 0, 1, 2


def admm_steps(L, g, w, z, u, y, support, tried, check_tried, rho, alpha,
               abs_tol, rel_tol, max_steps, window, stable):
    """Run up to ``max_steps`` iterations.

    Returns ``(status, steps, stable, r, s, eps_pri, eps_dual)`` where
    ``status`` is CONVERGED when both residuals fall under their thresholds,
    STABLE when the support of ``z`` has not changed for ``window`` steps
    (and differs from ``tried`` if ``check_tried``), else EXHAUSTED.
    """
    n = L.shape[0]
    sqn = np.sqrt(n)
    kappa = w / rho
    status = EXHAUSTED
    r = s = eps_pri = eps_dual = 0.0
    step = 0
    while step < max_steps:
        step += 1
        y[:] = L @ (z - u) + g
        yh = alpha * y + (1.0 - alpha) * z
        v = yh + u
        mag = np.abs(v)
        keep = mag > kappa
        zn = np.zeros_like(z)
        zn[keep] = v[keep] * (1.0 - kappa[keep] / mag[keep])
        s = rho * np.linalg.norm(zn - z)
        u[:] = v - zn
        r = np.linalg.norm(y - zn)
        z[:] = zn
        eps_pri = abs_tol * sqn + rel_tol * max(np.linalg.norm(y), np.linalg.norm(z))
        eps_dual = abs_tol * sqn + rel_tol * rho * np.linalg.norm(u)
        new_support = keep.view(np.uint8)
        changed = not np.array_equal(new_support, support)
        support[:] = new_support
        if r < eps_pri and s < eps_dual:
            status = CONVERGED
            break
        stable = 0 if changed else stable + 1
        if stable >= window and not (check_tried and np.array_equal(support, tried)):
            status = STABLE
            break
    return status, step, stable, float(r), float(s), float(eps_pri), float(eps_dual)
