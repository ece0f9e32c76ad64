"""Pure-Python RK4 segment kernel, used when the compiled extension is absent."""
import numpy as np


def rk4_segment(c_in, x_in, dt, nsteps, stride, state_tol):
    """Advance ``x`` through ``nsteps`` RK4 steps of size ``dt`` under a fixed
    matrix.

    Returns ``(samples, max_conservation, max_violation, fail_step)``.
    ``samples`` holds the state after every ``stride``-th step and after the
    last step; ``fail_step`` is -1 unless the state left the simplex by more
    than ``state_tol`` (integration stops there).
    """
    c = np.asarray(c_in, dtype=float)
    n = c.shape[0]
    cols = [[(j, float(c[j, i])) for j in range(n) if c[j, i] != 0.0] for i in range(n)]
    rng = range(n)

    def field(v):
        y = [(1.0 - a) * a for a in v]
        out = []
        for i in rng:
            # same accumulation order as the compiled kernel, for bitwise parity
            acc = -y[i]
            for j, w in cols[i]:
                acc += w * y[j]
            out.append(acc)
        return out

    x = [float(a) for a in x_in]
    half, sixth = 0.5 * dt, dt / 6.0
    rows = []
    cons_max = viol_max = 0.0
    fail = -1
    for step in range(1, nsteps + 1):
        k1 = field(x)
        k2 = field([x[i] + half * k1[i] for i in rng])
        k3 = field([x[i] + half * k2[i] for i in rng])
        k4 = field([x[i] + dt * k3[i] for i in rng])
        x = [x[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in rng]
        s = 0.0
        for a in x:
            s += a
        cons = abs(s - 1.0)
        viol = max(0.0, -min(x), max(x) - 1.0)
        cons_max = max(cons_max, cons)
        viol_max = max(viol_max, viol)
        if viol > state_tol or cons > state_tol:
            fail = step
            break
        x = [a if a >= 0.0 else 0.0 for a in x]
        if step % stride == 0 or step == nsteps:
            rows.append(x)
    samples = np.array(rows, dtype=float).reshape(len(rows), n)
    return samples, cons_max, viol_max, fail
