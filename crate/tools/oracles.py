"""Independent reference values frozen into the Rust test suites.

Run with `python3 tools/oracles.py`; every printed value appears verbatim
in crates/core/tests/oracles.rs.
"""
import mpmath as mp
import numpy as np

mp.mp.dps = 60


def water_filling(h, p):
    s2 = np.linalg.svd(h, compute_uv=False) ** 2
    s2 = s2[s2 > 1e-14]
    lo, hi = 0.0, p + np.sum(1.0 / s2)
    for _ in range(300):
        level = 0.5 * (lo + hi)
        used = np.sum(np.maximum(level - 1.0 / s2, 0.0))
        lo, hi = (level, hi) if used < p else (lo, level)
    powers = np.maximum(level - 1.0 / s2, 0.0)
    return float(np.sum(np.log1p(s2 * powers)))


def siso_pair_optimum(g, w, p):
    def f(p1):
        p2 = p - p1
        r1 = np.log1p(g[0][0] * p1 / (1.0 + g[0][1] * p2))
        r2 = np.log1p(g[1][1] * p2 / (1.0 + g[1][0] * p1))
        return w[0] * r1 + w[1] * r2

    grid = np.linspace(0.0, p, 200001)
    vals = f(grid)
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    for _ in range(200):
        a, b = lo + (hi - lo) / 3, hi - (hi - lo) / 3
        lo, hi = (a, hi) if f(a) < f(b) else (lo, b)
    return float(max(f(0.5 * (lo + hi)), vals[0], vals[-1]))


def regularized_logdet(a, b, kappas=(mp.mpf("1e-20"), mp.mpf("1e-25"), mp.mpf("1e-30"))):
    a = mp.matrix(a)
    b = mp.matrix(b)
    n = a.rows
    out = []
    for k in kappas:
        eye = mp.eye(n) * k
        out.append(mp.log(mp.det(a + b + eye)) - mp.log(mp.det(b + eye)))
    return out


h = np.array([[1.0 + 0.5j, 0.3 - 0.2j], [-0.4 + 0.1j, 0.8 + 0.9j]])
print("water_filling_2x2_p2", repr(water_filling(h, 2.0)))
h = np.array([[0.2 + 0.1j, 1.5 - 0.3j, 0.0], [0.7j, -0.1 + 0.0j, 0.4 + 0.4j]])
print("water_filling_2x3_p0.5", repr(water_filling(h, 0.5)))

g = [[1.0, 0.36], [0.25, 1.44]]
print("siso_pair_a", repr(siso_pair_optimum(g, [1.0, 0.7], 4.0)))
g = [[2.0, 1.5], [1.2, 0.8]]
print("siso_pair_b", repr(siso_pair_optimum(g, [0.6, 1.0], 4.0)))

# B = V diag(2, 0.5, 0) V^+ with a fixed unitary V; A = V diag(1, 3, 0) V^+
v = mp.matrix([[1, 1j, 0], [1j, 1, 1 + 1j], [0, 1 - 1j, 2]])
q, _ = mp.qr(v)
def conj(d):
    return q * mp.diag(d) * q.transpose_conj()
a = conj([1, 3, 0])
b = conj([2, mp.mpf("0.5"), 0])
vals = regularized_logdet(a, b)
print("logdet_truncated", [mp.nstr(x, 20) for x in vals])
print("logdet_closed", mp.nstr(mp.log(3 / mp.mpf(2)) + mp.log(mp.mpf("3.5") / mp.mpf("0.5")), 20))
print("unitary", [[mp.nstr(q[i, j].real, 20) + " " + mp.nstr(q[i, j].imag, 20) for j in range(3)] for i in range(3)])

m = mp.matrix([[1, mp.mpc("0.3", "0.2"), 0], [mp.mpc("0.3", "-0.2"), mp.mpf("0.8"), 0], [0, 0, 0]])
a2 = q * m * q.transpose_conj()
vals = regularized_logdet(a2, b)
print("logdet_coupled", [mp.nstr(x.real, 20) for x in vals])
