"""Reference angular eigenvalues by shooting from both poles (scipy DOP853).

After removing the scalar gauge factor, A_k(lambda) u = mu u becomes
v' = -h sigma_3 v + i mu / sqrt(Delta_theta) sigma_1 v,  h = (k E - lambda a sin^2) / (Delta_theta sin).
Regular Frobenius data at theta = eps and pi - eps, matched by a 2x2 determinant at pi/2.
"""
import numpy as np
import mpmath as mp
from scipy.integrate import solve_ivp

EPS = 1e-6


def rhs_factory(k, lam, a, Lam, mu):
    zeta = a * a * Lam / 3
    E = 1 + zeta

    def rhs(t, v):
        dt = 1 + zeta * np.cos(t) ** 2
        h = (k * E - lam * a * np.sin(t) ** 2) / (dt * np.sin(t))
        c = 1j * mu / np.sqrt(dt)
        return [-h * v[0] + c * v[1], h * v[1] + c * v[0]]

    return rhs, E


def start(k, mu, s, pole):
    c = 1j * mu  # mu / sqrt(Delta_theta) at the pole
    ak = abs(k)
    if pole == 0:
        return [c / (2 * k + 1) * s ** (k + 1), s ** k] if k > 0 else [s ** ak, c / (2 * ak + 1) * s ** (ak + 1)]
    return [s ** k, -c / (2 * k + 1) * s ** (k + 1)] if k > 0 else [-c / (2 * ak + 1) * s ** (ak + 1), s ** ak]


def mismatch(k, lam, a, Lam, mu):
    zeta = a * a * Lam / 3
    mu_s = mu / np.sqrt(1 + zeta)
    rhs, _ = rhs_factory(k, lam, a, Lam, mu)
    opts = dict(method="DOP853", rtol=1e-13, atol=1e-15)
    left = solve_ivp(rhs, [EPS, np.pi / 2], np.array(start(k, mu_s, EPS, 0), dtype=complex), **opts).y[:, -1]
    right = solve_ivp(rhs, [np.pi - EPS, np.pi / 2], np.array(start(k, mu_s, EPS, 1), dtype=complex), **opts).y[:, -1]
    return left[0] * right[1] - left[1] * right[0]


def eigenvalue(k, l, lam, a, Lam):
    guess = np.sign(l) * (abs(k) - 0.5 + abs(l))
    f = lambda m: mismatch(k, lam, a, Lam, complex(m))
    return complex(mp.findroot(f, (mp.mpc(guess), mp.mpc(guess + 0.01)), solver="secant", tol=1e-24))


if __name__ == "__main__":
    cases = [(0.5, 1, 0.0, 0.0, 0.04), (0.5, 1, 1.5, 0.05, 0.04), (1.5, -2, 1.5, 0.05, 0.04),
             (0.5, 2, complex(1.5, -0.1), 0.05, 0.04), (-2.5, 3, 0.8, 0.1, 0.04)]
    for k, l, lam, a, Lam in cases:
        mu = eigenvalue(k, l, lam, a, Lam)
        print(f"k={k} l={l} lambda={lam} a={a} Lambda={Lam}: mu = {mu.real:.15f} {mu.imag:+.15f}i")
