"""Shared quadrature helpers: fixed grids, oscillatory sums, tail moments."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import exp1


def gauss_legendre_nodes(n, a, b):
    """Gauss-Legendre nodes/weights mapped onto [a, b]."""
    x, w = leggauss(n)
    nodes = 0.5 * (b - a) * (x + 1.0) + a
    weights = 0.5 * (b - a) * w
    return nodes, weights


def trapezoid_weights(grid):
    """Composite-trapezoid weights for an arbitrary sorted grid."""
    g = np.asarray(grid, dtype=float)
    w = np.zeros_like(g)
    d = np.diff(g)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def oscillatory_sums(tau, weights, f_list, nus, chunk=256, threads=1,
                     inner_block=16384):
    """sum_k w_k f(tau_k) exp(i nu tau_k) for each f and each nu.

    Blocks of `chunk` nu-values are processed with one phase matrix each,
    accumulated over fixed-size slices of the tau axis; block sizes do
    not depend on the thread count, so serial and threaded runs reduce
    in the same order and produce bit-identical results.
    """
    tau = np.asarray(tau, dtype=float)
    nus = np.asarray(nus, dtype=float)
    wf = [np.asarray(weights * f, dtype=complex) for f in f_list]
    out = [np.empty(nus.size, dtype=complex) for _ in f_list]
    starts = range(0, nus.size, chunk)

    def run_block(i0):
        nu = nus[i0:i0 + chunk]
        acc = [np.zeros(nu.size, dtype=complex) for _ in wf]
        for k0 in range(0, tau.size, inner_block):
            ph = np.exp(1j * np.outer(nu, tau[k0:k0 + inner_block]))
            for a, w in zip(acc, wf):
                a += ph @ w[k0:k0 + inner_block]
        return i0, acc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_block, starts))
    else:
        results = [run_block(i0) for i0 in starts]
    for i0, vals in results:
        for o, v in zip(out, vals):
            o[i0:i0 + len(v)] = v
    return out


def exp_tail_moments(nu, tau_c, orders=(2, 4)):
    """Closed-form T_n(nu) = int_{tau_c}^inf exp(i nu t) t^-n dt.

    Uses T_n = exp(i nu tau_c) tau_c^(1-n)/(n-1) + (i nu/(n-1)) T_{n-1}
    with T_1 = E1(-i nu tau_c); nu = 0 reduces to tau_c^(1-n)/(n-1).
    """
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    ph = np.exp(1j * nu * tau_c)
    nonzero = nu != 0.0
    t1 = np.zeros(nu.size, dtype=complex)
    t1[nonzero] = exp1(-1j * nu[nonzero] * tau_c)
    tn = t1
    table = {1: t1}
    for n in range(2, max(orders) + 1):
        tn = ph * tau_c ** (1 - n) / (n - 1) + (1j * nu / (n - 1)) * tn
        # the E1-based recursion is singular-free, but the nu=0 limit is exact
        tn = np.where(nonzero, tn, tau_c ** (1 - n) / (n - 1))
        table[n] = tn
    return tuple(table[n] for n in orders)
