"""Reference computations that share no code path with the package.

* operator substitution: expand prod_k (sum_j U[j, i_k] a_j^dag) as a
  polynomial in creation operators, then convert monomials to Fock
  amplitudes;
* interface/propagation transfer matrices (Fresnel coefficients) for thin
  films, as opposed to the characteristic-matrix form used in the package.
"""

import math
from collections import defaultdict

import numpy as np


def substitution_evolve(terms, U):
    """Evolve ``{occupation: amplitude}`` under ``a_i^dag -> sum_j U[j,i] a_j^dag``."""
    out = defaultdict(complex)
    m = U.shape[0]
    for occ, amp in terms.items():
        # |n> = prod (a_i^dag)^{n_i} / sqrt(n_i!) |0>
        poly = {(): amp / math.sqrt(math.prod(math.factorial(n) for n in occ))}
        for i, n in enumerate(occ):
            for _ in range(n):
                new = defaultdict(complex)
                for mono, c in poly.items():
                    for j in range(m):
                        if U[j, i] != 0:
                            new[tuple(sorted(mono + (j,)))] += c * U[j, i]
                poly = new
        for mono, c in poly.items():
            occ_out = [0] * m
            for j in mono:
                occ_out[j] += 1
            out[tuple(occ_out)] += c * math.sqrt(math.prod(math.factorial(n) for n in occ_out))
    return {k: v for k, v in out.items() if abs(v) > 1e-15}


def fresnel_stack(layers, wavelength, n_in=1.0, n_out=1.0):
    """Left-incidence (t, r) from interface and propagation matrices.

    Field amplitudes ``(forward, backward)`` are carried from the exit medium
    back to the entrance medium.  ``t`` is returned flux-normalized.
    """
    k0 = 2 * math.pi / wavelength
    ns = [n_in] + [complex(n) for _, n in layers] + [n_out]
    ds = [0.0] + [d for d, _ in layers] + [0.0]

    def interface(n1, n2):
        # from medium 1 to medium 2: amplitudes in 1 in terms of amplitudes in 2
        r12 = (n1 - n2) / (n1 + n2)
        t12 = 2 * n1 / (n1 + n2)
        return np.array([[1, r12], [r12, 1]], dtype=complex) / t12

    def propagate(n, d):
        ph = k0 * n * d
        return np.array([[np.exp(-1j * ph), 0], [0, np.exp(1j * ph)]])

    M = np.eye(2, dtype=complex)
    for j in range(len(ns) - 1):
        M = M @ interface(ns[j], ns[j + 1])
        if j + 1 < len(ns) - 1:
            M = M @ propagate(ns[j + 1], ds[j + 1])
    t = 1 / M[0, 0]
    r = M[1, 0] / M[0, 0]
    return t * math.sqrt(n_out / n_in), r


def halmos_check(M, U):
    """(unitarity residual, top-block error) of a claimed dilation."""
    m = M.shape[0]
    unit = np.max(np.abs(U.conj().T @ U - np.eye(2 * m)))
    block = np.max(np.abs(U[:m, :m] - M))
    return unit, block


def random_passive(rng, m, smax=1.0):
    """Random m x m matrix with singular values uniform in [0, smax]."""
    def haar(n):
        z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / math.sqrt(2)
        q, r = np.linalg.qr(z)
        return q * (np.diag(r) / np.abs(np.diag(r)))

    s = rng.uniform(0, smax, size=m)
    return haar(m) @ np.diag(s) @ haar(m), s


def random_unitary(rng, m):
    z = (rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
