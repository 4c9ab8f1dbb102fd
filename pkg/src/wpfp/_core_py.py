"""Pure numpy implementation of the brute-force Green's function sum."""

import numpy as np


def green_sum(w0, x, v, cell, period, coef, growth, shear, prefactor, images, cutoff):
    """Periodized phase-space quadrature of ``w0`` against the Gaussian kernel.

    ``coef`` holds ``(nu/f, lambda/f, mu/f)``; the kernel at output ``(x, v)``
    and source ``(x0, v0)`` is ``prefactor * exp(-Q(X, Y))`` with
    ``X = x - shear*v - x0 + m*period`` and ``Y = growth*v - v0``.
    """
    cnu, clam, cmu = coef
    w0 = np.asarray(w0, dtype=float)
    out = np.empty((x.size, v.size))
    for j in range(v.size):
        yv = (growth * v[j] - v)[None, None, :]
        base = (x[:, None] - shear * v[j] - x[None, :])[:, :, None]
        kern = np.zeros((x.size, x.size, v.size))
        for m in range(-images, images + 1):
            yx = base + m * period
            q = cnu * yx * yx + clam * yv * yv + cmu * yx * yv
            kern += np.exp(-np.minimum(q, cutoff)) * (q < cutoff)
        out[:, j] = np.einsum("ipq,pq->i", kern, w0)
    return out * (prefactor * cell)
