"""Compiled stencil kernels for the hot loops.

Every kernel has a pure-numpy twin in the test suite; the kernels here exist
only for speed on large grids. All arithmetic is plain float64, no fastmath,
so results match the roll-based formulations to round-off.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def face_energy_density(u, hx, hy):
    """Node density q = half-sum of squared one-sided differences on the
    four incident faces, divided by the squared spacings. Periodic."""
    nx, ny, m = u.shape
    q = np.empty((nx, ny))
    cx = 0.5 / (hx * hx)
    cy = 0.5 / (hy * hy)
    for i in range(nx):
        ip = i + 1 if i + 1 < nx else 0
        im = i - 1 if i > 0 else nx - 1
        for j in range(ny):
            jp = j + 1 if j + 1 < ny else 0
            jm = j - 1 if j > 0 else ny - 1
            sx = 0.0
            sy = 0.0
            for k in range(m):
                c = u[i, j, k]
                dxp = u[ip, j, k] - c
                dxm = c - u[im, j, k]
                dyp = u[i, jp, k] - c
                dym = c - u[i, jm, k]
                sx += dxp * dxp + dxm * dxm
                sy += dyp * dyp + dym * dym
            q[i, j] = sx * cx + sy * cy
    return q


@njit(cache=True)
def weighted_div(u, w, hx, hy):
    """div(w_face * grad u) with face weights averaged from node weights."""
    nx, ny, m = u.shape
    out = np.empty_like(u)
    ihx2 = 1.0 / (hx * hx)
    ihy2 = 1.0 / (hy * hy)
    for i in range(nx):
        ip = i + 1 if i + 1 < nx else 0
        im = i - 1 if i > 0 else nx - 1
        for j in range(ny):
            jp = j + 1 if j + 1 < ny else 0
            jm = j - 1 if j > 0 else ny - 1
            wc = w[i, j]
            wxp = 0.5 * (wc + w[ip, j])
            wxm = 0.5 * (wc + w[im, j])
            wyp = 0.5 * (wc + w[i, jp])
            wym = 0.5 * (wc + w[i, jm])
            for k in range(m):
                c = u[i, j, k]
                out[i, j, k] = (wxp * (u[ip, j, k] - c) - wxm * (c - u[im, j, k])) * ihx2 \
                    + (wyp * (u[i, jp, k] - c) - wym * (c - u[i, jm, k])) * ihy2
    return out


@njit(cache=True)
def weighted_div_tangent(u, w, hx, hy, scale):
    """scale * tangential part of div(w_face * grad u); the projection removes
    the component along u nodewise (unit target assumed)."""
    nx, ny, m = u.shape
    out = np.empty_like(u)
    ihx2 = 1.0 / (hx * hx)
    ihy2 = 1.0 / (hy * hy)
    for i in range(nx):
        ip = i + 1 if i + 1 < nx else 0
        im = i - 1 if i > 0 else nx - 1
        for j in range(ny):
            jp = j + 1 if j + 1 < ny else 0
            jm = j - 1 if j > 0 else ny - 1
            wc = w[i, j]
            wxp = 0.5 * (wc + w[ip, j])
            wxm = 0.5 * (wc + w[im, j])
            wyp = 0.5 * (wc + w[i, jp])
            wym = 0.5 * (wc + w[i, jm])
            dot = 0.0
            for k in range(m):
                c = u[i, j, k]
                d = (wxp * (u[ip, j, k] - c) - wxm * (c - u[im, j, k])) * ihx2 \
                    + (wyp * (u[i, jp, k] - c) - wym * (c - u[i, jm, k])) * ihy2
                out[i, j, k] = d
                dot += d * c
            for k in range(m):
                out[i, j, k] = scale * (out[i, j, k] - dot * u[i, j, k])
    return out


@njit(cache=True)
def laplacian_5pt(u, hx, hy):
    """Standard periodic 5-point Laplacian, one array in, one array out."""
    nx, ny, m = u.shape
    out = np.empty_like(u)
    ihx2 = 1.0 / (hx * hx)
    ihy2 = 1.0 / (hy * hy)
    for i in range(nx):
        ip = i + 1 if i + 1 < nx else 0
        im = i - 1 if i > 0 else nx - 1
        for j in range(ny):
            jp = j + 1 if j + 1 < ny else 0
            jm = j - 1 if j > 0 else ny - 1
            for k in range(m):
                c = u[i, j, k]
                out[i, j, k] = (u[ip, j, k] - 2.0 * c + u[im, j, k]) * ihx2 \
                    + (u[i, jp, k] - 2.0 * c + u[i, jm, k]) * ihy2
    return out


@njit(cache=True)
def biharmonic_descent(u, lap, eps, hx, hy):
    """2 * tangential part of (lap - eps * Delta lap), lap precomputed."""
    nx, ny, m = u.shape
    out = np.empty_like(u)
    ihx2 = 1.0 / (hx * hx)
    ihy2 = 1.0 / (hy * hy)
    for i in range(nx):
        ip = i + 1 if i + 1 < nx else 0
        im = i - 1 if i > 0 else nx - 1
        for j in range(ny):
            jp = j + 1 if j + 1 < ny else 0
            jm = j - 1 if j > 0 else ny - 1
            dot = 0.0
            for k in range(m):
                c = lap[i, j, k]
                lap2 = (lap[ip, j, k] - 2.0 * c + lap[im, j, k]) * ihx2 \
                    + (lap[i, jp, k] - 2.0 * c + lap[i, jm, k]) * ihy2
                d = c - eps * lap2
                out[i, j, k] = d
                dot += d * u[i, j, k]
            for k in range(m):
                out[i, j, k] = 2.0 * (out[i, j, k] - dot * u[i, j, k])
    return out


@njit(cache=True)
def squared_norm_field(a):
    """Nodewise squared euclidean norm over the last axis."""
    nx, ny, m = a.shape
    out = np.empty((nx, ny))
    for i in range(nx):
        for j in range(ny):
            s = 0.0
            for k in range(m):
                s += a[i, j, k] * a[i, j, k]
            out[i, j] = s
    return out
