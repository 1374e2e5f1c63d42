"""Hot numerical kernels: numba-jitted with a pure-NumPy fallback.

Backend selection: the environment variable ``WW_BACKEND`` ("numba" or
"numpy") wins; otherwise numba is used when importable.  All kernels are
sequential and deterministic for fixed inputs; the two backends agree to
floating-point roundoff (summation order differs slightly).

The compressed history scheme used for long runs keeps the recent window on
the fine grid and represents the far history by hierarchical panel moments
(cubic in s) of psi(s) = e^{-i nu s} c(s).  A panel of width L is only used
at distances >= theta*L, which bounds the quartic Taylor remainder of the
smooth kernel factor by 35/(2*theta)^4 (~3e-5 relative for theta = 16).
Unlike a plain history cut, this retains the power-law kernel tail that
drives the long-time sub-exponential decay.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def _njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


_MOM = 4  # panel moments m = 0..3
_THETA = 16  # panel width-to-distance ratio


def resolve_backend(name: str | None = None) -> str:
    """Pick "numba" or "numpy" from the argument, WW_BACKEND, or availability."""
    choice = name or os.environ.get("WW_BACKEND", "").strip().lower()
    if choice == "":
        choice = "numba" if HAVE_NUMBA else "numpy"
    if choice not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {choice!r} (use 'numba' or 'numpy')")
    if choice == "numba" and not HAVE_NUMBA:
        choice = "numpy"
    return choice


# ---------------------------------------------------------------------------
# full-history trapezoidal product integration
# ---------------------------------------------------------------------------


def _trap_full_py(M, c, h):
    # implicit trapezoid step; history summed by np.dot
    N = c.shape[0] - 1
    F = 0.0 + 0.0j
    denom = 1.0 + h * h * M[0] * 0.25
    for n in range(N):
        hist = np.dot(M[1 : n + 1], c[n:0:-1]) if n >= 1 else 0.0 + 0.0j
        G = -h * (hist + 0.5 * M[n + 1] * c[0])
        c[n + 1] = (c[n] + 0.5 * h * F + 0.5 * h * G) / denom
        F = G - 0.5 * h * M[0] * c[n + 1]


@_njit(cache=True)
def _trap_full_nb(M, c, h):  # pragma: no cover - numba-compiled
    N = c.shape[0] - 1
    F = 0.0 + 0.0j
    denom = 1.0 + h * h * M[0] * 0.25
    for n in range(N):
        hist = 0.0 + 0.0j
        for j in range(1, n + 1):
            hist += M[j] * c[n + 1 - j]
        G = -h * (hist + 0.5 * M[n + 1] * c[0])
        c[n + 1] = (c[n] + 0.5 * h * F + 0.5 * h * G) / denom
        F = G - 0.5 * h * M[0] * c[n + 1]


def trap_full(M: np.ndarray, n_steps: int, h: float, backend: str | None = None):
    """Solve c' = -(M * c)(t) on n_steps uniform steps, c(0) = 1.

    M[j] must hold the kernel at offsets j*h for j = 0..n_steps+1.
    Returns the amplitude on the full grid (n_steps+1 points).
    """
    c = np.zeros(n_steps + 1, dtype=np.complex128)
    c[0] = 1.0
    if resolve_backend(backend) == "numba":
        _trap_full_nb(M, c, h)
    else:
        _trap_full_py(M, c, h)
    return c


# ---------------------------------------------------------------------------
# compressed-history trapezoidal scheme (fine window + hierarchical moments)
# ---------------------------------------------------------------------------


def _compressed_layout(n_steps: int, p0: int):
    nlev = 1
    while (p0 << nlev) <= n_steps:
        nlev += 1
    lev_size = np.empty(nlev, dtype=np.int64)
    lev_off = np.empty(nlev, dtype=np.int64)
    total = 0
    for k in range(nlev):
        lev_off[k] = total
        lev_size[k] = n_steps // (p0 << k) + 1
        total += lev_size[k]
    return nlev, lev_off, total


def _trap_compressed_core(M, c, h, nu, eps, D, p0, theta, nlev, lev_off, mom, built):
    N = c.shape[0] - 1
    W = theta * p0
    F = 0.0 + 0.0j
    denom = 1.0 + h * h * M[0] * 0.25
    for n in range(N):
        nt = n + 1
        # far field over completed panels up to the aligned boundary m0
        m0 = ((nt - W) // p0) * p0
        if m0 < 0:
            m0 = 0
        far = 0.0 + 0.0j
        if m0 > 0:
            acc = 0.0 + 0.0j
            pos = 0
            while pos < m0:
                k = 0
                size = p0
                while True:
                    size2 = size * 2
                    k2 = k + 1
                    if (
                        k2 < nlev
                        and pos % size2 == 0
                        and pos + size2 <= m0
                        and nt - (pos + size2) >= theta * size2
                        and built[lev_off[k2] + pos // size2] == 1
                    ):
                        k = k2
                        size = size2
                    else:
                        break
                slot = lev_off[k] + pos // size
                T = (nt - pos) * h - size * h * 0.5
                inv = 1.0 / (T - 1j * eps)
                f = inv * inv
                f = f * f  # (T - i eps)^-4
                acc += mom[4 * slot] * f
                f *= inv
                acc += 4.0 * mom[4 * slot + 1] * f
                f *= inv
                acc += 10.0 * mom[4 * slot + 2] * f
                f *= inv
                acc += 20.0 * mom[4 * slot + 3] * f
                pos += size
            far = -6.0 * D * np.exp(1j * nu * nt * h) * acc
        # fine window [m0, n] by trapezoid (half weight at the junction)
        hist = 0.5 * M[nt - m0] * c[m0]
        for j in range(m0 + 1, n + 1):
            hist += M[nt - j] * c[j]
        G = far - h * hist
        c[n + 1] = (c[n] + 0.5 * h * F + 0.5 * h * G) / denom
        F = G - 0.5 * h * M[0] * c[n + 1]
        # freeze completed level-0 panel, merge parents as siblings complete
        if nt % p0 == 0:
            p = nt // p0 - 1
            a = p * p0
            sp = (a + p0 * 0.5) * h
            m0c = 0.0 + 0.0j
            m1c = 0.0 + 0.0j
            m2c = 0.0 + 0.0j
            m3c = 0.0 + 0.0j
            for j in range(a, a + p0 + 1):
                wj = 1.0
                if j == a or j == a + p0:
                    wj = 0.5
                ph = wj * np.exp(-1j * nu * j * h) * c[j]
                x = j * h - sp
                m0c += ph
                m1c += x * ph
                m2c += x * x * ph
                m3c += x * x * x * ph
            slot = lev_off[0] + p
            mom[4 * slot] = h * m0c
            mom[4 * slot + 1] = h * m1c
            mom[4 * slot + 2] = h * m2c
            mom[4 * slot + 3] = h * m3c
            built[slot] = 1
            k = 0
            q = p
            while q % 2 == 1 and k + 1 < nlev:
                left = lev_off[k] + q - 1
                if built[left] != 1:
                    break
                right = lev_off[k] + q
                parent = lev_off[k + 1] + (q >> 1)
                off = (p0 << k) * h * 0.5  # child center to parent center
                for ci in range(2):
                    child = left if ci == 0 else right
                    d = -off if ci == 0 else off
                    c0 = mom[4 * child]
                    c1 = mom[4 * child + 1]
                    c2 = mom[4 * child + 2]
                    c3 = mom[4 * child + 3]
                    mom[4 * parent] += c0
                    mom[4 * parent + 1] += c1 + d * c0
                    mom[4 * parent + 2] += c2 + 2.0 * d * c1 + d * d * c0
                    mom[4 * parent + 3] += c3 + 3.0 * d * c2 + 3.0 * d * d * c1 + d**3 * c0
                built[parent] = 1
                k += 1
                q >>= 1


_trap_compressed_nb = _njit(cache=True)(_trap_compressed_core)


def trap_compressed(
    M: np.ndarray,
    n_steps: int,
    h: float,
    nu: float,
    eps: float,
    D: float,
    t_mem: float,
    backend: str | None = None,
):
    """Compressed-history variant of ``trap_full`` for long horizons.

    ``t_mem`` sets the fine-resolution window; the far history is kept as
    hierarchical panel moments rather than dropped.  M[j] must cover offsets
    up to the fine window plus one base panel.
    """
    p0 = max(4, int(round(t_mem / (_THETA * h))))
    nlev, lev_off, total = _compressed_layout(n_steps, p0)
    mom = np.zeros(4 * total, dtype=np.complex128)
    built = np.zeros(total, dtype=np.uint8)
    c = np.zeros(n_steps + 1, dtype=np.complex128)
    c[0] = 1.0
    fn = _trap_compressed_nb if resolve_backend(backend) == "numba" else _trap_compressed_core
    fn(M, c, h, nu, eps, D, p0, _THETA, nlev, lev_off, mom, built)
    return c


def compressed_fine_steps(t_mem: float, h: float) -> int:
    """Number of fine-grid kernel samples the compressed scheme needs."""
    p0 = max(4, int(round(t_mem / (_THETA * h))))
    return _THETA * p0 + p0 + 2


# ---------------------------------------------------------------------------
# fourth-order Volterra Runge-Kutta (Pouzet extension of classical RK4)
# ---------------------------------------------------------------------------


def _gregory_weights(n: int) -> np.ndarray:
    # composite quadrature weights over n uniform intervals, order 4
    w = np.ones(n + 1)
    if n == 1:
        w[0] = w[1] = 0.5
    elif n == 2:
        w[0] = w[2] = 1.0 / 3.0
        w[1] = 4.0 / 3.0
    elif n == 3:
        w[0] = w[3] = 3.0 / 8.0
        w[1] = w[2] = 9.0 / 8.0
    elif n == 4:
        w[0] = w[4] = 1.0 / 3.0
        w[1] = w[3] = 4.0 / 3.0
        w[2] = 2.0 / 3.0
    elif n == 5:
        w[0] = 1.0 / 3.0
        w[1] = 4.0 / 3.0
        w[2] = 1.0 / 3.0 + 3.0 / 8.0
        w[3] = w[4] = 9.0 / 8.0
        w[5] = 3.0 / 8.0
    else:
        w[0] = w[n] = 3.0 / 8.0
        w[1] = w[n - 1] = 7.0 / 6.0
        w[2] = w[n - 2] = 23.0 / 24.0
    return w


def _rk4_volterra_py(M0, Mh, c, h):
    N = c.shape[0] - 1
    mhalf = Mh[0]
    mzero = M0[0]
    for n in range(N):
        if n == 0:
            P0 = Ph = P1 = 0.0 + 0.0j
        else:
            w = _gregory_weights(n)
            wc = w * c[: n + 1]
            P0 = h * np.dot(M0[n::-1], wc)
            Ph = h * np.dot(Mh[n::-1], wc)
            P1 = h * np.dot(M0[n + 1 : 0 : -1], wc)
        Z1 = P0
        Y2 = c[n] - 0.5 * h * Z1
        Z2 = Ph + 0.5 * h * mhalf * c[n]
        Y3 = c[n] - 0.5 * h * Z2
        Z3 = Ph + 0.5 * h * mzero * Y2
        Z4 = P1 + h * mhalf * Y3
        c[n + 1] = c[n] - h * (Z1 + 2.0 * Z2 + 2.0 * Z3 + Z4) / 6.0


@_njit(cache=True)
def _rk4_volterra_nb(M0, Mh, c, h):  # pragma: no cover - numba-compiled
    N = c.shape[0] - 1
    mhalf = Mh[0]
    mzero = M0[0]
    for n in range(N):
        P0 = 0.0 + 0.0j
        Ph = 0.0 + 0.0j
        P1 = 0.0 + 0.0j
        if n >= 1:
            for j in range(n + 1):
                wj = 1.0
                if n == 1:
                    wj = 0.5
                elif n == 2:
                    wj = 4.0 / 3.0 if j == 1 else 1.0 / 3.0
                elif n == 3:
                    wj = 3.0 / 8.0 if (j == 0 or j == 3) else 9.0 / 8.0
                elif n == 4:
                    if j == 0 or j == 4:
                        wj = 1.0 / 3.0
                    elif j == 2:
                        wj = 2.0 / 3.0
                    else:
                        wj = 4.0 / 3.0
                elif n == 5:
                    if j == 0 or j == 2:
                        wj = 1.0 / 3.0 if j == 0 else 1.0 / 3.0 + 3.0 / 8.0
                    elif j == 1:
                        wj = 4.0 / 3.0
                    elif j == 5:
                        wj = 3.0 / 8.0
                    else:
                        wj = 9.0 / 8.0
                else:
                    if j == 0 or j == n:
                        wj = 3.0 / 8.0
                    elif j == 1 or j == n - 1:
                        wj = 7.0 / 6.0
                    elif j == 2 or j == n - 2:
                        wj = 23.0 / 24.0
                wc = wj * c[j]
                P0 += M0[n - j] * wc
                Ph += Mh[n - j] * wc
                P1 += M0[n + 1 - j] * wc
            P0 *= h
            Ph *= h
            P1 *= h
        Z1 = P0
        Y2 = c[n] - 0.5 * h * Z1
        Z2 = Ph + 0.5 * h * mhalf * c[n]
        Y3 = c[n] - 0.5 * h * Z2
        Z3 = Ph + 0.5 * h * mzero * Y2
        Z4 = P1 + h * mhalf * Y3
        c[n + 1] = c[n] - h * (Z1 + 2.0 * Z2 + 2.0 * Z3 + Z4) / 6.0


def rk4_volterra(
    M0: np.ndarray, Mh: np.ndarray, n_steps: int, h: float, backend: str | None = None
):
    """Pouzet-type RK4 for the convolution equation; order 4 in h.

    M0[j] = kernel at j*h, Mh[j] = kernel at j*h + h/2, both for
    j = 0..n_steps+1.  The history (lag) term is integrated with Gregory
    weights of order 4 (Simpson-family closures for the first five steps).
    """
    c = np.zeros(n_steps + 1, dtype=np.complex128)
    c[0] = 1.0
    if resolve_backend(backend) == "numba":
        _rk4_volterra_nb(M0, Mh, c, h)
    else:
        _rk4_volterra_py(M0, Mh, c, h)
    return c


# ---------------------------------------------------------------------------
# coupled-mode RK4 (atom + N bath modes, explicit interaction phases)
# ---------------------------------------------------------------------------


def _modes_rk4_py(G, inc, h, n_steps, store_every, out_ce, out_norm, cg):
    nm = G.shape[0]
    ce = 1.0 + 0.0j
    Et = np.ones(nm, dtype=np.complex128)
    out_ce[0] = ce
    out_norm[0] = 1.0
    m = 1
    for n in range(n_steps):
        Eh = Et * inc
        Ef = Eh * inc
        gEt = G * Et
        gEh = G * Eh
        gEf = G * Ef
        k1e = -1j * np.dot(gEt, cg)
        k1g = -1j * np.conj(gEt) * ce
        y2e = ce + 0.5 * h * k1e
        y2g = cg + 0.5 * h * k1g
        k2e = -1j * np.dot(gEh, y2g)
        k2g = -1j * np.conj(gEh) * y2e
        y3e = ce + 0.5 * h * k2e
        y3g = cg + 0.5 * h * k2g
        k3e = -1j * np.dot(gEh, y3g)
        k3g = -1j * np.conj(gEh) * y3e
        y4e = ce + h * k3e
        y4g = cg + h * k3g
        k4e = -1j * np.dot(gEf, y4g)
        k4g = -1j * np.conj(gEf) * y4e
        ce = ce + h * (k1e + 2 * k2e + 2 * k3e + k4e) / 6.0
        cg += h * (k1g + 2 * k2g + 2 * k3g + k4g) / 6.0
        Et = Ef
        if (n + 1) % 4096 == 0:
            Et /= np.abs(Et)
        if (n + 1) % store_every == 0 or n == n_steps - 1:
            out_ce[m] = ce
            out_norm[m] = abs(ce) ** 2 + float(np.sum(np.abs(cg) ** 2))
            m += 1
    return m, ce


@_njit(cache=True)
def _modes_rk4_nb(G, inc, h, n_steps, store_every, out_ce, out_norm, cg):  # pragma: no cover
    nm = G.shape[0]
    ce = 1.0 + 0.0j
    Et = np.ones(nm, dtype=np.complex128)
    Eh = np.empty(nm, dtype=np.complex128)
    Ef = np.empty(nm, dtype=np.complex128)
    y2g = np.empty(nm, dtype=np.complex128)
    y3g = np.empty(nm, dtype=np.complex128)
    y4g = np.empty(nm, dtype=np.complex128)
    out_ce[0] = ce
    out_norm[0] = 1.0
    m = 1
    for n in range(n_steps):
        s1 = 0.0 + 0.0j
        for j in range(nm):
            Eh[j] = Et[j] * inc[j]
            Ef[j] = Eh[j] * inc[j]
            s1 += G[j] * Et[j] * cg[j]
        k1e = -1j * s1
        y2e = ce + 0.5 * h * k1e
        s2 = 0.0 + 0.0j
        for j in range(nm):
            k1g = -1j * G[j] * np.conj(Et[j]) * ce
            y2g[j] = cg[j] + 0.5 * h * k1g
            s2 += G[j] * Eh[j] * y2g[j]
        k2e = -1j * s2
        y3e = ce + 0.5 * h * k2e
        s3 = 0.0 + 0.0j
        for j in range(nm):
            k2g = -1j * G[j] * np.conj(Eh[j]) * y2e
            y3g[j] = cg[j] + 0.5 * h * k2g
            s3 += G[j] * Eh[j] * y3g[j]
        k3e = -1j * s3
        y4e = ce + h * k3e
        s4 = 0.0 + 0.0j
        for j in range(nm):
            k3g = -1j * G[j] * np.conj(Eh[j]) * y3e
            y4g[j] = cg[j] + h * k3g
            s4 += G[j] * Ef[j] * y4g[j]
        k4e = -1j * s4
        norm = 0.0
        for j in range(nm):
            k1g = -1j * G[j] * np.conj(Et[j]) * ce
            k2g = -1j * G[j] * np.conj(Eh[j]) * y2e
            k3g = -1j * G[j] * np.conj(Eh[j]) * y3e
            k4g = -1j * G[j] * np.conj(Ef[j]) * y4e
            cg[j] = cg[j] + h * (k1g + 2.0 * k2g + 2.0 * k3g + k4g) / 6.0
            Et[j] = Ef[j]
            norm += cg[j].real * cg[j].real + cg[j].imag * cg[j].imag
        ce = ce + h * (k1e + 2.0 * k2e + 2.0 * k3e + k4e) / 6.0
        if (n + 1) % 4096 == 0:
            for j in range(nm):
                Et[j] = Et[j] / abs(Et[j])
        if (n + 1) % store_every == 0 or n == n_steps - 1:
            out_ce[m] = ce
            out_norm[m] = ce.real * ce.real + ce.imag * ce.imag + norm
            m += 1
    return m, ce


def modes_rk4(
    G: np.ndarray,
    delta: np.ndarray,
    h: float,
    n_steps: int,
    store_every: int,
    backend: str | None = None,
):
    """Integrate the (N+1)-dimensional mode system with classical RK4.

    G are the per-mode coupling strengths, delta = nu - omega_j the
    detunings kept as explicit phases e^{i delta t}.  Returns stored times,
    excited amplitudes, total-norm samples and the final mode amplitudes.
    """
    n_out = n_steps // store_every + 2
    out_ce = np.zeros(n_out, dtype=np.complex128)
    out_norm = np.zeros(n_out, dtype=np.float64)
    cg = np.zeros(G.shape[0], dtype=np.complex128)
    inc = np.exp(1j * delta * h * 0.5)
    fn = _modes_rk4_nb if resolve_backend(backend) == "numba" else _modes_rk4_py
    m, ce = fn(G, inc, h, n_steps, store_every, out_ce, out_norm, cg)
    idx = np.arange(1, m)
    stored_steps = np.minimum(idx * store_every, n_steps)
    times = np.concatenate(([0.0], stored_steps * h))
    return times, out_ce[:m], out_norm[:m], cg
