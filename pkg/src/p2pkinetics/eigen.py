"""Eigenvalues of small dense real nonsymmetric matrices.

The route is the classical one: Householder reduction to upper Hessenberg
form, then shifted QR iteration performed in complex arithmetic with Givens
rotations.  Working over the complex field keeps the code to a single-shift
sweep (a real Francis double-shift is not needed) at the cost of complex
storage, which is irrelevant at the supported sizes (n <= 64).  Dimensions 1
and 2 short-circuit to the closed-form quadratic.

Deflation uses the standard negligibility test on subdiagonal entries,
``|h[i, i-1]| <= eps * (|h[i-1, i-1]| + |h[i, i]|)``.  Wilkinson shifts give
cubic convergence on typical input; an occasional exceptional shift breaks
the cyclic patterns (e.g. permutation matrices) the Wilkinson shift is blind
to.  A block that fails to deflate within the sweep budget raises
``EigenvalueError`` carrying the eigenvalues found so far.
"""

from __future__ import annotations

import numpy as np

_EPS = float(np.finfo(np.float64).eps)

MAX_DIMENSION = 64


class EigenvalueError(RuntimeError):
    """QR iteration failed to converge; ``partial`` holds deflated eigenvalues."""

    def __init__(self, message: str, partial: list[complex]):
        super().__init__(message)
        self.partial = partial


def _eig2(a, b, c, d) -> tuple[complex, complex]:
    """Roots of the characteristic quadratic of [[a, b], [c, d]]."""
    half = 0.5 * (a + d)
    det = a * d - b * c
    delta = np.sqrt(complex(half * half - det))
    # add the same-signed term first to avoid cancellation
    if (half.real * delta.real + half.imag * delta.imag) >= 0.0:
        r1 = half + delta
    else:
        r1 = half - delta
    r2 = det / r1 if r1 != 0.0 else half - delta
    return complex(r1), complex(r2)


def _eig2_real(a: float, b: float, c: float, d: float) -> tuple[complex, complex]:
    """Real 2x2 case: exact conjugates for a complex pair, stable real split."""
    half = 0.5 * (a + d)
    det = a * d - b * c
    disc = half * half - det
    if disc < 0.0:
        imag = np.sqrt(-disc)
        return complex(half, imag), complex(half, -imag)
    root = np.sqrt(disc)
    r1 = half + root if half >= 0.0 else half - root
    r2 = det / r1 if r1 != 0.0 else half - root
    return complex(r1), complex(r2)


def _hessenberg(A: np.ndarray) -> np.ndarray:
    """Householder similarity reduction to upper Hessenberg form (real)."""
    H = A.copy()
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1 :, k].copy()
        normx = float(np.linalg.norm(x))
        if normx == 0.0:
            continue
        alpha = -np.copysign(normx, x[0])
        v = x
        v[0] -= alpha
        vnorm = float(np.linalg.norm(v))
        if vnorm == 0.0:
            continue
        v /= vnorm
        H[k + 1 :, k:] -= 2.0 * np.outer(v, v @ H[k + 1 :, k:])
        H[:, k + 1 :] -= 2.0 * np.outer(H[:, k + 1 :] @ v, v)
        H[k + 2 :, k] = 0.0
    return H


def _givens(f: complex, g: complex) -> tuple[float, complex]:
    """Rotation [[c, s], [-conj(s), c]] (c real) zeroing g below f."""
    if g == 0.0:
        return 1.0, 0.0 + 0.0j
    if f == 0.0:
        return 0.0, np.conj(g) / abs(g)
    d = np.hypot(abs(f), abs(g))
    c = abs(f) / d
    s = (f / abs(f)) * (np.conj(g) / d)
    return float(c), complex(s)


def _qr_sweep(H: np.ndarray, lo: int, hi: int, shift: complex) -> None:
    """One explicit shifted QR step on the active window H[lo..hi, lo..hi]."""
    b = hi - lo + 1
    cs = np.empty(b - 1)
    sn = np.empty(b - 1, dtype=np.complex128)
    for i in range(lo, hi + 1):
        H[i, i] -= shift
    for k in range(lo, hi):
        c, s = _givens(H[k, k], H[k + 1, k])
        cs[k - lo] = c
        sn[k - lo] = s
        for col in range(k, hi + 1):
            top = H[k, col]
            bot = H[k + 1, col]
            H[k, col] = c * top + s * bot
            H[k + 1, col] = -np.conj(s) * top + c * bot
        H[k + 1, k] = 0.0
    for k in range(lo, hi):
        c = cs[k - lo]
        s = sn[k - lo]
        for row in range(lo, k + 2):
            left = H[row, k]
            right = H[row, k + 1]
            H[row, k] = c * left + np.conj(s) * right
            H[row, k + 1] = -s * left + c * right
    for i in range(lo, hi + 1):
        H[i, i] += shift


def eigvals(matrix, max_sweeps: int = 100) -> np.ndarray:
    """All eigenvalues of a real square matrix, sorted.

    Order is by real part descending, ties broken by imaginary part
    descending (so a conjugate pair appears +i first).

    Parameters
    ----------
    matrix : array-like, real, square, dimension <= 64
    max_sweeps : QR sweep budget per unreduced block before giving up

    Raises
    ------
    ValueError : non-square, too large, or non-finite input
    EigenvalueError : sweep budget exhausted (partial results attached)
    """
    A = np.asarray(matrix, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n > MAX_DIMENSION:
        raise ValueError(f"dimension {n} exceeds the supported {MAX_DIMENSION}")
    if n and not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")

    if n == 0:
        return np.empty(0, dtype=np.complex128)
    if n == 1:
        return np.array([complex(A[0, 0])])
    if n == 2:
        roots = _eig2_real(A[0, 0], A[0, 1], A[1, 0], A[1, 1])
        return _sorted(roots)

    H = _hessenberg(A).astype(np.complex128)
    hnorm = float(np.linalg.norm(H)) or 1.0

    def negligible(i: int) -> bool:
        tol = _EPS * (abs(H[i - 1, i - 1]) + abs(H[i, i]))
        if tol == 0.0:
            tol = _EPS * hnorm
        return abs(H[i, i - 1]) <= tol

    found: list[complex] = []
    hi = n - 1
    sweeps = 0
    while hi >= 0:
        if hi == 0:
            found.append(complex(H[0, 0]))
            break
        if negligible(hi):
            found.append(complex(H[hi, hi]))
            hi -= 1
            sweeps = 0
            continue
        lo = hi - 1
        while lo > 0 and not negligible(lo):
            lo -= 1
        if hi - lo == 1:
            found.extend(_eig2(H[lo, lo], H[lo, hi], H[hi, lo], H[hi, hi]))
            hi = lo - 1
            sweeps = 0
            continue
        sweeps += 1
        if sweeps > max_sweeps:
            raise EigenvalueError(
                f"QR iteration did not deflate block [{lo}, {hi}] within "
                f"{max_sweeps} sweeps",
                partial=found,
            )
        if sweeps % 15 == 0:
            shift = H[hi, hi] + 0.75 * abs(H[hi, hi - 1])
        else:
            r1, r2 = _eig2(
                H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi]
            )
            shift = r1 if abs(r1 - H[hi, hi]) <= abs(r2 - H[hi, hi]) else r2
        _qr_sweep(H, lo, hi, shift)
    return _sorted(found)


def _sorted(values) -> np.ndarray:
    ordered = sorted(values, key=lambda z: (-z.real, -z.imag))
    return np.asarray(ordered, dtype=np.complex128)
