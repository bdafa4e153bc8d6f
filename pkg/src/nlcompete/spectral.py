"""Spectral bounds of dispersal-plus-potential operators.

The object of interest is the largest eigenvalue (spectral bound) of

    A = generator + diag(q)

for an assembled dispersal operator and a bounded potential q.  Its sign
drives persistence and stability questions everywhere else in the package.

Three routes are provided and cross-validated in the tests:

  dense     full symmetric eigendecomposition (LAPACK); for non-symmetric
            matrices the eigenvalue of largest real part is reported and a
            complex-spectrum flag is raised when it is not real.
  power     shifted power iteration, written out here; the shift norm(A)+1
            makes the target eigenvalue dominant in magnitude.
  rayleigh  Rayleigh-quotient maximization over a three-dimensional moving
            subspace (current iterate, residual, previous iterate).

The iterative routes require a symmetric matrix.  Dense solving is limited
to n <= 1000; beyond that only the power route is offered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigError, ConvergenceError
from .operators import DispersalOperator

DENSE_LIMIT = 1000
POWER_TOL = 1e-12
POWER_MAX_ITERS = 50_000
# Residual target for reported eigenvectors; the quotient-stagnation test
# alone can stop with a vector error near sqrt(POWER_TOL).
EIGVEC_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class SpectralReport:
    """Outcome of one spectral-bound computation.

    bound               largest eigenvalue (largest real part when complex)
    method              route that produced it
    eigvec              associated eigenvector, oriented so its largest
                        entry is positive; None when unavailable
    residual            sup-norm eigenpair residual, scaled by the vector
    has_positive_eigvec True when the eigenvector is strictly positive,
                        the discrete principal-eigenvalue situation
    complex_spectrum    True when a non-symmetric matrix put the largest
                        real part on a genuinely complex eigenvalue
    iterations          matrix applications spent (0 for dense)
    """

    bound: float
    method: str
    eigvec: np.ndarray | None
    residual: float
    has_positive_eigvec: bool
    complex_spectrum: bool = False
    iterations: int = 0


def _full_matrix(op: DispersalOperator, q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (op.grid.n,):
        raise ConfigError(f"potential length {q.shape} does not match grid n={op.grid.n}")
    if not np.all(np.isfinite(q)):
        raise ConfigError("potential contains non-finite entries")
    a = op.generator.copy()
    idx = np.arange(op.grid.n)
    a[idx, idx] += q
    return a


def _orient(vec: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(vec)))
    if vec[i] < 0:
        vec = -vec
    return vec


def _pair_residual(a: np.ndarray, lam: float, vec: np.ndarray) -> float:
    return float(np.max(np.abs(a @ vec - lam * vec)) / np.max(np.abs(vec)))


def _dense_bound(a: np.ndarray) -> SpectralReport:
    if a.shape[0] > DENSE_LIMIT:
        raise ConfigError(
            f"dense spectral solve limited to n <= {DENSE_LIMIT}, got {a.shape[0]}"
        )
    if np.array_equal(a, a.T):
        vals, vecs = scipy.linalg.eigh(a)
        vec = _orient(vecs[:, -1].copy())
        lam = float(vals[-1])
        return SpectralReport(
            bound=lam,
            method="dense",
            eigvec=vec,
            residual=_pair_residual(a, lam, vec),
            has_positive_eigvec=bool(np.all(vec > 0)),
        )
    vals, vecs = np.linalg.eig(a)
    i = int(np.argmax(vals.real))
    lam = vals[i]
    scale = np.max(np.abs(vals.real))
    is_complex = abs(lam.imag) > 1e-10 * max(1.0, scale)
    vec = vecs[:, i]
    if is_complex:
        return SpectralReport(
            bound=float(lam.real),
            method="dense",
            eigvec=None,
            residual=float("nan"),
            has_positive_eigvec=False,
            complex_spectrum=True,
        )
    vec = _orient(vec.real.copy())
    lam = float(lam.real)
    return SpectralReport(
        bound=lam,
        method="dense",
        eigvec=vec,
        residual=_pair_residual(a, lam, vec),
        has_positive_eigvec=bool(np.all(vec > 0)),
    )


def _power_bound(a: np.ndarray) -> SpectralReport:
    """Shifted power iteration.

    The shift s = norm(A, inf) + 1 moves every eigenvalue of the symmetric
    A into [1, 2 norm + 1], so the largest eigenvalue of A + sI is dominant
    in magnitude and the iteration cannot lock onto the bottom of the
    spectrum.  Stops when the Rayleigh quotient stagnates below POWER_TOL
    and the eigenpair residual is small; the quotient is a valid lower
    bound throughout, which the failure path reports.
    """
    n = a.shape[0]
    shift = float(np.max(np.sum(np.abs(a), axis=1))) + 1.0
    v = np.ones(n) / np.sqrt(n)
    q_prev = None
    for it in range(1, POWER_MAX_ITERS + 1):
        w = a @ v + shift * v
        q = float(v @ w)
        lam = q - shift
        res = float(np.max(np.abs(w - q * v)) / np.max(np.abs(v)))
        if (
            q_prev is not None
            and abs(q - q_prev) <= POWER_TOL * (1.0 + abs(q))
            and res <= EIGVEC_RESIDUAL_TOL
        ):
            vec = _orient(v.copy())
            return SpectralReport(
                bound=lam,
                method="power",
                eigvec=vec,
                residual=_pair_residual(a, lam, vec),
                has_positive_eigvec=bool(np.all(vec > 0)),
                iterations=it,
            )
        q_prev = q
        v = w / np.linalg.norm(w)
    raise ConvergenceError(
        f"power iteration did not converge in {POWER_MAX_ITERS} iterations; "
        f"last Rayleigh quotient {q_prev - shift:.6e} is a lower bound",
        lower_bound=q_prev - shift,
    )


def _rayleigh_bound(a: np.ndarray) -> SpectralReport:
    """Maximize the Rayleigh quotient over a moving 3-space.

    Each sweep solves the projected eigenproblem on span{x, residual,
    previous x} exactly, so the quotient is nondecreasing and the iterate
    inherits a Lanczos-like convergence rate without storing a basis.
    """
    n = a.shape[0]
    x = np.ones(n) / np.sqrt(n)
    x_prev = None
    max_sweeps = 5000
    for it in range(1, max_sweeps + 1):
        ax = a @ x
        lam = float(x @ ax)
        r = ax - lam * x
        if float(np.max(np.abs(r)) / np.max(np.abs(x))) <= EIGVEC_RESIDUAL_TOL:
            vec = _orient(x.copy())
            return SpectralReport(
                bound=lam,
                method="rayleigh",
                eigvec=vec,
                residual=_pair_residual(a, lam, vec),
                has_positive_eigvec=bool(np.all(vec > 0)),
                iterations=it,
            )
        cols = [x, r] if x_prev is None else [x, r, x_prev]
        basis, _ = np.linalg.qr(np.column_stack(cols))
        small = basis.T @ (a @ basis)
        small = 0.5 * (small + small.T)
        vals, vecs = scipy.linalg.eigh(small)
        x_new = basis @ vecs[:, -1]
        x_new /= np.linalg.norm(x_new)
        x_prev, x = x, x_new
    raise ConvergenceError(
        f"rayleigh maximization did not converge in {max_sweeps} sweeps; "
        f"last quotient {lam:.6e} is a lower bound",
        lower_bound=lam,
    )


def spectral_bound(
    op: DispersalOperator, q: np.ndarray, method: str = "auto"
) -> SpectralReport:
    """Largest eigenvalue of generator + diag(q).

    method: 'auto' (dense when n <= 1000, else power), 'dense', 'power',
    'rayleigh'.  The iterative methods insist on a symmetric matrix.
    """
    a = _full_matrix(op, q)
    if method == "auto":
        method = "dense" if a.shape[0] <= DENSE_LIMIT else "power"
    if method == "dense":
        return _dense_bound(a)
    if method not in ("power", "rayleigh"):
        raise ConfigError(f"unknown spectral method {method!r}")
    if not np.array_equal(a, a.T):
        raise ConfigError(f"method {method!r} requires a symmetric matrix")
    return _power_bound(a) if method == "power" else _rayleigh_bound(a)


def rayleigh_quotient(op: DispersalOperator, q: np.ndarray, phi: np.ndarray) -> float:
    """Quotient phi' A phi / phi' phi for A = generator + diag(q).

    For symmetric A this is a lower bound for the spectral bound at any
    nonzero phi, with equality on the top eigenvector.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (op.grid.n,):
        raise ConfigError(f"field length {phi.shape} does not match grid n={op.grid.n}")
    denom = float(phi @ phi)
    if denom == 0.0 or not np.isfinite(denom):
        raise ConfigError("rayleigh quotient needs a nonzero finite field")
    a = _full_matrix(op, q)
    return float(phi @ (a @ phi)) / denom
