"""Truncated photon-number basis: states, ladder operator and displacements.

Everything here works on dense complex arrays indexed by photon number
``n = 0 .. cutoff-1``. Vectors and operators are immutable wrappers; the
underlying arrays are flagged read-only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DimensionError, DomainError, PreconditionError

DEFAULT_CUTOFF = 64
MAX_CUTOFF = 256

NORM_TOL = 1e-12
PRECONDITION_TOL = 1e-9

# mantissa rescaling threshold for the Laguerre recurrence
_RESCALE = 1e150
_LOG_RESCALE = math.log(_RESCALE)


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class FockVector:
    """Complex amplitudes over the photon-number basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1 or amps.size == 0:
            raise DomainError(f"amplitudes must be a non-empty 1-d array, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.size

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_squared() - 1.0) <= tol

    def normalized(self) -> FockVector:
        norm2 = self.norm_squared()
        if norm2 == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return FockVector(self.amplitudes / math.sqrt(norm2))

    def tail_mass(self) -> float:
        """Fraction of the squared norm held by the top 10% of photon numbers.

        A large value means the cutoff is too small for this state.
        """
        norm2 = self.norm_squared()
        if norm2 == 0.0:
            return 0.0
        top = max(1, math.ceil(self.cutoff / 10))
        tail = self.amplitudes[-top:]
        return float(np.vdot(tail, tail).real) / norm2

    def mean_photon_number(self) -> float:
        probs = np.abs(self.amplitudes) ** 2
        return float(np.dot(np.arange(self.cutoff), probs) / probs.sum())

    def __len__(self):
        return self.cutoff


@dataclass(frozen=True, eq=False)
class ComplexOperator:
    """Dense square matrix over the truncated basis."""

    entries: np.ndarray

    def __post_init__(self):
        mat = _frozen(self.entries)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise DomainError(f"operator must be a non-empty square matrix, got shape {mat.shape}")
        object.__setattr__(self, "entries", mat)

    @property
    def cutoff(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> ComplexOperator:
        return ComplexOperator(self.entries.conj().T)

    def __matmul__(self, other):
        if isinstance(other, ComplexOperator):
            _check_dims(self.cutoff, other.cutoff)
            return ComplexOperator(self.entries @ other.entries)
        if isinstance(other, FockVector):
            return apply(self, other)
        return NotImplemented


def _check_dims(a: int, b: int):
    if a != b:
        raise DimensionError(f"cutoff mismatch: {a} != {b}")


def _check_cutoff(cutoff: int):
    if isinstance(cutoff, bool) or not isinstance(cutoff, (int, np.integer)) or cutoff < 1:
        raise DomainError(f"cutoff must be a positive integer, got {cutoff!r}")
    if cutoff > MAX_CUTOFF:
        raise DomainError(f"cutoff {cutoff} exceeds the supported maximum {MAX_CUTOFF}")


def _check_beta(beta) -> complex:
    beta = complex(beta)
    if not (math.isfinite(beta.real) and math.isfinite(beta.imag)):
        raise DomainError(f"displacement amplitude must be finite, got {beta!r}")
    return beta


def recommended_cutoff(beta: complex) -> int:
    """Cutoff large enough that a displacement by ``beta`` leaves negligible tail mass."""
    return min(MAX_CUTOFF, math.ceil(4 * (abs(beta) + 3) ** 2))


def basis_state(n: int, cutoff: int = DEFAULT_CUTOFF) -> FockVector:
    _check_cutoff(cutoff)
    if n < 0 or n >= cutoff:
        raise DomainError(f"photon number {n} outside 0..{cutoff - 1}")
    amps = np.zeros(cutoff, dtype=complex)
    amps[n] = 1.0
    return FockVector(amps)


def coherent_state(alpha: complex, cutoff: int = DEFAULT_CUTOFF) -> FockVector:
    """Coherent-state amplitudes exp(-|alpha|^2/2) alpha^n / sqrt(n!), built directly."""
    _check_cutoff(cutoff)
    alpha = _check_beta(alpha)
    n = np.arange(cutoff)
    if alpha == 0:
        return basis_state(0, cutoff)
    log_mag = n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1) - 0.5 * abs(alpha) ** 2
    return FockVector(np.exp(log_mag + 1j * n * np.angle(alpha)))


def annihilation_operator(cutoff: int = DEFAULT_CUTOFF) -> ComplexOperator:
    _check_cutoff(cutoff)
    if cutoff < 2:
        raise DomainError("annihilation operator needs cutoff >= 2")
    return ComplexOperator(np.diag(np.sqrt(np.arange(1, cutoff)), k=1))


def _laguerre_table(x: np.ndarray, cutoff: int):
    """Generalized Laguerre values L_n^(k)(x) for every k, n in 0..cutoff-1.

    Upward three-term recurrence in the lower index ``n``, vectorized over the
    batch of arguments and over ``k``. Returns ``(mantissa, log_scale)`` with
    ``L = mantissa * exp(log_scale)``, both indexed ``[n, b, k]``;
    ``log_scale`` is None when no rescaling was needed.
    """
    B = x.size
    k = np.arange(cutoff, dtype=float)[None, :]
    xb = x[:, None]
    mant = np.empty((cutoff, B, cutoff))
    logs = None
    prev = np.ones((B, cutoff))
    scale = np.zeros((B, cutoff))
    mant[0] = prev
    if cutoff == 1:
        return mant, logs
    cur = 1.0 + k - xb
    mant[1] = cur
    for n in range(1, cutoff - 1):
        nxt = ((2 * n + 1 + k - xb) * cur - (n + k) * prev) / (n + 1)
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if big.any():
            if logs is None:
                logs = np.zeros((cutoff, B, cutoff))
            cur = np.where(big, cur / _RESCALE, cur)
            prev = np.where(big, prev / _RESCALE, prev)
            scale = scale + big * _LOG_RESCALE
        if not np.all(np.isfinite(cur)):
            raise DomainError("Laguerre recurrence overflowed; reduce cutoff or |beta|")
        mant[n + 1] = cur
        if logs is not None:
            logs[n + 1] = scale
    return mant, logs


def _triangle(cutoff: int):
    k, n = np.nonzero(np.add.outer(np.arange(cutoff), np.arange(cutoff)) < cutoff)
    return k, n


def displacement_stack(betas, cutoff: int = DEFAULT_CUTOFF) -> np.ndarray:
    """Closed-form displacement matrices for a batch of amplitudes.

    Returns an array of shape ``(len(betas), cutoff, cutoff)`` with
    ``out[b, m, n] = <m|D(betas[b])|n>``. Matrix elements are exact (not the
    truncated-space exponential); magnitudes are assembled in log space so
    that sqrt(n!/m!) |beta|^(m-n) never overflows on its own.
    """
    _check_cutoff(cutoff)
    betas = np.atleast_1d(np.asarray(betas, dtype=complex))
    if betas.ndim != 1:
        raise DomainError("betas must be one-dimensional")
    if not np.all(np.isfinite(betas)):
        raise DomainError("displacement amplitudes must be finite")
    N = cutoff
    x = np.abs(betas) ** 2
    mant, logs = _laguerre_table(x, N)

    # (k, n) pairs with m = n + k inside the basis; arrays below are [pair, b]
    kk, nn = _triangle(N)
    log_ratio = 0.5 * (gammaln(nn + 1) - gammaln(nn + kk + 1))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        log_abs = np.log(np.abs(betas))
        log_pow = np.where(kk[:, None] == 0, 0.0, kk[:, None] * log_abs[None, :])
        expo = log_ratio[:, None] + log_pow - 0.5 * x[None, :]
        if logs is not None:
            expo = expo + logs[nn, :, kk]
        mag = mant[nn, :, kk] * np.exp(expo)
    if not np.all(np.isfinite(mag)):
        raise DomainError("displacement matrix element overflowed")

    rot = np.exp(1j * np.outer(np.arange(N), np.angle(betas)))[kk]
    vals = mag * rot
    out = np.zeros((N, N, betas.size), dtype=complex)
    out[nn + kk, nn] = vals
    off = kk > 0
    sign = np.where(kk[off] % 2 == 0, 1.0, -1.0)[:, None]
    out[nn[off], nn[off] + kk[off]] = sign * vals[off].conj()
    out = np.ascontiguousarray(out.transpose(2, 0, 1))
    return out


def displacement_closed_form(beta: complex, cutoff: int = DEFAULT_CUTOFF) -> ComplexOperator:
    """D(beta) from the associated-Laguerre closed form of its matrix elements."""
    beta = _check_beta(beta)
    return ComplexOperator(displacement_stack([beta], cutoff)[0])


def displacement_exponential(beta: complex, cutoff: int = DEFAULT_CUTOFF) -> ComplexOperator:
    """D(beta) as exp(beta a^dag - beta^* a) on the truncated space.

    The generator is anti-Hermitian, so it is diagonalized as ``i H`` with ``H``
    Hermitian and exponentiated through the eigenbasis. Accurate only where
    ``|beta|^2`` is well below the cutoff.
    """
    beta = _check_beta(beta)
    a = annihilation_operator(cutoff).entries
    generator = beta * a.conj().T - beta.conjugate() * a
    evals, evecs = np.linalg.eigh(-1j * generator)
    return ComplexOperator((evecs * np.exp(1j * evals)) @ evecs.conj().T)


def apply(op: ComplexOperator, v: FockVector) -> FockVector:
    _check_dims(op.cutoff, v.cutoff)
    return FockVector(op.entries @ v.amplitudes)


def inner_product(u: FockVector, v: FockVector) -> complex:
    """<u|v>, antilinear in the first argument."""
    _check_dims(u.cutoff, v.cutoff)
    return complex(np.vdot(u.amplitudes, v.amplitudes))


def field_expectation(v: FockVector) -> complex:
    """<v|a|v> for a normalized state."""
    norm2 = v.norm_squared()
    if abs(norm2 - 1.0) > PRECONDITION_TOL:
        raise PreconditionError(f"state is not normalized: squared norm {norm2!r}")
    c = v.amplitudes
    return complex(np.sum(np.conj(c[:-1]) * np.sqrt(np.arange(1, v.cutoff)) * c[1:]))
