"""Two independent construction routes for conjugated Toeplitz sections.

Route one ("finite-section") compresses each Toeplitz factor to N x N and
multiplies the compressions.  Route two ("closed-form") evaluates rank-one
corrected formulas for the same operators: powers of the conjugated shift
are a shifted identity plus beta * k_{-conj(beta)} e_{n-1}^*, and the
resolvent is an explicit triangular Toeplitz matrix plus a rank-one term.
The two routes agree except in a trailing boundary block, and the tests
pin down exactly where and how fast that block vanishes.

Power and resolvent indices are passed as plain validated scalars
(n: int >= 0, lam: complex with |lam| > 1) rather than wrapper objects.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from .symbols import (
    Family,
    FamilyParams,
    LaurentSymbol,
    TruncatedOperator,
    analytic_toeplitz_inverse,
    kernel_vector,
    toeplitz_matrix,
)

__all__ = [
    "MODE_FINITE_SECTION",
    "MODE_CLOSED_FORM",
    "default_truncation_dim",
    "build_operator",
    "power_closed_form",
    "commutator",
    "resolvent_closed_form",
    "resolvent_finite_section",
    "similarity_resolvent_identity_check",
    "pair_with_kernel",
]

MODE_FINITE_SECTION = "finite-section"
MODE_CLOSED_FORM = "closed-form"
_MODES = (MODE_FINITE_SECTION, MODE_CLOSED_FORM, "auto")


def default_truncation_dim(beta: complex, n_max: int = 64, tail: float = 1e-12) -> int:
    """Smallest N with |beta|^N < tail and N >= 4*(n_max + 1)."""
    floor = 4 * (n_max + 1)
    b = abs(beta)
    if not 0 < b < 1:
        return floor
    n_tail = int(math.ceil(math.log(tail) / math.log(b))) + 1
    return max(floor, n_tail)


def _rank_one_correction(beta: complex, dim: int, col: int, scale: complex) -> np.ndarray:
    """scale * k_{-conj(beta)} placed as column ``col`` of an N x N array."""
    a = np.zeros((dim, dim), dtype=np.complex128)
    a[:, col] = scale * kernel_vector(-np.conj(beta), dim).coeffs
    return a


def build_operator(p: FamilyParams, dim: int, mode: str = "auto") -> TruncatedOperator:
    """N x N section of T_{1/g} T_f T_g by either construction route.

    mode "finite-section" multiplies the three compressed factors; mode
    "closed-form" uses the rank-one formulas (named families only).
    "auto" picks closed-form for the named families, finite-section for
    custom symbols.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {_MODES}")
    if dim < 1:
        raise ValueError("dim must be positive")
    if mode == "auto":
        mode = MODE_FINITE_SECTION if p.family is Family.CUSTOM else MODE_CLOSED_FORM

    prov = {"kind": "conjugated", "mode": mode, "dim": dim,
            "family": p.family.value, "beta": [p.beta.real, p.beta.imag]}

    if mode == MODE_CLOSED_FORM:
        if p.family is Family.CONJ_SHIFT:
            a = np.eye(dim, k=1, dtype=np.complex128)
            a += _rank_one_correction(p.beta, dim, 0, p.beta)
        elif p.family is Family.REAL_PART:
            a = toeplitz_matrix(p.symbol(), dim).data.copy()
            a += _rank_one_correction(p.beta, dim, 0, p.beta / 2)
        else:
            raise ValueError("closed-form mode is only available for the named families")
        return TruncatedOperator(a, prov)

    f, g = p.symbol(), p.conjugator()
    inv = analytic_toeplitz_inverse(g, dim).data
    a = inv @ toeplitz_matrix(f, dim).data @ toeplitz_matrix(g, dim).data
    prov["f"] = f.to_dict()
    prov["g"] = g.to_dict()
    return TruncatedOperator(a, prov)


def power_closed_form(p: FamilyParams, n: int, dim: int) -> TruncatedOperator:
    """Exact n-th power of the conjugated backward shift on the N-section.

    The formula (shift adjoint)^n + beta * k_{-conj(beta)} e_{n-1}^* holds
    in infinite dimensions; its compression is exact because the rank-one
    column only reads coordinate n-1 < N.
    """
    if p.family is not Family.CONJ_SHIFT:
        raise ValueError("closed-form powers are specific to the conjugated shift family")
    if n < 1:
        raise ValueError("power index must be >= 1 (n = 0 is the identity)")
    if n >= dim:
        raise ValueError(f"truncation too small: need n < dim, got n={n}, dim={dim}")
    a = np.eye(dim, k=n, dtype=np.complex128)
    a += _rank_one_correction(p.beta, dim, n - 1, p.beta)
    prov = {"kind": "power-closed-form", "family": p.family.value,
            "beta": [p.beta.real, p.beta.imag], "n": n, "dim": dim}
    return TruncatedOperator(a, prov)


def commutator(x: TruncatedOperator, y: TruncatedOperator) -> TruncatedOperator:
    """[X, Y] = XY - YX."""
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")
    return TruncatedOperator(x.data @ y.data - y.data @ x.data, {"kind": "commutator"})


def resolvent_closed_form(p: FamilyParams, lam: complex, dim: int) -> TruncatedOperator:
    """N-section of the conjugated shift's resolvent from the explicit formula.

    The Toeplitz part has entry (m, n) = lam^{-(n-m+1)} for n >= m (the
    geometric resolvent series of the backward shift); the correction is
    (beta/lam^2) k_{-conj(beta)} k_{1/lam}^*.  This is the compression of
    the infinite-dimensional resolvent, not the inverse of the compressed
    operator; the residual lives in the trailing rows and decays like
    max(|beta|, 1/|lam|)^N.
    """
    if p.family is not Family.CONJ_SHIFT:
        raise ValueError("closed-form resolvent is specific to the conjugated shift family")
    lam = complex(lam)
    if not abs(lam) > 1:
        raise ValueError(f"resolvent domain is |lam| > 1, got |lam| = {abs(lam)}")
    if dim < 1:
        raise ValueError("dim must be positive")
    pows = lam ** -np.arange(1, dim + 1, dtype=np.float64)
    col = np.zeros(dim, dtype=np.complex128)
    col[0] = pows[0]
    t = scipy.linalg.toeplitz(col, pows)
    k = kernel_vector(-np.conj(p.beta), dim).coeffs
    u = kernel_vector(1.0 / lam, dim).coeffs
    r = t + (p.beta / lam**2) * np.outer(k, np.conj(u))
    prov = {"kind": "resolvent-closed-form", "family": p.family.value,
            "beta": [p.beta.real, p.beta.imag], "lam": [lam.real, lam.imag], "dim": dim}
    return TruncatedOperator(r, prov)


def resolvent_finite_section(a: TruncatedOperator, lam: complex) -> TruncatedOperator:
    """(lam I - A_N)^{-1} by dense LU solve.

    A one-norm condition estimate is recorded in provenance; when it
    exceeds 1e8 (|lam| near 1) one step of iterative refinement is applied.
    """
    lam = complex(lam)
    if not abs(lam) > 1:
        raise ValueError(f"resolvent domain is |lam| > 1, got |lam| = {abs(lam)}")
    n = a.dim
    m = lam * np.eye(n, dtype=np.complex128) - a.data
    anorm = np.linalg.norm(m, 1)
    lu, piv = scipy.linalg.lu_factor(m)
    rcond = scipy.linalg.lapack.zgecon(lu, anorm)[0]
    if rcond == 0.0 or not np.isfinite(rcond):
        raise np.linalg.LinAlgError(
            f"resolvent solve failed: (lam I - A) numerically singular (rcond={rcond})")
    eye = np.eye(n, dtype=np.complex128)
    x = scipy.linalg.lu_solve((lu, piv), eye)
    cond = 1.0 / rcond
    if cond > 1e8:
        x += scipy.linalg.lu_solve((lu, piv), eye - m @ x)
    prov = {"kind": "resolvent-finite-section", "lam": [lam.real, lam.imag],
            "dim": n, "condition_estimate": cond}
    return TruncatedOperator(x, prov)


def similarity_resolvent_identity_check(b: TruncatedOperator, s: TruncatedOperator,
                                        lam: complex, variant: str = "proof") -> float:
    """Residual of (lam I - S^{-1}BS)^{-1} = R_B + S^{-1}[R_B, S].

    variant "proof" takes R_B = (lam I - B)^{-1} inside the commutator (an
    exact algebraic identity, residual at rounding level).  variant
    "statement" substitutes (lam I - S)^{-1} in the commutator instead;
    it is reported for comparison and is not an identity, so its residual
    is generally O(1).  Requires lam outside the relevant spectra.
    """
    if b.dim != s.dim:
        raise ValueError(f"dimension mismatch: {b.dim} vs {s.dim}")
    if variant not in ("proof", "statement"):
        raise ValueError(f"variant must be 'proof' or 'statement', got {variant!r}")
    lam = complex(lam)
    n = b.dim
    eye = np.eye(n, dtype=np.complex128)
    s_inv = np.linalg.solve(s.data, eye)
    conj = s_inv @ b.data @ s.data
    lhs = np.linalg.solve(lam * eye - conj, eye)
    r_b = np.linalg.solve(lam * eye - b.data, eye)
    inner = r_b if variant == "proof" else np.linalg.solve(lam * eye - s.data, eye)
    rhs = r_b + s_inv @ (inner @ s.data - s.data @ inner)
    return float(np.linalg.norm(lhs - rhs, 2))


def pair_with_kernel(m: TruncatedOperator, x: np.ndarray, omega: complex) -> complex:
    """<M x, normalized kernel at omega> on the N-section."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (m.dim,):
        raise ValueError(f"vector shape {x.shape} does not match dim {m.dim}")
    k = kernel_vector(omega, m.dim)
    return complex(np.vdot(k.normalized(), m.data @ x))
