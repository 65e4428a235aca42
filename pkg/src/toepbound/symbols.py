"""Laurent symbols, Toeplitz truncations, and reproducing-kernel vectors.

Everything in this module is finite dimensional: operators act on
span{e_0, ..., e_{N-1}}, the first N Taylor coefficients of the analytic
function space on the disk.  Matrix entry conventions follow the classical
Toeplitz law: entry (m, n) of the truncation of T_f is the Fourier
coefficient of f at index m - n.

Values are treated as immutable after construction and are safe to share
across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional

import numpy as np
import scipy.linalg

__all__ = [
    "LaurentSymbol",
    "Family",
    "FamilyParams",
    "KernelVector",
    "TruncatedOperator",
    "toeplitz_matrix",
    "kernel_vector",
    "analytic_toeplitz_inverse",
    "apply_adjoint_kernel_check",
]


@dataclass(frozen=True)
class LaurentSymbol:
    """A finitely supported symbol f(z) = sum_k c_k z^k on the unit circle.

    Negative indices form the conjugate-analytic part (z^-1 means conj(z)
    on |z| = 1).  Exact-zero coefficients are dropped on construction, so
    the stored support is canonical: indices outside it are exactly zero.
    """

    coeffs: Mapping[int, complex]

    def __post_init__(self):
        cleaned = {}
        for k, v in self.coeffs.items():
            v = complex(v)
            if v != 0:
                cleaned[int(k)] = v
        object.__setattr__(self, "coeffs", cleaned)

    def __getitem__(self, k: int) -> complex:
        return self.coeffs.get(int(k), 0j)

    @property
    def min_index(self) -> int:
        return min(self.coeffs) if self.coeffs else 0

    @property
    def max_index(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    def is_analytic(self) -> bool:
        return self.min_index >= 0

    def sup_norm_bound(self) -> float:
        """sum_k |c_k|, an upper bound for sup of |f| on the circle."""
        return float(sum(abs(c) for c in self.coeffs.values()))

    def __call__(self, z: complex) -> complex:
        if z == 0 and self.min_index < 0:
            raise ZeroDivisionError("symbol has negative indices, z = 0 is outside its domain")
        return sum(c * complex(z) ** k for k, c in self.coeffs.items())

    def to_dict(self) -> dict:
        return {"coeffs": {str(k): [v.real, v.imag] for k, v in sorted(self.coeffs.items())}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "LaurentSymbol":
        return cls({int(k): complex(v[0], v[1]) for k, v in d["coeffs"].items()})

    @classmethod
    def from_json(cls, text: str) -> "LaurentSymbol":
        return cls.from_dict(json.loads(text))

    @classmethod
    def parse(cls, text: str) -> "LaurentSymbol":
        """Parse the CLI grammar ``k:re,im;k:re,im`` (e.g. ``-1:0.5,0;1:0.5,0``)."""
        coeffs: dict[int, complex] = {}
        for term in text.split(";"):
            term = term.strip()
            if not term:
                continue
            try:
                head, tail = term.split(":")
                re_s, im_s = tail.split(",")
                k = int(head)
                coeffs[k] = coeffs.get(k, 0j) + complex(float(re_s), float(im_s))
            except (ValueError, TypeError) as exc:
                raise ValueError(f"bad symbol term {term!r}; expected k:re,im") from exc
        return cls(coeffs)


class Family(str, Enum):
    """Named operator families: a symbol f conjugated by g(z) = 1 + beta*z."""

    CONJ_SHIFT = "conj-shift"  # f = conj(z), the backward shift
    REAL_PART = "real-part"    # f = (z + conj(z))/2
    CUSTOM = "custom"          # caller-supplied f and analytic g


@dataclass(frozen=True)
class FamilyParams:
    """Parameters selecting one member of an operator family.

    For the named families the conjugator is g(z) = 1 + beta*z with
    0 < |beta| < 1.  For ``Family.CUSTOM`` both symbols must be supplied
    and g must be analytic with g(0) != 0.
    """

    family: Family
    beta: complex = 0j
    f: Optional[LaurentSymbol] = None
    g: Optional[LaurentSymbol] = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "beta", complex(self.beta))
        if self.family is Family.CUSTOM:
            if self.f is None or self.g is None:
                raise ValueError("custom family requires explicit f and g symbols")
            if not self.g.is_analytic():
                raise ValueError("conjugator g must be analytic (no negative indices)")
            if self.g[0] == 0:
                raise ValueError("conjugator g must satisfy g(0) != 0")
        else:
            if not 0 < abs(self.beta) < 1:
                raise ValueError(f"require 0 < |beta| < 1, got |beta| = {abs(self.beta)}")

    def symbol(self) -> LaurentSymbol:
        """The symbol f being conjugated."""
        if self.family is Family.CONJ_SHIFT:
            return LaurentSymbol({-1: 1.0})
        if self.family is Family.REAL_PART:
            return LaurentSymbol({-1: 0.5, 1: 0.5})
        return self.f  # type: ignore[return-value]

    def conjugator(self) -> LaurentSymbol:
        """The analytic conjugator g."""
        if self.family is Family.CUSTOM:
            return self.g  # type: ignore[return-value]
        return LaurentSymbol({0: 1.0, 1: self.beta})

    def to_dict(self) -> dict:
        d: dict = {"family": self.family.value, "beta": [self.beta.real, self.beta.imag]}
        if self.family is Family.CUSTOM:
            d["f"] = self.f.to_dict()
            d["g"] = self.g.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FamilyParams":
        fam = Family(d["family"])
        beta = complex(*d.get("beta", [0.0, 0.0]))
        if fam is Family.CUSTOM:
            return cls(fam, beta, LaurentSymbol.from_dict(d["f"]), LaurentSymbol.from_dict(d["g"]))
        return cls(fam, beta)


@dataclass(frozen=True)
class KernelVector:
    """Truncated reproducing-kernel vector for a point |omega| < 1.

    Coefficients are conj(omega)^n for n < dim; pairing a Taylor vector h
    against the full kernel evaluates h at omega.
    """

    omega: complex
    dim: int
    coeffs: np.ndarray = field(repr=False)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def normalized(self) -> np.ndarray:
        return self.coeffs / self.norm

    def tail_bound(self) -> float:
        """Squared-norm mass of the discarded tail, |omega|^(2 dim)/(1-|omega|^2)."""
        r2 = abs(self.omega) ** 2
        return r2**self.dim / (1.0 - r2)


def kernel_vector(omega: complex, dim: int) -> KernelVector:
    omega = complex(omega)
    if not abs(omega) < 1:
        raise ValueError(f"kernel point must satisfy |omega| < 1, got |omega| = {abs(omega)}")
    if dim < 1:
        raise ValueError("dim must be positive")
    coeffs = np.conj(omega) ** np.arange(dim, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    coeffs.flags.writeable = False
    return KernelVector(omega, dim, coeffs)


@dataclass(frozen=True)
class TruncatedOperator:
    """A dense N x N section of an operator, with provenance metadata.

    ``data`` is complex128 and marked read-only; ``provenance`` records how
    the matrix was produced (family, mode, symbols, ...) and is what lets
    downstream routines pick structured fast paths.
    """

    data: np.ndarray = field(repr=False)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        a = np.array(self.data, dtype=np.complex128, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"operator data must be square, got shape {a.shape}")
        a.flags.writeable = False
        object.__setattr__(self, "data", a)
        object.__setattr__(self, "provenance", dict(self.provenance))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "TruncatedOperator":
        return cls(np.eye(dim, dtype=np.complex128), {"kind": "identity"})

    def to_dict(self) -> dict:
        flat = self.data.ravel()
        return {
            "dim": self.dim,
            "provenance": self.provenance,
            "data": [[z.real, z.imag] for z in flat],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "TruncatedOperator":
        n = int(d["dim"])
        raw = np.asarray(d["data"], dtype=np.float64)
        if raw.shape != (n * n, 2):
            raise ValueError(f"data must hold {n * n} [re, im] pairs, got shape {raw.shape}")
        data = (raw[:, 0] + 1j * raw[:, 1]).reshape(n, n)
        return cls(data, d.get("provenance", {}))

    @classmethod
    def from_json(cls, text: str) -> "TruncatedOperator":
        return cls.from_dict(json.loads(text))


def toeplitz_matrix(f: LaurentSymbol, dim: int) -> TruncatedOperator:
    """Dense N x N Toeplitz section of T_f: entry (m, n) = f-hat(m - n)."""
    if dim < 1:
        raise ValueError("dim must be positive")
    a = np.zeros((dim, dim), dtype=np.complex128)
    for k, c in f.coeffs.items():
        if -dim < k < dim:
            n = np.arange(max(0, -k), dim - max(0, k))
            a[n + k, n] = c
    return TruncatedOperator(a, {"kind": "toeplitz", "symbol": f.to_dict()})


def _inverse_series(g: LaurentSymbol, count: int) -> np.ndarray:
    """First ``count`` Taylor coefficients of 1/g for analytic g, g(0) != 0."""
    if not g.is_analytic():
        raise ValueError("inverse series requires an analytic symbol")
    g0 = g[0]
    if g0 == 0:
        raise ValueError("singular symbol: g(0) = 0 has no analytic inverse")
    deg = g.max_index
    if deg == 1 and abs(g[1] / g0) >= 1:
        raise ValueError("degree-one conjugator needs |g_1/g_0| < 1 for a disk-algebra inverse")
    d = np.zeros(count, dtype=np.complex128)
    d[0] = 1.0 / g0
    terms = [(k, g[k]) for k in range(1, deg + 1) if g[k] != 0]
    for n in range(1, count):
        acc = 0j
        for k, gk in terms:
            if k <= n:
                acc += gk * d[n - k]
        d[n] = -acc / g0
    return d


def analytic_toeplitz_inverse(g: LaurentSymbol, dim: int) -> TruncatedOperator:
    """Exact inverse of the lower-triangular section of T_g for analytic g.

    Because triangular Toeplitz sections multiply like truncated power
    series, the section of T_{1/g} inverts the section of T_g exactly (no
    finite-section boundary error); entries come from the Taylor series of
    1/g.  For g = 1 + beta*z the entries are (-beta)^(m-n).
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    d = _inverse_series(g, dim)
    a = scipy.linalg.toeplitz(d, np.zeros(dim, dtype=np.complex128))
    return TruncatedOperator(a, {"kind": "toeplitz-inverse", "symbol": g.to_dict()})


def apply_adjoint_kernel_check(g: LaurentSymbol, omega: complex, dim: int) -> float:
    """Residual of the adjoint eigenvector identity on the truncation.

    For analytic g the adjoint of T_g sends the kernel vector of omega to
    conj(g(omega)) times itself.  On an N-section only the last deg(g) rows
    see the missing tail, so the residual decays like |omega|^(N - deg g).
    """
    if not g.is_analytic():
        raise ValueError("adjoint kernel identity requires an analytic symbol")
    k = kernel_vector(omega, dim)
    t = toeplitz_matrix(g, dim).data
    lhs = t.conj().T @ k.coeffs
    rhs = np.conj(g(complex(omega))) * k.coeffs
    return float(np.linalg.norm(lhs - rhs))
