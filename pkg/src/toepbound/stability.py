"""Propagated-error simulation for the linear recursion u_n = B u_{n-1} + b_n.

A perturbation v_0 of the starting vector propagates as v_n = B^n v_0
independently of the forcing terms b_n, so |v_n| <= ||B^n|| |v_0| and the
whole error history is controlled by the power bound M(B).  run_scheme
integrates the recursion twice (perturbed and unperturbed, identical
forcing), recomputes the error trajectory the direct way as B^n v_0, and
certifies the envelope |v_n| <= M_hat * |v_0| with M_hat from
analysis.power_bound.

Reproducible forcing uses a fixed 64-bit linear congruential generator
(multiplier 6364136223846793005, increment 1442695040888963407, modulus
2^64); each draw maps the state to a double in [0, 1) as (state >> 11) /
2^53, and vector entries are 2u - 1 + i(2u' - 1) from consecutive draws.
The stream depends only on the seed, so runs agree across platforms and
thread counts.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .analysis import power_bound
from .symbols import TruncatedOperator

__all__ = [
    "OVERFLOW_LIMIT",
    "ForcingKind",
    "Forcing",
    "SchemeRun",
    "ErrorTrajectory",
    "run_scheme",
    "trajectory_csv_rows",
]

log = logging.getLogger("toepbound.stability")

#: any iterate norm beyond this declares the scheme unstable and stops the run
OVERFLOW_LIMIT = 1e12

_LCG_MULT = 6364136223846793005
_LCG_INC = 1442695040888963407
_LCG_MASK = (1 << 64) - 1


class ForcingKind(str, Enum):
    ZERO = "zero"
    SEQUENCE = "sequence"
    GENERATOR = "generator"


@dataclass(frozen=True)
class Forcing:
    """Forcing term source for the recursion (see module docstring).

    zero: b_n = 0.  sequence: b_n taken from a stored list.  generator:
    b_n drawn from the documented seeded LCG stream.
    """

    kind: ForcingKind
    vectors: Tuple[tuple, ...] = ()
    seed: int = 0

    @classmethod
    def zero(cls) -> "Forcing":
        return cls(ForcingKind.ZERO)

    @classmethod
    def sequence(cls, vectors: Sequence[Sequence[complex]]) -> "Forcing":
        return cls(ForcingKind.SEQUENCE,
                   tuple(tuple(complex(x) for x in v) for v in vectors))

    @classmethod
    def generator(cls, seed: int = 0) -> "Forcing":
        return cls(ForcingKind.GENERATOR, seed=int(seed))

    def materialize(self, steps: int, dim: int) -> List[np.ndarray]:
        """The concrete b_1..b_steps as arrays of length dim."""
        if self.kind is ForcingKind.ZERO:
            return [np.zeros(dim, dtype=np.complex128) for _ in range(steps)]
        if self.kind is ForcingKind.SEQUENCE:
            if len(self.vectors) < steps:
                raise ValueError(f"forcing sequence has {len(self.vectors)} vectors, "
                                 f"run needs {steps}")
            out = []
            for v in self.vectors[:steps]:
                if len(v) != dim:
                    raise ValueError(f"forcing vector length {len(v)} != dim {dim}")
                out.append(np.asarray(v, dtype=np.complex128))
            return out
        state = self.seed & _LCG_MASK
        def draw() -> float:
            nonlocal state
            state = (_LCG_MULT * state + _LCG_INC) & _LCG_MASK
            return (state >> 11) / float(1 << 53)
        out = []
        for _ in range(steps):
            b = np.empty(dim, dtype=np.complex128)
            for j in range(dim):
                b[j] = complex(2.0 * draw() - 1.0, 2.0 * draw() - 1.0)
            out.append(b)
        return out


def _as_operator(b: Union[TruncatedOperator, np.ndarray]) -> TruncatedOperator:
    if isinstance(b, TruncatedOperator):
        return b
    return TruncatedOperator(np.asarray(b, dtype=np.complex128), {"kind": "custom-matrix"})


@dataclass
class SchemeRun:
    """One recursion run: iteration matrix, forcing, start, perturbation, length."""

    matrix: TruncatedOperator
    forcing: Forcing = field(default_factory=Forcing.zero)
    u0: Optional[np.ndarray] = None
    v0: Optional[np.ndarray] = None
    steps: int = 1

    def __post_init__(self):
        self.matrix = _as_operator(self.matrix)
        dim = self.matrix.dim
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        self.u0 = (np.zeros(dim, dtype=np.complex128) if self.u0 is None
                   else np.asarray(self.u0, dtype=np.complex128))
        if self.v0 is None:
            raise ValueError("a perturbation vector v0 is required")
        self.v0 = np.asarray(self.v0, dtype=np.complex128)
        for name, vec in (("u0", self.u0), ("v0", self.v0)):
            if vec.shape != (dim,):
                raise ValueError(f"{name} has shape {vec.shape}, expected ({dim},)")


@dataclass
class ErrorTrajectory:
    """Propagated-error history |v_n| with its certified envelope.

    norms[n] = |v_n| for n = 0..steps (shorter when an overflow stopped
    the run early).  bound_envelope = M_hat * |v_0|.  verdict is "Pass"
    when the envelope and the two-way consistency both hold, "Unstable"
    after an overflow stop, "Fail" otherwise.
    """

    norms: List[float]
    bound_envelope: float
    verdict: str
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"norms": list(self.norms),
                "bound_envelope": self.bound_envelope,
                "verdict": self.verdict,
                "diagnostics": self.diagnostics}


def run_scheme(r: SchemeRun, envelope_tol: float = 1e-6,
               two_way_tol: float = 1e-10,
               norm_tol: float = 1e-10, seed: int = 0
               ) -> Tuple[List[np.ndarray], ErrorTrajectory]:
    """Integrate the recursion and certify the propagated-error envelope.

    Returns (u-trajectory, ErrorTrajectory).  The u-trajectory holds
    u_0..u_K.  The error is computed two ways, as the difference of the
    perturbed and unperturbed runs and directly as B^n v_0; the two must
    agree to two_way_tol * max(1, |v_0|) at every step.  Any iterate norm
    above OVERFLOW_LIMIT stops the run and declares it unstable.
    """
    b = r.matrix.data
    dim = r.matrix.dim
    forcing = r.forcing.materialize(r.steps, dim)

    u = r.u0.copy()
    u_tilde = r.u0 + r.v0
    w = r.v0.copy()  # direct propagation B^n v0
    u_traj = [u.copy()]
    norms = [float(np.linalg.norm(r.v0))]
    two_way_dev = 0.0
    unstable_at: Optional[int] = None

    for n in range(1, r.steps + 1):
        u = b @ u + forcing[n - 1]
        u_tilde = b @ u_tilde + forcing[n - 1]
        w = b @ w
        v = u_tilde - u
        u_traj.append(u.copy())
        vn = float(np.linalg.norm(v))
        norms.append(vn)
        two_way_dev = max(two_way_dev, float(np.linalg.norm(v - w)))
        if vn > OVERFLOW_LIMIT or float(np.linalg.norm(u)) > OVERFLOW_LIMIT:
            unstable_at = n
            log.info("overflow at step %d, declaring the scheme unstable", n)
            break

    m_rep = power_bound(r.matrix, n_max=r.steps, tol=norm_tol, seed=seed)
    v0_norm = norms[0]
    envelope = m_rep.value * v0_norm
    scale = max(1.0, v0_norm)
    envelope_ok = all(vn <= envelope * (1.0 + envelope_tol) + norm_tol * scale
                      for vn in norms)
    two_way_ok = two_way_dev <= two_way_tol * scale

    if unstable_at is not None:
        verdict = "Unstable"
    elif envelope_ok and two_way_ok:
        verdict = "Pass"
    else:
        verdict = "Fail"

    traj = ErrorTrajectory(
        norms=norms, bound_envelope=envelope, verdict=verdict,
        diagnostics={
            "power_bound": m_rep.value,
            "power_bound_argmax_n": m_rep.diagnostics.get("argmax_n"),
            "two_way_deviation": two_way_dev,
            "two_way_tol": two_way_tol,
            "envelope_tol": envelope_tol,
            "envelope_ok": envelope_ok,
            "two_way_ok": two_way_ok,
            "unstable_at": unstable_at,
            "forcing": r.forcing.kind.value,
            "steps_run": len(norms) - 1,
        })
    return u_traj, traj


def trajectory_csv_rows(u_traj: Sequence[np.ndarray], err: ErrorTrajectory) -> List[tuple]:
    """Rows (n, |u_n|, |v_n|, envelope) matching the trajectory CSV layout."""
    rows = []
    for n, vn in enumerate(err.norms):
        un = float(np.linalg.norm(u_traj[n])) if n < len(u_traj) else math.nan
        rows.append((n, un, vn, err.bound_envelope))
    return rows
