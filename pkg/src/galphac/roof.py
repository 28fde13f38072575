"""Upper-bound estimates of convex-roof extensions.

Every pure-state decomposition of a rank-``r`` density matrix with ``m``
members is obtained from its eigen-ensemble through an ``m x r`` isometry
``U``::

    |v_j> = sum_k U[j, k] sqrt(lambda_k) |e_k>,   p_j = <v_j|v_j>

The search runs over isometries with random two-row rotations, which keep
``U^dagger U = 1`` exactly. Any ensemble it returns is a valid
decomposition, so the reported average is always an upper bound on the roof.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bipartitions import Bipartition
from .core import DensityMatrix, PureState, reduced_spectrum, spectral_decomposition
from .errors import InvalidArgumentError
from .measures import alpha_concurrence, check_alpha, galpha_c_value

log = logging.getLogger(__name__)

WEIGHT_TOL = 1e-14
STALL_WINDOW = 200


@dataclass(frozen=True)
class Ensemble:
    weights: np.ndarray
    members: tuple[PureState, ...]

    def density(self) -> np.ndarray:
        return sum(p * np.outer(s.amplitudes, s.amplitudes.conj()) for p, s in zip(self.weights, self.members))

    def average(self, fn: Callable[[PureState], float]) -> float:
        return math.fsum(p * fn(s) for p, s in zip(self.weights, self.members))

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class RoofMeasure:
    """Pure-state functional to extend: ``galphac`` or the bipartite ``calpha`` on one cut."""

    kind: str
    alpha: float
    cut: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.kind not in ("galphac", "calpha"):
            raise InvalidArgumentError(f"unsupported roof measure {self.kind!r}")
        check_alpha(self.alpha)
        if self.kind == "calpha" and not self.cut:
            raise InvalidArgumentError("calpha needs a cut")

    @classmethod
    def parse(cls, text: str) -> "RoofMeasure":
        """``galphac(alpha=0.5)`` or ``calpha(alpha=0.5,cut=0|12)``."""
        m = re.fullmatch(r"\s*(\w+)\s*(?:\((.*)\))?\s*", text)
        if not m:
            raise InvalidArgumentError(f"cannot parse measure {text!r}")
        kind, args = m.group(1), m.group(2) or ""
        kw = dict(a.split("=", 1) for a in args.split(",") if "=" in a)
        alpha = float(kw.get("alpha", 0.5))
        cut = None
        if "cut" in kw:
            cut = tuple(int(c) for c in kw["cut"].split("|")[0] if c.isdigit())
        return cls(kind, alpha, cut)

    def tag(self) -> str:
        if self.kind == "calpha":
            return f"calpha(alpha={self.alpha:g},cut={''.join(map(str, self.cut))})"
        return f"galphac(alpha={self.alpha:g})"

    def pure_function(self, n: int) -> Callable[[PureState], float]:
        if self.kind == "galphac":
            return lambda s: galpha_c_value(s.amplitudes, s.local_dims, self.alpha)
        part = Bipartition.of(self.cut, n)
        return lambda s: alpha_concurrence(reduced_spectrum(s, part), self.alpha)


@dataclass(frozen=True)
class RoofConfig:
    ensemble_size: Optional[int] = None
    restarts: int = 20
    max_iterations: int = 2000
    tolerance: float = 1e-8
    seed: int = 0
    spectral_start: bool = True

    def resolve_size(self, rank: int) -> int:
        m = self.ensemble_size
        if m is None:
            m = max(rank, min(2 * rank, rank * rank))
        if m < rank:
            raise InvalidArgumentError(f"ensemble size {m} is below the rank {rank}")
        return m


@dataclass(frozen=True)
class RoofResult:
    upper_bound: float
    best_ensemble: Ensemble
    iterations_used: int
    converged: bool
    measure: str = ""
    restart_values: tuple[float, ...] = ()
    trace: tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "upper_bound": self.upper_bound,
            "iterations_used": self.iterations_used,
            "converged": self.converged,
            "restart_values": list(self.restart_values),
            "best_ensemble": {
                "weights": [float(p) for p in self.best_ensemble.weights],
                "members": [
                    {
                        "local_dims": list(s.local_dims),
                        "amplitudes": [[float(a.real), float(a.imag)] for a in s.amplitudes],
                    }
                    for s in self.best_ensemble.members
                ],
            },
        }


def _spectral_arrays(spectral) -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
    lam = np.array([w for w, _ in spectral], dtype=float)
    vecs = np.stack([s.amplitudes for _, s in spectral], axis=1)
    return lam, vecs, spectral[0][1].local_dims


def _check_isometry(U: np.ndarray, r: int) -> np.ndarray:
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[1] != r or U.shape[0] < r:
        raise InvalidArgumentError(f"isometry must be m x {r} with m >= {r}, got shape {U.shape}")
    if np.max(np.abs(U.conj().T @ U - np.eye(r))) > 1e-10:
        raise InvalidArgumentError("columns of the isometry are not orthonormal")
    return U


def decompose_via_isometry(spectral, isometry) -> Ensemble:
    """Pure-state ensemble generated from an eigen-ensemble by ``isometry`` (m x r)."""
    lam, vecs, dims = _spectral_arrays(spectral)
    U = _check_isometry(isometry, lam.size)
    raw = (U * np.sqrt(lam)) @ vecs.T
    weights = np.einsum("ij,ij->i", raw.conj(), raw).real
    keep = weights > WEIGHT_TOL
    members = tuple(PureState.from_unnormalized(v, dims) for v in raw[keep])
    w = weights[keep]
    return Ensemble(w / w.sum(), members)


def haar_isometry(m: int, r: int, rng: np.random.Generator) -> np.ndarray:
    """First ``r`` columns of a Haar-random ``m x m`` unitary."""
    z = (rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))) / math.sqrt(2)
    q, R = np.linalg.qr(z)
    d = np.diagonal(R)
    return q * (d / np.abs(d))


class _Search:
    """Local search state for one restart; caches member values per row."""

    def __init__(self, lam, vecs, dims, fn, U):
        self.sqrt_lam = np.sqrt(lam)
        self.vecs_t = vecs.T
        self.dims = dims
        self.fn = fn
        self.U = U.copy()
        m = U.shape[0]
        self.w = np.zeros(m)
        self.g = np.zeros(m)
        for j in range(m):
            self.w[j], self.g[j] = self._row(self.U[j])

    def _row(self, row) -> tuple[float, float]:
        v = (row * self.sqrt_lam) @ self.vecs_t
        p = float(np.vdot(v, v).real)
        if p <= WEIGHT_TOL:
            return p, 0.0
        return p, float(self.fn(PureState(v / math.sqrt(p), self.dims)))

    def value(self) -> float:
        return math.fsum(self.w * self.g)

    def run(self, rng, max_iterations, tolerance, trace: Optional[list]) -> tuple[float, int, bool]:
        m = self.U.shape[0]
        best = self.value()
        anchor, stall = best, 0
        if trace is not None:
            trace.append(best)
        for it in range(1, max_iterations + 1):
            j, k = rng.choice(m, size=2, replace=False)
            amp = (math.pi / 4) * 0.95 ** ((it - 1) // 100)
            t = rng.uniform(-amp, amp)
            phase = np.exp(1j * rng.uniform(0, 2 * math.pi))
            c, s = math.cos(t), math.sin(t)
            rj = c * self.U[j] - s * phase * self.U[k]
            rk = s * np.conj(phase) * self.U[j] + c * self.U[k]
            wj, gj = self._row(rj)
            wk, gk = self._row(rk)
            new = best - self.w[j] * self.g[j] - self.w[k] * self.g[k] + wj * gj + wk * gk
            if new < best:
                self.U[j], self.U[k] = rj, rk
                self.w[j], self.g[j], self.w[k], self.g[k] = wj, gj, wk, gk
                # resum to avoid drift from the incremental update
                best = min(best, self.value())
            if best < anchor - tolerance:
                anchor, stall = best, 0
            else:
                stall += 1
            if trace is not None:
                trace.append(best)
            if stall >= STALL_WINDOW:
                return best, it, True
        return best, max_iterations, False


def estimate_convex_roof(
    rho: DensityMatrix,
    measure: RoofMeasure | str,
    cfg: RoofConfig = RoofConfig(),
    keep_trace: bool = False,
) -> RoofResult:
    """Smallest ensemble average of ``measure`` found over pure-state decompositions.

    Restart 0 starts from the eigen-ensemble itself (padded with zero rows)
    unless ``cfg.spectral_start`` is off; the remaining restarts start from
    Haar-random isometries. Restart ``i``
    draws from child ``i`` of ``SeedSequence(cfg.seed)``, so a run with more
    restarts extends, and can only improve on, a run with fewer.
    """
    if isinstance(measure, str):
        measure = RoofMeasure.parse(measure)
    if measure.kind == "galphac" and rho.n_parties < 3:
        raise InvalidArgumentError("GαC needs at least 3 parties")
    fn = measure.pure_function(rho.n_parties)
    spectral = spectral_decomposition(rho)
    r = len(spectral)
    m = cfg.resolve_size(r)
    if cfg.restarts < 1 or cfg.max_iterations < 0:
        raise InvalidArgumentError("restarts must be >= 1 and max_iterations >= 0")

    if r == 1:
        ens = Ensemble(np.array([1.0]), (spectral[0][1],))
        v = float(fn(spectral[0][1]))
        return RoofResult(v, ens, 0, True, measure.tag(), (v,), (v,) if keep_trace else ())

    lam, vecs, dims = _spectral_arrays(spectral)
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    best_val, best_U, best_iter, best_conv = math.inf, None, 0, False
    values, best_trace = [], ()
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        if i == 0 and cfg.spectral_start:
            U0 = np.zeros((m, r), dtype=np.complex128)
            U0[:r, :r] = np.eye(r)
        else:
            U0 = haar_isometry(m, r, rng)
        search = _Search(lam, vecs, dims, fn, U0)
        trace = [] if keep_trace else None
        val, used, conv = search.run(rng, cfg.max_iterations, cfg.tolerance, trace)
        values.append(val)
        log.debug("restart %d: %.3e after %d iterations (converged=%s)", i, val, used, conv)
        if val < best_val:
            best_val, best_U, best_iter, best_conv = val, search.U, used, conv
            best_trace = tuple(trace) if trace is not None else ()

    ens = decompose_via_isometry(spectral, best_U)
    upper = ens.average(fn)
    return RoofResult(upper, ens, best_iter, best_conv, measure.tag(), tuple(values), best_trace)
