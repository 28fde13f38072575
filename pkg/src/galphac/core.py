"""State containers, reduced spectra, partial traces and trace distance.

Basis ordering: ``|a1 a2 ... an>`` sits at flat index
``a1*d2*...*dn + a2*d3*...*dn + ... + an``, i.e. party 0 is the most
significant digit. This is also the ordering of amplitudes in state files.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence, Union

import numpy as np

from .bipartitions import Bipartition
from .errors import InvalidArgumentError, InvalidPartitionError, InvalidStateError

#: eigen/singular values below this are treated as exact zeros
ZERO_TOL = 1e-12
NORM_TOL = 1e-10


def _check_dims(local_dims: Iterable[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in local_dims)
    if not dims or any(d < 2 for d in dims):
        raise InvalidStateError(f"local dimensions must all be >= 2, got {dims}")
    return dims


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector on a tensor product of ``len(local_dims)`` parties."""

    amplitudes: np.ndarray
    local_dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = _check_dims(self.local_dims)
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != prod(dims):
            raise InvalidStateError(
                f"{amps.size} amplitudes do not match local dimensions {dims}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state is not normalized (norm = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "local_dims", dims)

    @classmethod
    def from_unnormalized(cls, vector, local_dims) -> "PureState":
        v = np.asarray(vector, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise InvalidStateError("cannot normalize the zero vector")
        return cls(v / norm, local_dims)

    @property
    def n_parties(self) -> int:
        return len(self.local_dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.local_dims)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.local_dims)

    def __repr__(self) -> str:
        return f"PureState(local_dims={self.local_dims}, nnz={np.count_nonzero(self.amplitudes)})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray
    local_dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = _check_dims(self.local_dims)
        rho = np.array(self.entries, dtype=np.complex128)
        D = prod(dims)
        if rho.shape != (D, D):
            raise InvalidStateError(f"density matrix shape {rho.shape} does not match dims {dims}")
        if np.max(np.abs(rho - rho.conj().T)) > NORM_TOL:
            raise InvalidStateError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > NORM_TOL:
            raise InvalidStateError(f"density matrix trace is {tr!r}, expected 1")
        lo = np.linalg.eigvalsh(rho)[0]
        if lo < -NORM_TOL:
            raise InvalidStateError(f"density matrix has negative eigenvalue {lo!r}")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)
        object.__setattr__(self, "local_dims", dims)

    @property
    def n_parties(self) -> int:
        return len(self.local_dims)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def rank(self, tol: float = ZERO_TOL) -> int:
        return int(np.sum(np.linalg.eigvalsh(self.entries) > tol))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues of a reduced state, sorted descending, clamped to ``[0, 1]``.

    Values below ``ZERO_TOL`` become exact zeros and the rest are rescaled to
    sum to 1, so product cuts yield exactly ``(1, 0, ...)``.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size == 0:
            raise InvalidArgumentError("empty spectrum")
        if v.min() < -1e-10 or v.max() > 1 + 1e-10:
            raise InvalidArgumentError(f"spectrum values outside [0, 1]: {v}")
        v = np.clip(v, 0.0, 1.0)
        v[v < ZERO_TOL] = 0.0
        if abs(v.sum() - 1.0) > 1e-9:
            raise InvalidArgumentError(f"spectrum sums to {v.sum()!r}, expected 1")
        # renormalize after clamping so a single surviving value is exactly 1
        v = -np.sort(-v / v.sum())
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def nonzero(self) -> np.ndarray:
        return self.values[self.values > 0]

    def __len__(self) -> int:
        return self.values.size

    def __iter__(self):
        return iter(self.values)


SpectrumLike = Union[Spectrum, Sequence[float], np.ndarray]


def as_spectrum(spec: SpectrumLike) -> Spectrum:
    return spec if isinstance(spec, Spectrum) else Spectrum(np.asarray(spec, dtype=float))


PartLike = Union[Bipartition, Iterable[int]]


def _side(part: PartLike, n: int) -> tuple[int, ...]:
    if isinstance(part, Bipartition):
        if part.n != n:
            raise InvalidPartitionError(f"bipartition of {part.n} parties applied to {n}-party state")
        return part.parties
    side = tuple(sorted(set(int(p) for p in part)))
    if not side or len(side) >= n or side[0] < 0 or side[-1] >= n:
        raise InvalidPartitionError(f"{side} is not a nonempty proper subset of range({n})")
    return side


def cut_matrix(state: PureState, part: PartLike) -> np.ndarray:
    """Amplitudes reshaped into a ``dim(S) x dim(S̄)`` matrix."""
    n = state.n_parties
    side = _side(part, n)
    rest = [p for p in range(n) if p not in side]
    dims = state.local_dims
    t = state.tensor()
    if list(side) != list(range(len(side))):
        t = np.transpose(t, list(side) + rest)
    return t.reshape(prod(dims[p] for p in side), -1)


def reduced_spectrum(state: PureState, part: PartLike) -> Spectrum:
    """Eigenvalues of the reduced state on side ``S`` of ``part``.

    Obtained as squared singular values of :func:`cut_matrix`; the result has
    ``min(dim S, dim S̄)`` entries with exact zeros kept.
    """
    s = np.linalg.svd(cut_matrix(state, part), compute_uv=False)
    lam = s * s
    lam[lam < ZERO_TOL] = 0.0
    return Spectrum(np.minimum(lam, 1.0))


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every party not in ``keep``; kept parties stay in original order."""
    n = rho.n_parties
    keep = sorted(set(int(k) for k in keep))
    if not keep or len(keep) >= n or keep[0] < 0 or keep[-1] >= n:
        raise InvalidArgumentError(f"keep must be a nonempty proper subset of range({n}), got {keep}")
    dims = rho.local_dims
    drop = [p for p in range(n) if p not in keep]
    t = rho.entries.reshape(dims + dims)
    t = np.transpose(t, keep + drop + [n + p for p in keep] + [n + p for p in drop])
    dk = prod(dims[p] for p in keep)
    dd = prod(dims[p] for p in drop)
    t = t.reshape(dk, dd, dk, dd)
    out = np.einsum("ajbj->ab", t)
    return DensityMatrix(out, tuple(dims[p] for p in keep))


def _matrix(x) -> np.ndarray:
    if isinstance(x, DensityMatrix):
        return x.entries
    if isinstance(x, PureState):
        return x.projector().entries
    return np.asarray(x, dtype=np.complex128)


def trace_distance(rho, sigma) -> float:
    """Trace norm ``||rho - sigma||_1`` (no factor 1/2).

    Pure states are compared through their projectors.
    """
    a, b = _matrix(rho), _matrix(sigma)
    if a.shape != b.shape:
        raise InvalidArgumentError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    diff = 0.5 * (diff + diff.conj().T)
    return float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def pure_trace_distance(psi: PureState, phi: PureState) -> float:
    """Projector trace distance ``2 sqrt(1 - |<psi|phi>|^2)`` of two pure states.

    The square root is taken as the norm of the component of ``phi``
    orthogonal to ``psi``, which stays accurate for nearly equal states.
    """
    a, b = psi.amplitudes, phi.amplitudes
    return 2.0 * float(np.linalg.norm(b - np.vdot(a, b) * a))


def spectral_decomposition(rho: DensityMatrix, tol: float = ZERO_TOL) -> list[tuple[float, PureState]]:
    """Eigen-ensemble ``[(weight, eigenstate), ...]`` with weights above ``tol``, largest first."""
    w, v = np.linalg.eigh(rho.entries)
    order = np.argsort(-w, kind="stable")
    keep = [i for i in order if w[i] > tol]
    weights = w[keep] / w[keep].sum()
    out = []
    for wk, i in zip(weights, keep):
        vec = v[:, i]
        j = np.flatnonzero(np.abs(vec) > 1e-12)[0]
        vec = vec * (abs(vec[j]) / vec[j])
        out.append((float(wk), PureState.from_unnormalized(vec, rho.local_dims)))
    return out
