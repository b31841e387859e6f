"""Finite-dimensional model of a semi-finite trace algebra.

Elements live in a direct sum of full complex matrix blocks; the trace is a
positively weighted sum of block traces, which keeps it faithful, normal and
unitarily invariant within each block. All operations are pure functions of
immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NotHermitianError, ShapeMismatchError, SpecFormatError

# largest permitted total dimension of the direct sum
TOTAL_DIM_CAP = 256

# relative threshold below which singular values / eigenvalues count as zero
# for support projections and spectral truncation
ZERO_EIGENVALUE_RTOL = 1e-14

_HERMITIAN_RTOL = 1e-10


@dataclass(frozen=True)
class BlockShape:
    """Direct-sum layout: one square complex block per entry of dims."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        object.__setattr__(self, "dims", dims)
        if not dims:
            raise DomainError("block shape needs at least one block")
        if any(n < 1 for n in dims):
            raise DomainError("block sizes must be >= 1")
        if sum(dims) > TOTAL_DIM_CAP:
            raise DomainError(f"total dimension {sum(dims)} exceeds the cap {TOTAL_DIM_CAP}")

    @property
    def total(self) -> int:
        return sum(self.dims)

    @property
    def commutative(self) -> bool:
        return all(n == 1 for n in self.dims)


class BlockElement:
    """One complex matrix per block of a :class:`BlockShape`."""

    __slots__ = ("shape", "blocks")

    def __init__(self, shape: BlockShape, blocks: Sequence[np.ndarray]):
        blocks = [np.array(b, dtype=np.complex128) for b in blocks]
        if len(blocks) != len(shape.dims):
            raise ShapeMismatchError(f"expected {len(shape.dims)} blocks, got {len(blocks)}")
        for n, b in zip(shape.dims, blocks):
            if b.shape != (n, n):
                raise ShapeMismatchError(f"block of size {b.shape} does not match dim {n}")
            if not np.all(np.isfinite(b.view(np.float64))):
                raise DomainError("block entries must be finite")
        self.shape = shape
        self.blocks = blocks

    # --- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, shape: BlockShape) -> "BlockElement":
        return cls(shape, [np.zeros((n, n)) for n in shape.dims])

    @classmethod
    def identity(cls, shape: BlockShape) -> "BlockElement":
        return cls(shape, [np.eye(n) for n in shape.dims])

    @classmethod
    def diagonal(cls, shape: BlockShape, values) -> "BlockElement":
        """Element with the given values along the blockwise diagonal."""
        values = np.asarray(values)
        if values.size != shape.total:
            raise ShapeMismatchError(f"need {shape.total} diagonal values, got {values.size}")
        blocks, pos = [], 0
        for n in shape.dims:
            blocks.append(np.diag(values[pos : pos + n]))
            pos += n
        return cls(shape, blocks)

    # --- arithmetic ---------------------------------------------------------

    def _same_shape(self, other: "BlockElement"):
        if self.shape != other.shape:
            raise ShapeMismatchError(f"shape mismatch: {self.shape.dims} vs {other.shape.dims}")

    def __add__(self, other):
        self._same_shape(other)
        return BlockElement(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._same_shape(other)
        return BlockElement(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return BlockElement(self.shape, [-a for a in self.blocks])

    def __mul__(self, c):
        c = complex(c)
        return BlockElement(self.shape, [c * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / complex(c))

    def __matmul__(self, other):
        self._same_shape(other)
        return BlockElement(self.shape, [a @ b for a, b in zip(self.blocks, other.blocks)])

    @property
    def H(self) -> "BlockElement":
        """Adjoint (blockwise conjugate transpose)."""
        return BlockElement(self.shape, [a.conj().T for a in self.blocks])

    # --- metrics and spectra --------------------------------------------------

    def frobenius_norm(self) -> float:
        return float(np.sqrt(sum(np.sum(np.abs(b) ** 2) for b in self.blocks)))

    def operator_norm(self) -> float:
        return max(
            float(np.linalg.svd(b, compute_uv=False)[0]) if b.size else 0.0 for b in self.blocks
        )

    def flat_singular_values(self) -> np.ndarray:
        """Singular values of every block, concatenated in block order."""
        return np.concatenate([np.linalg.svd(b, compute_uv=False) for b in self.blocks])

    def diagonal_values(self) -> np.ndarray:
        return np.concatenate([np.diag(b) for b in self.blocks])

    def asymmetry(self) -> float:
        return float(np.sqrt(sum(np.sum(np.abs(b - b.conj().T) ** 2) for b in self.blocks)))

    def is_hermitian(self, rtol: float = _HERMITIAN_RTOL) -> bool:
        return self.asymmetry() <= rtol * max(self.frobenius_norm(), 1e-300)

    def is_zero(self) -> bool:
        return all(np.all(b == 0) for b in self.blocks)

    # --- serialization --------------------------------------------------------

    def to_spec(self) -> dict:
        blocks = []
        for b in self.blocks:
            blocks.append([[[float(z.real), float(z.imag)] for z in row] for row in b])
        return {"dims": list(self.shape.dims), "blocks": blocks}

    @classmethod
    def from_spec(cls, record: dict) -> "BlockElement":
        if not isinstance(record, dict) or "dims" not in record or "blocks" not in record:
            raise SpecFormatError("matrix record must carry 'dims' and 'blocks' fields")
        try:
            shape = BlockShape(tuple(record["dims"]))
            blocks = []
            for n, raw in zip(shape.dims, record["blocks"], strict=True):
                blocks.append(
                    np.array([[_entry_to_complex(e) for e in row] for row in raw]).reshape(n, n)
                )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, (DomainError, SpecFormatError)):
                raise
            raise SpecFormatError(f"malformed matrix record: {exc}") from exc
        return cls(shape, blocks)

    def __repr__(self):
        return f"<BlockElement dims={self.shape.dims}>"


def _entry_to_complex(e) -> complex:
    if isinstance(e, (int, float)):
        return complex(e)
    if isinstance(e, (list, tuple)) and len(e) == 2:
        return complex(float(e[0]), float(e[1]))
    raise SpecFormatError(f"matrix entry must be a number or [re, im] pair, got {e!r}")


@dataclass(frozen=True)
class TraceSpec:
    """Faithful normal trace: positive weight per block."""

    shape: BlockShape
    weights: tuple[float, ...]

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if len(weights) != len(self.shape.dims):
            raise ShapeMismatchError("one weight per block is required")
        if any(not np.isfinite(w) or w <= 0 for w in weights):
            raise DomainError("trace weights must be positive and finite")

    @classmethod
    def standard(cls, shape: BlockShape) -> "TraceSpec":
        return cls(shape, (1.0,) * len(shape.dims))

    @classmethod
    def from_spec(cls, record: dict, shape: BlockShape) -> "TraceSpec":
        if not isinstance(record, dict) or "weights" not in record:
            raise SpecFormatError("trace record must carry a 'weights' field")
        if "dims" in record and tuple(record["dims"]) != shape.dims:
            raise ShapeMismatchError("trace record dims disagree with the matrix shape")
        return cls(shape, tuple(record["weights"]))

    def to_spec(self) -> dict:
        return {"dims": list(self.shape.dims), "weights": list(self.weights)}

    @property
    def total_weight(self) -> float:
        """The trace of the identity."""
        return float(sum(w * n for w, n in zip(self.weights, self.shape.dims)))

    def flat_weights(self) -> np.ndarray:
        """Per-eigenvalue weights: block weight repeated block-size times."""
        return np.repeat(np.asarray(self.weights), np.asarray(self.shape.dims))

    def trace(self, x: BlockElement) -> complex:
        if x.shape != self.shape:
            raise ShapeMismatchError("element shape does not match the trace")
        return complex(sum(w * np.trace(b) for w, b in zip(self.weights, x.blocks)))


def polar(x: BlockElement) -> tuple[BlockElement, BlockElement]:
    """Polar decomposition x = u |x| with |x| = (x* x)^(1/2).

    u is the partial isometry whose initial projection u* u is the support
    of |x|; singular values below ZERO_EIGENVALUE_RTOL of the largest are
    treated as zero.
    """
    us, abss = [], []
    for b in x.blocks:
        U, s, Vh = np.linalg.svd(b)
        cutoff = ZERO_EIGENVALUE_RTOL * (s[0] if s.size else 0.0)
        mask = s > cutoff
        us.append((U * mask) @ Vh)
        abss.append((Vh.conj().T * s) @ Vh)
    return BlockElement(x.shape, us), BlockElement(x.shape, abss)


def _hermitian_eigh(x: BlockElement, what: str):
    asym = x.asymmetry()
    if asym > _HERMITIAN_RTOL * max(x.frobenius_norm(), 1e-300):
        raise NotHermitianError(f"{what} requires a Hermitian element (asymmetry {asym:.3g})")
    out = []
    for b in x.blocks:
        w, v = np.linalg.eigh(0.5 * (b + b.conj().T))
        out.append((w, v))
    return out


def func_calc(f: Callable[[np.ndarray], np.ndarray], x: BlockElement) -> BlockElement:
    """Spectral functional calculus V f(Lambda) V* on a Hermitian element.

    f receives the real eigenvalue array of each block and must return an
    array of the same length.
    """
    blocks = []
    for w, v in _hermitian_eigh(x, "functional calculus"):
        fw = np.asarray(f(w), dtype=np.float64)
        blocks.append((v * fw) @ v.conj().T)
    return BlockElement(x.shape, blocks)


def spectral_truncate(x: BlockElement, lam: float) -> BlockElement:
    """Remove the low part of a positive element: keep eigenvalues > lam.

    Returns x (1 - e_lam(x)) where e_lam is the spectral projection of
    [0, lam].
    """
    if not np.isfinite(lam) or lam <= 0:
        raise DomainError(f"truncation level must be positive and finite, got {lam}")
    blocks = []
    for w, v in _hermitian_eigh(x, "spectral truncation"):
        top = max(w.max(initial=0.0), 0.0)
        if np.any(w < -1e-10 * max(top, 1.0)):
            raise DomainError("spectral truncation requires a positive semidefinite element")
        w = np.where(w > ZERO_EIGENVALUE_RTOL * top, w, 0.0)
        w = np.where(w > lam, w, 0.0)
        blocks.append((v * w) @ v.conj().T)
    return BlockElement(x.shape, blocks)
