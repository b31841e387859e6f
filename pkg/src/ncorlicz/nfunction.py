"""N-functions: even convex Young functions defined by a nondecreasing density.

An N-function is Phi(t) = integral_0^|t| p(s) ds with p nondecreasing,
right continuous, p(0) = 0, p(s) > 0 for s > 0 and p(s) -> inf. Three
densities are built in:

  power      p(s) = s^(a-1), so Phi(t) = |t|^a / a          (exponent a > 1)
  log-power  Phi(t) = |t|^b (ln|t| + 1) for |t| >= 1        (exponent b > 1)
             and |t|^(b+1) on [0, 1]
  tabulated  piecewise-linear p through breakpoints (s, p(s))

The log-power branch below 1 is a convex splice: the raw formula
|t|^b (ln|t| + 1) dips negative on (0, 1/e) and is not convex there, so it
cannot serve as an N-function on its own. Both branches agree in value and
slope at t = 1.

The complementary (Young-conjugate) function Psi has density
q(s) = sup{t >= 0 : p(t) <= s}; plateaus of p become jumps of q and vice
versa. Conjugation is closed form for power kinds, an exact table swap for
tabulated kinds, and a numeric generalized inverse otherwise.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import DomainError, SolveError, SpecFormatError

_EMPTY = np.empty(0, dtype=np.float64)


def _pow(base: float, expo: float) -> float:
    # scalar float ** raises OverflowError where numpy would give inf
    try:
        return base**expo
    except OverflowError:
        return math.inf


def _exp(u: float) -> float:
    try:
        return math.exp(u)
    except OverflowError:
        return math.inf


class NFunction:
    """Base class; subclasses provide phi, density, and conjugation."""

    def __init__(self, name: str):
        self.name = name
        self._conjugate: NFunction | None = None

    # --- subclass surface -------------------------------------------------

    def phi(self, t: float) -> float:
        """Phi(|t|)."""
        raise NotImplementedError

    def density(self, s: float) -> float:
        """The density p(s) for s >= 0."""
        raise NotImplementedError

    def _make_conjugate(self) -> "NFunction":
        return ConjugateNF(self)

    def kernel_spec(self):
        """Flattened descriptor for the compiled kernels, or None."""
        return None

    def to_spec(self) -> dict:
        raise NotImplementedError

    # --- shared algorithms ------------------------------------------------

    def phi_array(self, t) -> np.ndarray:
        """Vectorized Phi(|t|)."""
        spec = self.kernel_spec()
        t = np.abs(np.asarray(t, dtype=np.float64))
        if spec is not None:
            return np.asarray(_kernels.phi_many(*spec, np.ascontiguousarray(t.ravel()))).reshape(t.shape)
        flat = np.array([self.phi(v) for v in t.ravel()])
        return flat.reshape(t.shape)

    def conjugate(self) -> "NFunction":
        """The complementary N-function, cached after first use."""
        if self._conjugate is None:
            conj = self._make_conjugate()
            if conj._conjugate is None:
                conj._conjugate = self
            self._conjugate = conj
        return self._conjugate

    def inverse(self, y: float) -> float:
        """The unique t >= 0 with Phi(t) = y.

        Bracketed bisection with Newton acceleration; relative residual
        |Phi(t) - y| <= 1e-12 * max(1, y).
        """
        if not math.isfinite(y) or y < 0:
            raise DomainError(f"inverse requires finite y >= 0, got {y}")
        if y == 0.0:
            return 0.0
        hi = 1.0
        for _ in range(1100):
            if self.phi(hi) >= y:
                break
            hi *= 2.0
        else:
            raise SolveError("could not bracket the inverse from above")
        lo = 0.0 if hi == 1.0 else 0.5 * hi
        t = 0.5 * (lo + hi)
        for _ in range(200):
            ft = self.phi(t) - y
            if math.isfinite(ft) and abs(ft) <= 1e-13 * max(1.0, y):
                return t
            if ft > 0.0:
                hi = t
            else:
                lo = t
            step = 0.5 * (lo + hi)
            if math.isfinite(ft):
                d = self.density(t)
                if d > 0.0:
                    newton = t - ft / d
                    if lo < newton < hi:
                        step = newton
            t = step
        if abs(self.phi(t) - y) > 1e-12 * max(1.0, y):
            raise SolveError(f"inverse did not converge for y={y}")
        return t

    def density_inverse_sup(self, s: float) -> float:
        """The generalized inverse sup{t >= 0 : p(t) <= s}."""
        if not math.isfinite(s) or s < 0:
            raise DomainError(f"density inverse requires finite s >= 0, got {s}")
        if s == 0.0:
            return 0.0
        hi = 1.0
        for _ in range(1100):
            if self.density(hi) > s:
                break
            hi *= 2.0
        else:
            raise SolveError("could not bracket the density inverse")
        lo = 0.0 if hi == 1.0 else 0.5 * hi
        # maintain p(lo) <= s < p(hi); plateau-safe pure bisection
        while hi - lo > 1e-14 * hi:
            mid = 0.5 * (lo + hi)
            if self.density(mid) <= s:
                lo = mid
            else:
                hi = mid
        return lo

    def _check_growth(self):
        small, big = 1e-9, 1e9
        r_lo = self.phi(small) / small
        r_hi = self.phi(big) / big
        if not (r_lo < r_hi) or r_lo < 0:
            raise DomainError(
                f"{self.name}: Phi(t)/t must grow from 0 toward inf "
                f"(got {r_lo:.3g} at {small:g}, {r_hi:.3g} at {big:g})"
            )

    def __repr__(self):
        return f"<NFunction {self.name}>"


class PowerNF(NFunction):
    """Phi(t) = |t|^a / a with density p(s) = s^(a-1), a > 1."""

    def __init__(self, exponent: float):
        if not (math.isfinite(exponent) and exponent > 1.0):
            raise DomainError(f"power exponent must be finite and > 1, got {exponent}")
        super().__init__(f"power({exponent:g})")
        self.exponent = float(exponent)
        self._spec = (_kernels.KIND_POWER, self.exponent, _EMPTY, _EMPTY, _EMPTY)

    def phi(self, t):
        return abs(t) ** self.exponent / self.exponent

    def density(self, s):
        return s ** (self.exponent - 1.0)

    def inverse(self, y):
        if not math.isfinite(y) or y < 0:
            raise DomainError(f"inverse requires finite y >= 0, got {y}")
        return (self.exponent * y) ** (1.0 / self.exponent)

    def density_inverse_sup(self, s):
        if not math.isfinite(s) or s < 0:
            raise DomainError(f"density inverse requires finite s >= 0, got {s}")
        return s ** (1.0 / (self.exponent - 1.0))

    def _make_conjugate(self):
        return PowerNF(self.exponent / (self.exponent - 1.0))

    def kernel_spec(self):
        return self._spec

    def to_spec(self):
        return {"kind": "power", "p": self.exponent}


class LogPowerNF(NFunction):
    """Phi(t) = |t|^b (ln|t| + 1) for |t| >= 1, |t|^(b+1) on [0, 1], b > 1."""

    def __init__(self, beta: float):
        if not (math.isfinite(beta) and beta > 1.0):
            raise DomainError(f"log-power exponent must be finite and > 1, got {beta}")
        super().__init__(f"logpower({beta:g})")
        self.beta = float(beta)
        self._spec = (_kernels.KIND_LOGPOWER, self.beta, _EMPTY, _EMPTY, _EMPTY)

    def phi(self, t):
        at = abs(t)
        if at <= 1.0:
            return at ** (self.beta + 1.0)
        return at**self.beta * (math.log(at) + 1.0)

    def density(self, s):
        b = self.beta
        if s <= 1.0:
            return (b + 1.0) * s**b
        return s ** (b - 1.0) * (b * math.log(s) + b + 1.0)

    def inverse(self, y):
        if not math.isfinite(y) or y < 0:
            raise DomainError(f"inverse requires finite y >= 0, got {y}")
        b = self.beta
        if y <= 1.0:
            return y ** (1.0 / (b + 1.0))
        # solve b*u + ln(u+1) = ln y for u = ln t; safe even when t^b overflows
        ly = math.log(y)
        u = ly / b
        for _ in range(100):
            f = b * u + math.log(u + 1.0) - ly
            u_new = u - f / (b + 1.0 / (u + 1.0))
            if abs(u_new - u) <= 1e-16 * (1.0 + abs(u)):
                u = u_new
                break
            u = max(u_new, 0.0)
        return math.exp(u)

    def density_inverse_sup(self, s):
        if not math.isfinite(s) or s < 0:
            raise DomainError(f"density inverse requires finite s >= 0, got {s}")
        b = self.beta
        if s <= b + 1.0:
            return (s / (b + 1.0)) ** (1.0 / b)
        # solve (b-1)*u + ln(b*u + b + 1) = ln s for u = ln t
        ls = math.log(s)
        u = max((ls - math.log(b + 1.0)) / (b - 1.0), 0.0)
        for _ in range(100):
            f = (b - 1.0) * u + math.log(b * u + b + 1.0) - ls
            u_new = u - f / ((b - 1.0) + b / (b * u + b + 1.0))
            if abs(u_new - u) <= 1e-16 * (1.0 + abs(u)):
                u = u_new
                break
            u = max(u_new, 0.0)
        return math.exp(u)

    def kernel_spec(self):
        return self._spec

    def to_spec(self):
        return {"kind": "logpower", "beta": self.beta}


class TabulatedNF(NFunction):
    """Piecewise-linear density through (s, p(s)) breakpoints.

    Breakpoints must start at (0, 0) with strictly increasing s and
    nondecreasing positive values; beyond the last breakpoint the density
    is extrapolated with the final segment's slope, which must be positive
    so that p -> inf.
    """

    def __init__(self, points: Sequence[Sequence[float]]):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise DomainError("tabulated density needs at least two (s, p) pairs")
        sb, vb = pts[:, 0].copy(), pts[:, 1].copy()
        if not np.all(np.isfinite(sb)) or not np.all(np.isfinite(vb)):
            raise DomainError("tabulated breakpoints must be finite")
        if sb[0] != 0.0 or vb[0] != 0.0:
            raise DomainError("tabulated density must start at the breakpoint (0, 0)")
        if np.any(np.diff(sb) <= 0):
            raise DomainError("tabulated breakpoints must be strictly increasing in s")
        if np.any(np.diff(vb) < 0):
            raise DomainError("tabulated density values must be nondecreasing")
        if vb[1] <= 0.0:
            raise DomainError("tabulated density must be positive immediately past 0")
        if vb[-1] <= vb[-2]:
            raise DomainError("tabulated density must end on a rising segment (p -> inf)")
        super().__init__(f"table({len(sb)} pts)")
        self.breakpoints_s = sb
        self.breakpoints_v = vb
        cum = np.zeros_like(sb)
        cum[1:] = np.cumsum(0.5 * (vb[1:] + vb[:-1]) * np.diff(sb))
        self._cum = cum
        self._spec = (_kernels.KIND_TABLE, 0.0, sb, vb, cum)
        self._check_growth()

    def phi(self, t):
        return float(self.phi_array(np.array([t]))[0])

    def density(self, s):
        sb, vb = self.breakpoints_s, self.breakpoints_v
        if s <= 0.0:
            return 0.0
        if s >= sb[-1]:
            slope = (vb[-1] - vb[-2]) / (sb[-1] - sb[-2])
            return vb[-1] + slope * (s - sb[-1])
        return float(np.interp(s, sb, vb))

    def _make_conjugate(self):
        sb, vb = self.breakpoints_s, self.breakpoints_v
        # reflect the density graph across the diagonal; compress plateau
        # runs to their endpoints, then nudge the duplicate left endpoint so
        # the jump of q becomes a steep admissible segment
        keep = [0]
        for i in range(1, len(sb)):
            if vb[i] == vb[keep[-1]] and len(keep) >= 2 and vb[keep[-1]] == vb[keep[-2]]:
                keep[-1] = i
            else:
                keep.append(i)
        qs, qv = [], []
        for i in keep:
            s_new, v_new = vb[i], sb[i]
            if qs and s_new == qs[-1]:
                gap = qs[-1] - (qs[-2] if len(qs) >= 2 else 0.0)
                nudge = min(1e-9 * max(s_new, 1.0), 0.5 * gap)
                qs[-1] -= nudge
            qs.append(s_new)
            qv.append(v_new)
        return TabulatedNF(np.column_stack([qs, qv]))

    def kernel_spec(self):
        return self._spec

    def to_spec(self):
        return {"kind": "table", "points": np.column_stack([self.breakpoints_s, self.breakpoints_v]).tolist()}


class ConjugateNF(NFunction):
    """Numeric Young conjugate of an arbitrary N-function.

    Its density is the generalized inverse q(s) = sup{t : p(t) <= s} and
    values follow the stationarity identity Psi(s) = s q(s) - Phi(q(s)),
    exact because the supremum in the Legendre transform is attained at
    t = q(s). Conjugating again returns the base function.
    """

    def __init__(self, base: NFunction):
        super().__init__(f"conjugate[{base.name}]")
        self.base = base

    def phi(self, t):
        at = abs(t)
        if at == 0.0:
            return 0.0
        q = self.base.density_inverse_sup(at)
        return at * q - self.base.phi(q)

    def density(self, s):
        return self.base.density_inverse_sup(s)

    def _make_conjugate(self):
        return self.base

    def to_spec(self):
        return {"kind": "conjugate", "of": self.base.to_spec()}


# --- module-level operation surface ---------------------------------------


def eval_phi(nf: NFunction, t: float) -> float:
    """Phi(|t|); rejects non-finite arguments."""
    if not math.isfinite(t):
        raise DomainError(f"eval_phi requires finite t, got {t}")
    return nf.phi(t)


def inverse_phi(nf: NFunction, y: float) -> float:
    """The t >= 0 with Phi(t) = y."""
    return nf.inverse(y)


def conjugate(nf: NFunction) -> NFunction:
    """The complementary N-function Psi."""
    return nf.conjugate()


def young_gap(nf: NFunction, t: float, s: float) -> float:
    """Phi(t) + Psi(s) - t s, nonnegative by Young's inequality."""
    if t < 0 or s < 0:
        raise DomainError("young_gap requires t, s >= 0")
    return nf.phi(t) + nf.conjugate().phi(s) - t * s


class Delta2Result(NamedTuple):
    satisfied: bool
    r_estimate: float


def check_delta2(nf: NFunction, k: float, grid) -> Delta2Result:
    """Heuristic growth-condition probe: is Phi(k t) / Phi(t) bounded?

    r_estimate is the supremum of the ratio over the grid; `satisfied`
    flags the absence of a growth trend across the top two decades
    (top-decade max <= 1.05 x previous-decade max). Advisory only: the
    condition cannot be decided from finitely many samples.
    """
    if k <= 0 or not math.isfinite(k):
        raise DomainError(f"check_delta2 requires finite k > 0, got {k}")
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size == 0:
        raise DomainError("check_delta2 requires a nonempty grid")
    if np.any(grid <= 0) or not np.all(np.isfinite(grid)):
        raise DomainError("grid values must be positive and finite")
    t_min, t_max = grid.min(), grid.max()
    if math.log10(t_max / t_min) < 8.0 - 1e-9:
        raise DomainError("grid must span at least 8 decades")
    with np.errstate(over="ignore", invalid="ignore"):
        ratios = nf.phi_array(k * grid) / nf.phi_array(grid)
    r_estimate = float(np.max(ratios))
    top = grid > t_max / 10.0
    prev = (grid > t_max / 100.0) & ~top
    if not np.any(prev):
        raise DomainError("grid must populate the top two decades")
    top_max = float(np.max(ratios[top]))
    prev_max = float(np.max(ratios[prev]))
    satisfied = math.isfinite(r_estimate) and top_max <= 1.05 * prev_max
    return Delta2Result(satisfied, r_estimate)


def from_spec(record: dict) -> NFunction:
    """Build an N-function from its text record."""
    if not isinstance(record, dict) or "kind" not in record:
        raise SpecFormatError("N-function spec must be an object with a 'kind' field")
    kind = record["kind"]
    try:
        if kind == "power":
            return PowerNF(float(record["p"]))
        if kind == "logpower":
            return LogPowerNF(float(record["beta"]))
        if kind == "table":
            return TabulatedNF(record["points"])
        if kind == "conjugate":
            return ConjugateNF(from_spec(record["of"]))
    except KeyError as exc:
        raise SpecFormatError(f"N-function spec missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise SpecFormatError(f"malformed N-function spec: {exc}") from exc
    raise SpecFormatError(f"unknown N-function kind {kind!r}")
