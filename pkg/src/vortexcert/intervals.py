"""Self-contained rigorous interval arithmetic.

Every operation returns an interval that encloses the exact real (or
complex) result for all point inputs in the operands.  Outward rounding is
realized by next-representable adjustment of each computed endpoint; no
global rounding mode is touched, so all operations are pure, reentrant and
safe under concurrent use.

Exactness of endpoint arithmetic is detected with error-free
transformations (TwoSum / Dekker's TwoProduct), so that e.g.
[1,2] + [3,4] == [4,6] holds with zero slack.  Transcendental functions
(ln, sqrt, cos, sin) use the platform libm plus a documented outward slack
(LIBM_SLACK_ULPS ulps per endpoint) and explicit handling of interior
extrema.

Values are immutable after construction.  Double precision only; there is
no arbitrary-precision fallback.
"""

from __future__ import annotations

import json
import math

import numpy as np

__all__ = [
    "DomainError",
    "ShapeError",
    "NotVerified",
    "UnsupportedSize",
    "Interval",
    "ComplexInterval",
    "IntervalVector",
    "IntervalMatrix",
    "PI",
    "TWO_PI",
    "ln",
    "sqrt",
    "cos",
    "sin",
    "hull",
    "mat_mul",
    "mat_vec",
    "norm_sup",
    "norm_sup_matrix",
    "InverseEnclosure",
    "verify_invertible",
    "complex_det_enclosure",
]

_INF = math.inf


class DomainError(ValueError):
    """Operand outside the mathematical domain of the operation."""


class ShapeError(ValueError):
    """Dimension mismatch between interval vectors/matrices."""


class NotVerified(RuntimeError):
    """A verification (contraction) test failed; not a proof of the negation."""


class UnsupportedSize(ValueError):
    """Matrix too large for the requested enclosure algorithm."""


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


# Libm ln/cos/sin are faithfully rounded on mainstream platforms (<= 1-2 ulp);
# we widen each endpoint by this many ulps.  The module contract allows <= 4.
LIBM_SLACK_ULPS = 4


def _down_n(x: float, n: int) -> float:
    for _ in range(n):
        x = math.nextafter(x, -_INF)
    return x


def _up_n(x: float, n: int) -> float:
    for _ in range(n):
        x = math.nextafter(x, _INF)
    return x


# Error-free transformations.  Exponent guard: the error terms of TwoSum and
# TwoProduct are exact only away from overflow/underflow.
_SAFE_LO = 2.0 ** -450
_SAFE_HI = 2.0 ** 450
_SPLITTER = 134217729.0  # 2**27 + 1


def _sum_bounds(a: float, b: float) -> tuple[float, float]:
    """Lower and upper bound of a+b, exact when representable."""
    s = a + b
    if not math.isfinite(s):
        if math.isnan(s):  # inf + (-inf): only from invalid operand pairing
            raise DomainError("undefined endpoint sum inf + (-inf)")
        return (_down(s), s) if s > 0 else (s, _up(s))
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    if err > 0.0:
        return s, _up(s)
    if err < 0.0:
        return _down(s), s
    return s, s


def _prod_bounds(a: float, b: float) -> tuple[float, float]:
    """Lower and upper bound of a*b, exact when detectably representable."""
    p = a * b
    if not math.isfinite(p):
        if math.isnan(p):  # 0 * inf corner: contributes the limit value 0
            return 0.0, 0.0
        return (_down(p), p) if p > 0 else (p, _up(p))
    if p == 0.0:
        if a == 0.0 or b == 0.0:
            return 0.0, 0.0
        # Underflow: true product is tiny but nonzero.
        return _down(0.0), _up(0.0)
    ap, bp = abs(a), abs(b)
    if _SAFE_LO < ap < _SAFE_HI and _SAFE_LO < bp < _SAFE_HI and _SAFE_LO < abs(p):
        ca = _SPLITTER * a
        a1 = ca - (ca - a)
        a2 = a - a1
        cb = _SPLITTER * b
        b1 = cb - (cb - b)
        b2 = b - b1
        err = ((a1 * b1 - p) + a1 * b2 + a2 * b1) + a2 * b2
        if err > 0.0:
            return p, _up(p)
        if err < 0.0:
            return _down(p), p
        return p, p
    return _down(p), _up(p)


def _div_exact(q: float, b: float, a: float) -> bool:
    """True iff q == a/b exactly (q the rounded quotient)."""
    if not (math.isfinite(q) and _SAFE_LO < abs(q) < _SAFE_HI and _SAFE_LO < abs(b) < _SAFE_HI):
        return False
    lo, hi = _prod_bounds(q, b)
    return lo == a and hi == a


class Interval:
    """Closed interval [lo, hi] of reals; endpoints are binary64 floats."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if math.isnan(lo) or math.isnan(hi):
            raise DomainError("NaN interval endpoint")
        if lo > hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    # -- construction -----------------------------------------------------

    @staticmethod
    def _mk(lo: float, hi: float) -> "Interval":
        iv = Interval.__new__(Interval)
        iv.lo = lo
        iv.hi = hi
        return iv

    @classmethod
    def from_midrad(cls, mid: float, rad: float) -> "Interval":
        if rad < 0:
            raise DomainError("negative radius")
        return cls(_down(mid - rad), _up(mid + rad))

    # -- queries ----------------------------------------------------------

    @property
    def mid(self) -> float:
        m = 0.5 * (self.lo + self.hi)
        if math.isfinite(m):
            return m
        return self.lo + 0.5 * (self.hi - self.lo)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def rad(self) -> float:
        return 0.5 * (self.hi - self.lo)

    @property
    def mag(self) -> float:
        """Largest absolute value over the interval."""
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> float:
        """Smallest absolute value over the interval."""
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def issubset(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def intersect(self, other: "Interval") -> "Interval":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise DomainError("empty intersection")
        return Interval._mk(lo, hi)

    def hull(self, other: "Interval") -> "Interval":
        return Interval._mk(min(self.lo, other.lo), max(self.hi, other.hi))

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(x) -> "Interval":
        if isinstance(x, Interval):
            return x
        return Interval(float(x))

    def __add__(self, other):
        if isinstance(other, (ComplexInterval, np.ndarray)):
            return NotImplemented
        o = Interval._coerce(other)
        lo, _ = _sum_bounds(self.lo, o.lo)
        _, hi = _sum_bounds(self.hi, o.hi)
        return Interval._mk(lo, hi)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (ComplexInterval, np.ndarray)):
            return NotImplemented
        o = Interval._coerce(other)
        lo, _ = _sum_bounds(self.lo, -o.hi)
        _, hi = _sum_bounds(self.hi, -o.lo)
        return Interval._mk(lo, hi)

    def __rsub__(self, other):
        return Interval._coerce(other) - self

    def __neg__(self):
        return Interval._mk(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, (ComplexInterval, np.ndarray)):
            return NotImplemented
        o = Interval._coerce(other)
        l1, h1 = _prod_bounds(self.lo, o.lo)
        l2, h2 = _prod_bounds(self.lo, o.hi)
        l3, h3 = _prod_bounds(self.hi, o.lo)
        l4, h4 = _prod_bounds(self.hi, o.hi)
        return Interval._mk(min(l1, l2, l3, l4), max(h1, h2, h3, h4))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (ComplexInterval, np.ndarray)):
            return NotImplemented
        o = Interval._coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise DomainError("division by interval containing zero")
        cands_lo = []
        cands_hi = []
        for a in (self.lo, self.hi):
            for b in (o.lo, o.hi):
                q = a / b
                if _div_exact(q, b, a) or q == 0.0 and a == 0.0:
                    cands_lo.append(q)
                    cands_hi.append(q)
                elif math.isinf(q):
                    if q > 0:
                        cands_lo.append(_down(q))
                        cands_hi.append(q)
                    else:
                        cands_lo.append(q)
                        cands_hi.append(_up(q))
                else:
                    cands_lo.append(_down(q))
                    cands_hi.append(_up(q))
        return Interval._mk(min(cands_lo), max(cands_hi))

    def __rtruediv__(self, other):
        return Interval._coerce(other) / self

    def sqr(self) -> "Interval":
        """Tight [x**2 for x in self] (no dependency blowup)."""
        l1, h1 = _prod_bounds(self.lo, self.lo)
        l2, h2 = _prod_bounds(self.hi, self.hi)
        hi = max(h1, h2)
        if self.lo <= 0.0 <= self.hi:
            return Interval._mk(0.0, hi)
        return Interval._mk(min(l1, l2), hi)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise DomainError("interval power requires a nonnegative integer")
        if n == 0:
            return Interval._mk(1.0, 1.0)
        if n == 1:
            return self
        half = self.sqr() ** (n // 2)
        return half * self if n % 2 else half

    def __abs__(self):
        if self.lo >= 0.0:
            return self
        if self.hi <= 0.0:
            return -self
        return Interval._mk(0.0, max(-self.lo, self.hi))

    # -- comparison / hashing ----------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        """Bit-exact round-trip encoding with hex-float endpoints."""
        return {"lo": self.lo.hex(), "hi": self.hi.hex()}

    @classmethod
    def from_json(cls, obj: dict) -> "Interval":
        return cls(float.fromhex(obj["lo"]), float.fromhex(obj["hi"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def loads(cls, s: str) -> "Interval":
        return cls.from_json(json.loads(s))


PI = Interval(math.pi, _up(math.pi))  # math.pi rounds pi down
TWO_PI = Interval(_down(2.0 * math.pi), _up(_up(2.0 * math.pi)))


def hull(*items) -> Interval:
    ivs = [Interval._coerce(x) for x in items]
    return Interval._mk(min(v.lo for v in ivs), max(v.hi for v in ivs))


def ln(x) -> Interval:
    x = Interval._coerce(x)
    if x.lo <= 0.0:
        raise DomainError("ln requires a strictly positive interval")

    def _lo(v: float) -> float:
        if v == 1.0:
            return 0.0
        return _down_n(math.log(v), LIBM_SLACK_ULPS)

    def _hi(v: float) -> float:
        if v == 1.0:
            return 0.0
        return _up_n(math.log(v), LIBM_SLACK_ULPS)

    return Interval._mk(_lo(x.lo), _hi(x.hi))


def sqrt(x) -> Interval:
    x = Interval._coerce(x)
    if x.lo < 0.0:
        raise DomainError("sqrt requires a nonnegative interval")

    def _lo(v: float) -> float:
        s = math.sqrt(v)
        l, h = _prod_bounds(s, s)
        if l == v and h == v:
            return s
        return _down(s)

    def _hi(v: float) -> float:
        s = math.sqrt(v)
        l, h = _prod_bounds(s, s)
        if l == v and h == v:
            return s
        return _up(s)

    return Interval._mk(_lo(x.lo), _hi(x.hi))


def _cos_point(t: float) -> Interval:
    c = math.cos(t)
    return Interval._mk(max(-1.0, _down_n(c, LIBM_SLACK_ULPS)), min(1.0, _up_n(c, LIBM_SLACK_ULPS)))


def _sin_point(t: float) -> Interval:
    s = math.sin(t)
    return Interval._mk(max(-1.0, _down_n(s, LIBM_SLACK_ULPS)), min(1.0, _up_n(s, LIBM_SLACK_ULPS)))


def cos(x) -> Interval:
    """Enclosure of cos over the interval, extrema at multiples of pi included."""
    x = Interval._coerce(x)
    if not (math.isfinite(x.lo) and math.isfinite(x.hi)):
        return Interval._mk(-1.0, 1.0)
    if x.width >= TWO_PI.lo:
        return Interval._mk(-1.0, 1.0)
    out = _cos_point(x.lo).hull(_cos_point(x.hi))
    k_min = math.floor(x.lo / math.pi) - 1
    k_max = math.ceil(x.hi / math.pi) + 1
    for k in range(k_min, k_max + 1):
        kpi = PI * k if k != 0 else Interval._mk(0.0, 0.0)
        if kpi.lo <= x.hi and kpi.hi >= x.lo:
            out = out.hull(Interval(1.0) if k % 2 == 0 else Interval(-1.0))
    return Interval._mk(max(out.lo, -1.0), min(out.hi, 1.0))


def sin(x) -> Interval:
    """Enclosure of sin over the interval, extrema at pi/2 + k*pi included."""
    x = Interval._coerce(x)
    if not (math.isfinite(x.lo) and math.isfinite(x.hi)):
        return Interval._mk(-1.0, 1.0)
    if x.width >= TWO_PI.lo:
        return Interval._mk(-1.0, 1.0)
    out = _sin_point(x.lo).hull(_sin_point(x.hi))
    half_pi = PI * 0.5
    k_min = math.floor(x.lo / math.pi) - 1
    k_max = math.ceil(x.hi / math.pi) + 1
    for k in range(k_min, k_max + 1):
        crit = PI * k + half_pi
        if crit.lo <= x.hi and crit.hi >= x.lo:
            out = out.hull(Interval(1.0) if k % 2 == 0 else Interval(-1.0))
    return Interval._mk(max(out.lo, -1.0), min(out.hi, 1.0))


class ComplexInterval:
    """Rectangular complex enclosure re + i*im with interval components."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0.0):
        self.re = Interval._coerce(re)
        self.im = Interval._coerce(im)

    @staticmethod
    def _coerce(x) -> "ComplexInterval":
        if isinstance(x, ComplexInterval):
            return x
        if isinstance(x, complex):
            return ComplexInterval(x.real, x.imag)
        return ComplexInterval(Interval._coerce(x), Interval(0.0))

    def __add__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        o = ComplexInterval._coerce(other)
        return ComplexInterval(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        o = ComplexInterval._coerce(other)
        return ComplexInterval(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return ComplexInterval._coerce(other) - self

    def __neg__(self):
        return ComplexInterval(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        o = ComplexInterval._coerce(other)
        return ComplexInterval(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        o = ComplexInterval._coerce(other)
        den = o.abs_sq()
        if den.lo <= 0.0:
            raise DomainError("division by complex interval containing zero")
        num = self * o.conj()
        return ComplexInterval(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return ComplexInterval._coerce(other) / self

    def conj(self) -> "ComplexInterval":
        return ComplexInterval(self.re, -self.im)

    def abs_sq(self) -> Interval:
        return self.re.sqr() + self.im.sqr()

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def contains(self, z: complex) -> bool:
        return self.re.contains(z.real) and self.im.contains(z.imag)

    @property
    def mid(self) -> complex:
        return complex(self.re.mid, self.im.mid)

    def __repr__(self):
        return f"ComplexInterval({self.re!r}, {self.im!r})"


def _as_object_array(data, kind) -> np.ndarray:
    arr = np.empty(np.shape(data), dtype=object)
    flat_src = np.asarray(data, dtype=object).reshape(-1)
    flat = arr.reshape(-1)
    for i, v in enumerate(flat_src):
        flat[i] = kind._coerce(v)
    return arr


class IntervalVector:
    """Dense vector of Interval entries."""

    __slots__ = ("data",)

    def __init__(self, data):
        if isinstance(data, IntervalVector):
            self.data = data.data
            return
        arr = _as_object_array(data, Interval)
        if arr.ndim != 1:
            raise ShapeError("IntervalVector requires a 1-d sequence")
        self.data = arr

    @classmethod
    def from_floats(cls, values) -> "IntervalVector":
        return cls([Interval(float(v)) for v in np.asarray(values).reshape(-1)])

    def __len__(self):
        return self.data.shape[0]

    def __getitem__(self, i):
        return self.data[i]

    def __add__(self, other):
        o = IntervalVector(other)
        if len(o) != len(self):
            raise ShapeError("vector length mismatch")
        return IntervalVector(self.data + o.data)

    def __sub__(self, other):
        o = IntervalVector(other)
        if len(o) != len(self):
            raise ShapeError("vector length mismatch")
        return IntervalVector(self.data - o.data)

    def scale(self, s) -> "IntervalVector":
        s = Interval._coerce(s)
        return IntervalVector(self.data * s)

    def dot(self, other) -> Interval:
        o = IntervalVector(other)
        if len(o) != len(self):
            raise ShapeError("vector length mismatch")
        acc = Interval(0.0)
        for a, b in zip(self.data, o.data):
            acc = acc + a * b
        return acc

    def __repr__(self):
        return f"IntervalVector({list(self.data)!r})"


class IntervalMatrix:
    """Dense rectangular matrix of Interval entries."""

    __slots__ = ("data",)

    def __init__(self, data):
        if isinstance(data, IntervalMatrix):
            self.data = data.data
            return
        arr = _as_object_array(data, Interval)
        if arr.ndim != 2:
            raise ShapeError("IntervalMatrix requires a 2-d array")
        self.data = arr

    @classmethod
    def from_floats(cls, values) -> "IntervalMatrix":
        values = np.asarray(values, dtype=float)
        return cls([[Interval(float(v)) for v in row] for row in values])

    @classmethod
    def identity(cls, n: int) -> "IntervalMatrix":
        return cls([[Interval(1.0 if i == j else 0.0) for j in range(n)] for i in range(n)])

    @property
    def shape(self):
        return self.data.shape

    def __getitem__(self, idx):
        return self.data[idx]

    def mid(self) -> np.ndarray:
        return np.array([[e.mid for e in row] for row in self.data], dtype=float)

    def transpose(self) -> "IntervalMatrix":
        return IntervalMatrix(self.data.T.copy())

    def __add__(self, other):
        o = IntervalMatrix(other)
        if o.shape != self.shape:
            raise ShapeError("matrix shape mismatch")
        return IntervalMatrix(self.data + o.data)

    def __sub__(self, other):
        o = IntervalMatrix(other)
        if o.shape != self.shape:
            raise ShapeError("matrix shape mismatch")
        return IntervalMatrix(self.data - o.data)


def mat_vec(M: IntervalMatrix, v: IntervalVector) -> IntervalVector:
    M = IntervalMatrix(M)
    v = IntervalVector(v)
    r, c = M.shape
    if c != len(v):
        raise ShapeError(f"mat_vec shapes {M.shape} x {len(v)}")
    out = []
    for i in range(r):
        acc = Interval(0.0)
        row = M.data[i]
        for j in range(c):
            acc = acc + row[j] * v.data[j]
        out.append(acc)
    return IntervalVector(out)


def mat_mul(A: IntervalMatrix, B: IntervalMatrix) -> IntervalMatrix:
    A = IntervalMatrix(A)
    B = IntervalMatrix(B)
    ra, ca = A.shape
    rb, cb = B.shape
    if ca != rb:
        raise ShapeError(f"mat_mul shapes {A.shape} x {B.shape}")
    out = np.empty((ra, cb), dtype=object)
    Bd = B.data
    for i in range(ra):
        Ai = A.data[i]
        for j in range(cb):
            acc = Interval(0.0)
            for k in range(ca):
                acc = acc + Ai[k] * Bd[k][j]
            out[i, j] = acc
    return IntervalMatrix(out)


def norm_sup(v) -> Interval:
    """Enclosure of the sup norm of every point vector in v."""
    v = IntervalVector(v)
    if len(v) == 0:
        return Interval(0.0)
    lo = max(e.mig for e in v.data)
    hi = max(e.mag for e in v.data)
    return Interval(lo, hi)


def norm_sup_matrix(M) -> Interval:
    """Enclosure of the induced sup (infinity) norm over all point matrices."""
    M = IntervalMatrix(M)
    r, _ = M.shape
    if r == 0:
        return Interval(0.0)
    lo = 0.0
    hi = 0.0
    for i in range(r):
        row_lo = Interval(0.0)
        row_hi = Interval(0.0)
        for e in M.data[i]:
            row_lo = row_lo + e.mig
            row_hi = row_hi + e.mag
        lo = max(lo, row_lo.lo)
        hi = max(hi, row_hi.hi)
    return Interval(lo, hi)


class InverseEnclosure:
    """Result of verify_invertible: enclosure of the inverse plus the defect."""

    __slots__ = ("inverse", "defect")

    def __init__(self, inverse: IntervalMatrix, defect: float):
        self.inverse = inverse
        self.defect = defect


def verify_invertible(M: IntervalMatrix) -> InverseEnclosure:
    """Certify that every point matrix in M is invertible.

    Uses a floating approximate inverse R of the midpoint matrix and the
    contraction bound ||I - R M|| < 1 in the induced sup norm.  On success
    returns an entrywise enclosure of the set of inverses.  Raises
    NotVerified when the bound cannot be established (which is *not* a
    proof of singularity).
    """
    M = IntervalMatrix(M)
    r, c = M.shape
    if r != c:
        raise ShapeError("verify_invertible requires a square matrix")
    if r == 0:
        return InverseEnclosure(IntervalMatrix(np.empty((0, 0), dtype=object)), 0.0)
    mid = M.mid()
    try:
        R = np.linalg.inv(mid)
    except np.linalg.LinAlgError as exc:
        raise NotVerified(f"approximate inversion failed: {exc}") from None
    if not np.all(np.isfinite(R)):
        raise NotVerified("approximate inverse is not finite")
    Ri = IntervalMatrix.from_floats(R)
    E = IntervalMatrix.identity(r) - mat_mul(Ri, M)
    beta = norm_sup_matrix(E).hi
    if not beta < 1.0:
        raise NotVerified(f"contraction defect {beta} >= 1")
    # ||inv(M) - R||_sup <= ||R||_sup * beta / (1 - beta), applied entrywise.
    norm_r = norm_sup_matrix(Ri).hi
    slack = (Interval(norm_r) * beta) / (Interval(1.0) - Interval(beta))
    pad = Interval(-slack.hi, slack.hi)
    enclosure = IntervalMatrix(Ri.data + pad)
    return InverseEnclosure(enclosure, beta)


def _cdet_lu(A: np.ndarray, n: int) -> ComplexInterval | None:
    """LU determinant of an object array of ComplexInterval; None if a pivot
    column has no entry bounded away from zero."""
    A = A.copy()
    det = ComplexInterval(1.0)
    sign = 1
    for k in range(n):
        piv_row = -1
        piv_mig = 0.0
        for i in range(k, n):
            m = A[i, k].abs_sq().lo
            if m > piv_mig:
                piv_mig = m
                piv_row = i
        if piv_row < 0:
            return None
        if piv_row != k:
            A[[k, piv_row], :] = A[[piv_row, k], :]
            sign = -sign
        piv = A[k, k]
        det = det * piv
        for i in range(k + 1, n):
            f = A[i, k] / piv
            for j in range(k + 1, n):
                A[i, j] = A[i, j] - f * A[k, j]
    if sign < 0:
        det = -det
    return det


def _cdet_expansion(A: np.ndarray, rows: list, cols: list) -> ComplexInterval:
    n = len(rows)
    if n == 1:
        return A[rows[0], cols[0]]
    acc = ComplexInterval(0.0)
    sub_rows = rows[1:]
    for idx, c in enumerate(cols):
        minor = _cdet_expansion(A, sub_rows, cols[:idx] + cols[idx + 1 :])
        term = A[rows[0], c] * minor
        acc = acc + term if idx % 2 == 0 else acc - term
    return acc


_DET_MAX_SIZE = 30
_DET_EXPANSION_MAX = 5


def _hadamard_box(arr: np.ndarray, n: int) -> ComplexInterval:
    """Coarse but valid enclosure: |det| <= prod of row Euclidean norms."""
    bound = Interval(1.0)
    for i in range(n):
        acc = Interval(0.0)
        for j in range(n):
            acc = acc + arr[i, j].abs_sq()
        bound = bound * sqrt(acc)
    b = bound.hi
    return ComplexInterval(Interval(-b, b), Interval(-b, b))


def complex_det_enclosure(M) -> ComplexInterval:
    """Enclosure of det(A) for every point matrix A in the complex interval
    matrix M.  Interval LU with mignitude pivoting; falls back to cofactor
    expansion for small sizes, or to a zero-containing Hadamard box, when no
    admissible pivot exists."""
    arr = _as_object_array(M, ComplexInterval)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError("determinant requires a square matrix")
    n = arr.shape[0]
    if n > _DET_MAX_SIZE:
        raise UnsupportedSize(f"determinant size {n} exceeds {_DET_MAX_SIZE}")
    if n == 0:
        return ComplexInterval(1.0)
    det = _cdet_lu(arr, n)
    if det is not None:
        return det
    if n <= _DET_EXPANSION_MAX:
        return _cdet_expansion(arr, list(range(n)), list(range(n)))
    return _hadamard_box(arr, n)
