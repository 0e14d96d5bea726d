"""Extended-range arithmetic and cylinder functions of integer order.

Magnitudes such as ``omega**(n-1) / (n-1)!`` leave the double range long
before the modal index reaches the hundreds, so values are carried as a
double significand in ``[0.5, 1)`` together with a signed base-2 exponent.

Besides the direct Bessel/Hankel evaluators this module exposes a set of
*normalized* forms used by the layer-potential code.  For integer ``n >= 1``
and ``q = z**2 / 4`` write

    J_n(z)  = E_n(z) * Jh_n(z),            E_n(z) = (z/2)**n / n!
    J_n'(z) = (n / z) * E_n(z) * DJ_n(z)
    Y_n(z)  = -F_n(z) / (pi * n * E_n(z))
    Y_n'(z) = DY_n(z) / (pi * z * E_n(z))

Each of ``Jh, DJ, F, DY`` tends to 1 as ``z -> 0`` and their departures from 1
(the "tails") are summed directly, so differences of leading terms never
have to be formed numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "CapacityError",
    "DomainError",
    "SingularityError",
    "ScaledReal",
    "ScaledComplex",
    "CylinderOrder",
    "DEFAULT_MAX_ORDER",
    "bessel_j",
    "bessel_j_prime",
    "bessel_y",
    "bessel_y_prime",
    "hankel1",
    "hankel1_prime",
    "series_j_oracle",
    "series_h_oracle",
    "lambert_w_minus1",
    "NormalizedCylinder",
    "normalized_cylinder",
    "NormalizedFirstKind",
    "normalized_first_kind",
    "log2_power_prefactor",
]

DEFAULT_MAX_ORDER = 512
EULER_GAMMA = 0.57721566490153286061
_LN2 = math.log(2.0)


class CapacityError(ValueError):
    """Requested order exceeds the configured maximum."""


class DomainError(ValueError):
    """Argument outside the validity domain of a routine."""


class SingularityError(ValueError):
    """Function is singular at the requested argument."""


# ---------------------------------------------------------------------------
# scaled numbers
# ---------------------------------------------------------------------------


class FloatConversion(NamedTuple):
    value: float
    overflow: bool
    underflow: bool


class ScaledReal:
    """Real number ``significand * 2**exponent`` with ``|significand|`` in [0.5, 1).

    Zero is stored as ``(0.0, 0)``.
    """

    __slots__ = ("significand", "exponent")

    def __init__(self, significand: float = 0.0, exponent: int = 0):
        significand = float(significand)
        if not math.isfinite(significand):
            raise ValueError(f"non-finite significand {significand!r}")
        m, e = math.frexp(significand)
        if m == 0.0:
            self.significand = 0.0
            self.exponent = 0
        else:
            self.significand = m
            self.exponent = int(exponent) + e

    @classmethod
    def from_log2(cls, log2_magnitude: float, sign: float = 1.0) -> "ScaledReal":
        """Build from a base-2 logarithm of the magnitude."""
        e = math.floor(log2_magnitude)
        return cls(math.copysign(2.0 ** (log2_magnitude - e), sign), e)

    # -- predicates and conversion ------------------------------------------------
    def is_zero(self) -> bool:
        return self.significand == 0.0

    def convert(self) -> FloatConversion:
        """Convert to float, saturating to +-inf or 0 with explicit flags."""
        if self.significand == 0.0:
            return FloatConversion(0.0, False, False)
        if self.exponent > 1024:
            return FloatConversion(math.copysign(math.inf, self.significand), True, False)
        if self.exponent < -1073:
            return FloatConversion(math.copysign(0.0, self.significand), False, True)
        return FloatConversion(math.ldexp(self.significand, self.exponent), False, False)

    def __float__(self) -> float:
        return self.convert().value

    def log2(self) -> float:
        """Base-2 logarithm of the magnitude (``-inf`` for zero)."""
        if self.significand == 0.0:
            return -math.inf
        return math.log2(abs(self.significand)) + self.exponent

    def mantissa_at(self, exponent: int) -> float:
        """Value divided by ``2**exponent`` as a plain float (may underflow to 0)."""
        if self.significand == 0.0:
            return 0.0
        shift = self.exponent - exponent
        if shift > 1024:
            raise OverflowError("mantissa does not fit at the requested exponent")
        if shift < -1100:
            return 0.0
        return math.ldexp(self.significand, shift)

    # -- arithmetic ---------------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "ScaledReal":
        if isinstance(x, ScaledReal):
            return x
        return ScaledReal(float(x))

    def __neg__(self) -> "ScaledReal":
        out = ScaledReal.__new__(ScaledReal)
        out.significand = -self.significand
        out.exponent = self.exponent
        return out

    def __abs__(self) -> "ScaledReal":
        out = ScaledReal.__new__(ScaledReal)
        out.significand = abs(self.significand)
        out.exponent = self.exponent
        return out

    def __add__(self, other) -> "ScaledReal":
        other = self._coerce(other)
        if other.significand == 0.0:
            return self
        if self.significand == 0.0:
            return other
        a, b = (self, other) if self.exponent >= other.exponent else (other, self)
        shift = b.exponent - a.exponent
        if shift < -60:
            return a
        return ScaledReal(a.significand + math.ldexp(b.significand, shift), a.exponent)

    __radd__ = __add__

    def __sub__(self, other) -> "ScaledReal":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "ScaledReal":
        return self._coerce(other) - self

    def __mul__(self, other) -> "ScaledReal":
        other = self._coerce(other)
        return ScaledReal(self.significand * other.significand, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ScaledReal":
        other = self._coerce(other)
        if other.significand == 0.0:
            raise ZeroDivisionError("division by a scaled zero")
        return ScaledReal(self.significand / other.significand, self.exponent - other.exponent)

    def __rtruediv__(self, other) -> "ScaledReal":
        return self._coerce(other) / self

    def __pow__(self, k: int) -> "ScaledReal":
        if not isinstance(k, (int, np.integer)):
            raise TypeError("only integer powers are supported")
        k = int(k)
        if k < 0:
            return ScaledReal(1.0) / (self ** (-k))
        result = ScaledReal(1.0)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def ldexp(self, k: int) -> "ScaledReal":
        """Multiply by ``2**k`` exactly."""
        if self.significand == 0.0:
            return self
        out = ScaledReal.__new__(ScaledReal)
        out.significand = self.significand
        out.exponent = self.exponent + int(k)
        return out

    def sqrt(self) -> "ScaledReal":
        if self.significand < 0.0:
            raise DomainError("square root of a negative scaled number")
        if self.significand == 0.0:
            return self
        m, e = self.significand, self.exponent
        if e % 2:
            m, e = 2.0 * m, e - 1
        return ScaledReal(math.sqrt(m), e // 2)

    # -- comparison ---------------------------------------------------------------
    def compare_magnitude(self, other) -> int:
        """Return -1, 0 or 1 comparing ``|self|`` with ``|other|``."""
        other = self._coerce(other)
        a, b = abs(self.significand), abs(other.significand)
        if a == 0.0 or b == 0.0:
            return (a > b) - (a < b)
        if self.exponent != other.exponent:
            return 1 if self.exponent > other.exponent else -1
        return (a > b) - (a < b)

    def _sign(self) -> int:
        return (self.significand > 0) - (self.significand < 0)

    def _cmp(self, other) -> int:
        return (self - self._coerce(other))._sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, (ScaledReal, int, float)):
            return NotImplemented
        other = self._coerce(other)
        return self.significand == other.significand and self.exponent == other.exponent

    def __hash__(self):
        return hash((self.significand, self.exponent))

    def __repr__(self) -> str:
        return f"ScaledReal({self.significand!r}, {self.exponent})"


class ScaledComplex:
    """Complex number with independently scaled real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: ScaledReal | float = 0.0, im: ScaledReal | float = 0.0):
        self.re = re if isinstance(re, ScaledReal) else ScaledReal(re)
        self.im = im if isinstance(im, ScaledReal) else ScaledReal(im)

    @classmethod
    def from_complex(cls, z: complex, exponent: int = 0) -> "ScaledComplex":
        """Value ``z * 2**exponent``."""
        z = complex(z)
        return cls(ScaledReal(z.real, exponent), ScaledReal(z.imag, exponent))

    @classmethod
    def from_polar(cls, modulus: ScaledReal, phase: float) -> "ScaledComplex":
        return cls(modulus * math.cos(phase), modulus * math.sin(phase))

    @staticmethod
    def _coerce(x) -> "ScaledComplex":
        if isinstance(x, ScaledComplex):
            return x
        if isinstance(x, ScaledReal):
            return ScaledComplex(x, ScaledReal(0.0))
        return ScaledComplex.from_complex(complex(x))

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def common_exponent(self) -> int:
        """Largest exponent among the nonzero parts (0 for an exact zero)."""
        exps = [p.exponent for p in (self.re, self.im) if not p.is_zero()]
        return max(exps) if exps else 0

    def mantissa_at(self, exponent: int) -> complex:
        return complex(self.re.mantissa_at(exponent), self.im.mantissa_at(exponent))

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __complex__(self) -> complex:
        return self.to_complex()

    def __neg__(self):
        return ScaledComplex(-self.re, -self.im)

    def conjugate(self) -> "ScaledComplex":
        return ScaledComplex(self.re, -self.im)

    def __add__(self, other):
        other = self._coerce(other)
        return ScaledComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return ScaledComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return ScaledComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        den = other.re * other.re + other.im * other.im
        num = self * other.conjugate()
        return ScaledComplex(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def ldexp(self, k: int) -> "ScaledComplex":
        return ScaledComplex(self.re.ldexp(k), self.im.ldexp(k))

    def __abs__(self) -> ScaledReal:
        e = self.common_exponent()
        return ScaledReal(abs(self.mantissa_at(e)), e)

    def arg(self) -> float:
        e = self.common_exponent()
        z = self.mantissa_at(e)
        return math.atan2(z.imag, z.real)

    def polar(self) -> tuple[ScaledReal, float]:
        return abs(self), self.arg()

    def __eq__(self, other):
        if not isinstance(other, ScaledComplex):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        return f"ScaledComplex({self.re!r}, {self.im!r})"


def scaled_array(values: np.ndarray, exponent: int = 0) -> list[ScaledComplex]:
    """Wrap ``values * 2**exponent`` element-wise."""
    return [ScaledComplex.from_complex(v, exponent) for v in np.ravel(values)]


# ---------------------------------------------------------------------------
# order bookkeeping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CylinderOrder:
    """Integer order ``0 <= n <= max_order``."""

    n: int
    max_order: int = DEFAULT_MAX_ORDER

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"order must be a non-negative integer, got {self.n!r}")
        if self.n > self.max_order:
            raise CapacityError(f"order {self.n} exceeds the maximum order {self.max_order}")


def _order(n, max_order: int = DEFAULT_MAX_ORDER) -> int:
    if isinstance(n, CylinderOrder):
        return n.n
    return CylinderOrder(int(n), max_order).n


def _harmonic(k: int) -> float:
    return math.fsum(1.0 / j for j in range(1, k + 1))


def _digamma_int(k: int) -> float:
    """psi(k) for positive integer k."""
    return _harmonic(k - 1) - EULER_GAMMA


def _power_prefactor(n: int, x: float) -> ScaledReal:
    """``(x/2)**n / n!`` carried in scaled form."""
    m, e = 1.0, 0
    h = 0.5 * x
    for k in range(1, n + 1):
        m *= h / k
        if not (2.0 ** -400 < abs(m) < 2.0 ** 400):
            m, de = math.frexp(m)
            e += de
    return ScaledReal(m, e)


def log2_power_prefactor(n: int, z):
    """``log2((z/2)**n / n!)`` for scalars or arrays."""
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore"):
        return n * np.log2(0.5 * z) - math.lgamma(n + 1) / _LN2


# ---------------------------------------------------------------------------
# first kind
# ---------------------------------------------------------------------------


def _jhat_series(n: int, q: float) -> float:
    """``J_n(x) / E_n(x)`` by the ascending series (well conditioned for q <= (n+1)/2)."""
    term, total = 1.0, 1.0
    for m in range(1, 400):
        term *= -q / (m * (n + m))
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
    return total


def _j_by_series(n: int, x: float) -> ScaledReal:
    return _power_prefactor(n, x) * _jhat_series(n, 0.25 * x * x)


def _miller_values(orders: list[int], x: float) -> dict[int, ScaledReal]:
    """J_k(x) for the requested orders via downward recurrence.

    The unnormalized sequence is anchored either at an order where the
    ascending series is well conditioned, or, for large x, normalized with
    ``J_0 + 2 * sum J_2k = 1``.
    """
    q = 0.25 * x * x
    lo, hi = min(orders), max(orders)
    anchor = max(hi, math.ceil(2.0 * q))
    use_sum_rule = anchor > hi + 2000
    top = (max(hi, int(x)) if use_sum_rule else anchor) + 40 + int(4.0 * math.sqrt(anchor if not use_sum_rule else x + hi))
    want = set(orders)
    stop = 0 if use_sum_rule else lo

    # downward recurrence with running exponent: value_k = v * 2**e
    v_next, v_cur, e = 0.0, 1e-300, 0
    stored: dict[int, tuple[float, int]] = {}
    anchor_value: tuple[float, int] | None = None
    even_sum = ScaledReal(0.0)
    for k in range(top, stop - 1, -1):
        if k in want:
            stored[k] = (v_cur, e)
        if k == anchor and not use_sum_rule:
            anchor_value = (v_cur, e)
        if use_sum_rule and k % 2 == 0:
            even_sum = even_sum + ScaledReal(v_cur if k == 0 else 2.0 * v_cur, e)
        if k == 0:
            break
        v_prev = (2.0 * k / x) * v_cur - v_next
        v_next, v_cur = v_cur, v_prev
        if abs(v_cur) > 2.0 ** 500:
            v_cur = math.ldexp(v_cur, -500)
            v_next = math.ldexp(v_next, -500)
            e += 500
    if use_sum_rule:
        norm = ScaledReal(1.0) / even_sum
    else:
        norm = _j_by_series(anchor, x) / ScaledReal(*anchor_value)
    return {k: ScaledReal(v, ek) * norm for k, (v, ek) in stored.items()}


def _j_values(orders: list[int], x: float) -> dict[int, ScaledReal]:
    """J_k(x), k >= 0, for a small set of orders."""
    q = 0.25 * x * x
    out: dict[int, ScaledReal] = {}
    hard = [k for k in orders if q > 0.5 * (k + 1)]
    for k in orders:
        if k not in hard:
            out[k] = _j_by_series(k, x)
    if hard:
        out.update(_miller_values(hard, x))
    return out


def _signed_order_j(values: dict[int, ScaledReal], k: int) -> ScaledReal:
    return -values[1] if k == -1 else values[k]


def _check_positive(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"argument must be finite and non-negative, got {x!r}")
    return x


def bessel_j(n, x: float, max_order: int = DEFAULT_MAX_ORDER) -> ScaledReal:
    """Bessel function of the first kind ``J_n(x)`` in scaled form.

    Parameters
    ----------
    n : int or CylinderOrder
        Non-negative order.
    x : float
        Argument, ``x >= 0``.
    """
    n = _order(n, max_order)
    x = _check_positive(x)
    if x == 0.0:
        return ScaledReal(1.0 if n == 0 else 0.0)
    return _j_values([n], x)[n]


def _choose_derivative(a_lo: ScaledReal, mid: ScaledReal, a_hi: ScaledReal) -> ScaledReal:
    """Pick between ``a_lo - mid`` and ``mid - a_hi`` by cancellation ratio."""
    first = a_lo - mid
    second = mid - a_hi

    def loss(a, b, d):
        if d.is_zero():
            return math.inf
        return (abs(a) + abs(b)).log2() - abs(d).log2()

    return first if loss(a_lo, mid, first) < loss(mid, a_hi, second) else second


def bessel_j_prime(n, x: float, max_order: int = DEFAULT_MAX_ORDER) -> ScaledReal:
    """Derivative ``J_n'(x)``.

    Both ``J_{n-1} - (n/x) J_n`` and ``(n/x) J_n - J_{n+1}`` are formed and
    the one with the smaller cancellation is returned.
    """
    n = _order(n, max_order)
    x = _check_positive(x)
    if x == 0.0:
        return ScaledReal(0.5 if n == 1 else 0.0)
    orders = sorted({abs(n - 1), n, n + 1, 1})
    vals = _j_values(orders, x)
    jn = vals[n]
    nx = jn * (n / x)
    return _choose_derivative(_signed_order_j(vals, n - 1), nx, vals[n + 1])


# ---------------------------------------------------------------------------
# second kind
# ---------------------------------------------------------------------------


def _y01_ascending(x: float) -> tuple[float, float]:
    q = 0.25 * x * x
    lx = math.log(0.5 * x)
    j0 = _jhat_series(0, q)
    j1 = 0.5 * x * _jhat_series(1, q)
    # Y0: (2/pi)(ln(x/2)+gamma) J0 + (2/pi) sum_{k>=1} (-1)^{k+1} H_k q^k / k!^2
    s0, term = 0.0, 1.0
    h = 0.0
    for k in range(1, 200):
        term *= -q / (k * k)
        h += 1.0 / k
        s0 -= h * term
        if abs(h * term) <= 1e-18 * max(abs(s0), 1e-300):
            break
    y0 = (2.0 / math.pi) * ((lx + EULER_GAMMA) * j0 + s0)
    # Y1: -2/(pi x) + (2/pi) ln(x/2) J1 - (x/(2 pi)) sum (psi(k+1)+psi(k+2)) (-q)^k / (k!(k+1)!)
    s1, w = 0.0, 1.0
    hk, hk1 = 0.0, 1.0
    for k in range(0, 200):
        if k > 0:
            w *= -q / (k * (k + 1))
            hk += 1.0 / k
            hk1 += 1.0 / (k + 1)
        t = (hk + hk1 - 2.0 * EULER_GAMMA) * w
        s1 += t
        if k > 2 and abs(t) <= 1e-18 * max(abs(s1), 1e-300):
            break
    y1 = -2.0 / (math.pi * x) + (2.0 / math.pi) * lx * j1 - (x / (2.0 * math.pi)) * s1
    return y0, y1


def _y01_neumann(x: float) -> tuple[float, float]:
    """Y0, Y1 from Neumann sums over first-kind values (no cancellation for x > 2)."""
    top = int(x) + 60 + int(6.0 * math.sqrt(x))
    vals = _miller_values(list(range(0, top - 30)), x)
    j = [float(vals[k]) for k in range(0, top - 30)]
    c = math.log(0.5 * x) + EULER_GAMMA
    s0 = math.fsum(((-1) ** k) * j[2 * k] / k for k in range(1, (len(j) - 1) // 2 + 1))
    y0 = (2.0 / math.pi) * (c * j[0]) - (4.0 / math.pi) * s0
    s1 = math.fsum(
        ((-1) ** (m + 1)) * (2 * m + 1) / (m * (m + 1)) * j[2 * m + 1]
        for m in range(1, (len(j) - 2) // 2 + 1)
    )
    y1 = (2.0 / math.pi) * ((c - 1.0) * j[1] - j[0] / x + s1)
    return y0, y1


def _y_values(n_hi: int, x: float, want: set[int]) -> dict[int, ScaledReal]:
    """Y_k(x) for k in ``want`` (0 <= k <= n_hi) by upward recurrence."""
    y0, y1 = _y01_ascending(x) if x <= 2.0 else _y01_neumann(x)
    out = {}
    if 0 in want:
        out[0] = ScaledReal(y0)
    if 1 in want:
        out[1] = ScaledReal(y1)
    a, b, e = y0, y1, 0
    for k in range(1, n_hi):
        a, b = b, (2.0 * k / x) * b - a
        if abs(b) > 2.0 ** 500:
            a, b, e = math.ldexp(a, -500), math.ldexp(b, -500), e + 500
        if k + 1 in want:
            out[k + 1] = ScaledReal(b, e)
    return out


def bessel_y(n, x: float, max_order: int = DEFAULT_MAX_ORDER) -> ScaledReal:
    """Bessel function of the second kind ``Y_n(x)``, ``x > 0``."""
    n = _order(n, max_order)
    x = _check_positive(x)
    if x == 0.0:
        raise SingularityError("Y_n diverges at x = 0")
    return _y_values(max(n, 1), x, {n})[n]


def bessel_y_prime(n, x: float, max_order: int = DEFAULT_MAX_ORDER) -> ScaledReal:
    n = _order(n, max_order)
    x = _check_positive(x)
    if x == 0.0:
        raise SingularityError("Y_n' diverges at x = 0")
    vals = _y_values(n + 1, x, {abs(n - 1), n, n + 1, 1})
    lo = -vals[1] if n == 0 else vals[n - 1]
    return _choose_derivative(lo, vals[n] * (n / x), vals[n + 1])


def hankel1(n, x: float, max_order: int = DEFAULT_MAX_ORDER) -> ScaledComplex:
    """Hankel function ``H_n^(1)(x) = J_n(x) + i Y_n(x)``."""
    n = _order(n, max_order)
    x = _check_positive(x)
    if x == 0.0:
        raise SingularityError("Hankel function diverges at x = 0")
    return ScaledComplex(bessel_j(n, x, max_order), bessel_y(n, x, max_order))


def hankel1_prime(n, x: float, max_order: int = DEFAULT_MAX_ORDER) -> ScaledComplex:
    n = _order(n, max_order)
    x = _check_positive(x)
    if x == 0.0:
        raise SingularityError("Hankel function diverges at x = 0")
    return ScaledComplex(bessel_j_prime(n, x, max_order), bessel_y_prime(n, x, max_order))


# ---------------------------------------------------------------------------
# independent truncated-series oracles (validation only)
# ---------------------------------------------------------------------------


def series_j_oracle(n: int, x: float, terms: int = 40) -> ScaledReal:
    """Truncated ascending series ``sum_m (-1)^m (x/2)^(n+2m) / (m! (n+m)!)``.

    Valid for ``0 <= x <= 1``; the first omitted term is checked against the sum.
    """
    n = int(n)
    x = float(x)
    if n < 0 or not (0.0 <= x <= 1.0) or terms < 1:
        raise DomainError("series_j_oracle needs n >= 0, 0 <= x <= 1, terms >= 1")
    if x == 0.0:
        return ScaledReal(1.0 if n == 0 else 0.0)
    half = ScaledReal(0.5 * x)
    total = ScaledReal(0.0)
    for m in range(terms + 1):
        mag = half ** (n + 2 * m) / ScaledReal.from_log2(
            (math.lgamma(m + 1) + math.lgamma(n + m + 1)) / _LN2
        )
        # exact factorials for the small orders that dominate the sum
        if m + n <= 170:
            mag = half ** (n + 2 * m) / (float(math.factorial(m)) * float(math.factorial(n + m)))
        term = mag if m % 2 == 0 else -mag
        if m == terms:
            if abs(term).compare_magnitude(abs(total) * 1e-15) > 0:
                raise DomainError("series_j_oracle truncation remainder too large")
            break
        total = total + term
    return total


def series_h_oracle(n: int, x: float, terms: int = 3) -> ScaledComplex:
    """Small-argument Hankel form for ``n >= 4``, ``0 < x <= 0.2``.

    Imaginary part: ``-(2^n (n-1)! / (pi x^n)) * [1 + x^2/(4(n-1)) + x^4/(32(n-1)(n-2)) + ...]``
    with ``terms`` bracket terms; real part from :func:`series_j_oracle`.
    """
    n = int(n)
    x = float(x)
    if n < 4 or not (0.0 < x <= 0.2) or terms < 1:
        raise DomainError("series_h_oracle needs n >= 4 and 0 < x <= 0.2")
    q = 0.25 * x * x
    bracket, coef = 0.0, 1.0
    for k in range(min(terms, n)):
        if k > 0:
            coef *= q / (k * (n - k))
        bracket += coef
    lead = ScaledReal(2.0) ** n * float(math.factorial(n - 1)) / (math.pi * ScaledReal(x) ** n)
    return ScaledComplex(series_j_oracle(n, min(x, 1.0), 40), -(lead * bracket))


# ---------------------------------------------------------------------------
# normalized small-argument forms
# ---------------------------------------------------------------------------


def _series_threshold(n: int) -> float:
    """Largest q for which the normalized ascending series are used."""
    return max(2.0, n / 8.0)


def _jhat_tail_vec(n: int, q: np.ndarray) -> np.ndarray:
    term = np.ones_like(q)
    tail = np.zeros_like(q)
    for m in range(1, 400):
        term = term * (-q / (m * (n + m)))
        tail = tail + term
        if np.all(np.abs(term) <= 1e-18 * np.abs(tail)):
            break
    return tail


def _f_tail_vec(n: int, z: np.ndarray, q: np.ndarray, jhat_n: np.ndarray) -> np.ndarray:
    """F_n(z) - 1 for n >= 1 by the ascending series."""
    tail = np.zeros_like(q)
    t = np.ones_like(q)
    for k in range(1, n):
        t = t * (q / (k * (n - k)))
        tail = tail + t
        if np.all(t <= 1e-18 * tail):
            break
    # logarithmic part: q^n / ((n-1)! n!) * [sum_k (psi(k+1)+psi(n+k+1)) (-q)^k n!/(k!(n+k)!) - 2 ln(z/2) Jh_n]
    with np.errstate(divide="ignore", under="ignore"):
        log_coef = n * np.log(q) - math.lgamma(n) - math.lgamma(n + 1)
        coef = np.where(log_coef > -745.0, np.exp(np.maximum(log_coef, -745.0)), 0.0)
    if np.any(coef > 0.0):
        psi_a = -EULER_GAMMA
        psi_b = _digamma_int(n + 1)
        w = np.ones_like(q)
        s = (psi_a + psi_b) * w
        for k in range(1, 400):
            w = w * (-q / (k * (n + k)))
            psi_a += 1.0 / k
            psi_b += 1.0 / (n + k)
            step = (psi_a + psi_b) * w
            s = s + step
            if np.all(np.abs(step) <= 1e-18 * np.maximum(np.abs(s), 1e-300)):
                break
        tail = tail + coef * (s - 2.0 * np.log(0.5 * z) * jhat_n)
    return tail


def _direct_hats(n: int, z: float) -> tuple[float, float, float, float]:
    """(Jh_n, Jh_{n+1}, F_n, F_{n-1}) from the direct scaled evaluators."""
    jv = _j_values([n, n + 1], z)
    yv = _y_values(n, z, {n - 1, n})
    e_n = _power_prefactor(n, z)
    e_m = _power_prefactor(n - 1, z)
    e_p = _power_prefactor(n + 1, z)
    jh = float(jv[n] / e_n)
    jh1 = float(jv[n + 1] / e_p)
    f_n = float(-(math.pi * n) * e_n * yv[n])
    f_m = float(-(math.pi * (n - 1)) * e_m * yv[n - 1])
    return jh, jh1, f_n, f_m


@dataclass(frozen=True)
class NormalizedCylinder:
    """Normalized cylinder-function data at an array of arguments ``z``.

    Attributes ending in ``_tail`` are the departures from 1; ``d_*`` are
    z-derivatives of the corresponding normalized function.
    """

    n: int
    z: np.ndarray
    jh: np.ndarray
    jh_tail: np.ndarray
    dj: np.ndarray
    dj_tail: np.ndarray
    f: np.ndarray
    f_tail: np.ndarray
    dy: np.ndarray
    dy_tail: np.ndarray
    d_jh: np.ndarray
    d_dj: np.ndarray
    d_f: np.ndarray
    d_dy: np.ndarray


@dataclass(frozen=True)
class NormalizedFirstKind:
    """Normalized first-kind data ``Jh_n, DJ_n`` and their z-derivatives."""

    n: int
    z: np.ndarray
    jh: np.ndarray
    jh_tail: np.ndarray
    dj: np.ndarray
    dj_tail: np.ndarray
    d_jh: np.ndarray
    d_dj: np.ndarray


def normalized_first_kind(n: int, z) -> NormalizedFirstKind:
    """Normalized forms of ``J_n`` and ``J_n'`` for ``n >= 1`` and ``z >= 0``."""
    n = _order(n)
    if n < 1:
        raise DomainError("normalized first-kind forms are defined for n >= 1")
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z < 0.0) or not np.all(np.isfinite(z)):
        raise DomainError("normalized forms need non-negative finite arguments")
    q = 0.25 * z * z
    small = q <= _series_threshold(n)
    jh_tail = np.empty_like(z)
    jh1 = np.empty_like(z)
    if np.any(small):
        jh_tail[small] = _jhat_tail_vec(n, q[small])
        jh1[small] = 1.0 + _jhat_tail_vec(n + 1, q[small])
    for idx in np.flatnonzero(~small):
        x = float(z[idx])
        jv = _j_values([n, n + 1], x)
        jh_tail[idx] = float(jv[n] / _power_prefactor(n, x)) - 1.0
        jh1[idx] = float(jv[n + 1] / _power_prefactor(n + 1, x))
    jh = 1.0 + jh_tail
    dj_tail = jh_tail - z * z * jh1 / (2.0 * n * (n + 1))
    return NormalizedFirstKind(
        n=n, z=z, jh=jh, jh_tail=jh_tail, dj=1.0 + dj_tail, dj_tail=dj_tail,
        d_jh=-z * jh1 / (2.0 * (n + 1)),
        d_dj=z * (jh1 / (2.0 * (n + 1)) - jh / n),
    )


def normalized_cylinder(n: int, z) -> NormalizedCylinder:
    """Evaluate the normalized forms of J, J', Y, Y' for ``n >= 2``.

    Parameters
    ----------
    n : int
        Order, ``2 <= n <= max order``.
    z : array_like
        Positive arguments.
    """
    n = _order(n)
    if n < 2:
        raise DomainError("normalized forms are defined for n >= 2")
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z <= 0.0) or not np.all(np.isfinite(z)):
        raise DomainError("normalized forms need positive finite arguments")
    q = 0.25 * z * z
    small = q <= _series_threshold(n)

    jh_tail = np.empty_like(z)
    jh1 = np.empty_like(z)
    f_tail = np.empty_like(z)
    fm = np.empty_like(z)
    if np.any(small):
        zs, qs = z[small], q[small]
        t_n = _jhat_tail_vec(n, qs)
        t_n1 = _jhat_tail_vec(n + 1, qs)
        t_m = _jhat_tail_vec(n - 1, qs)
        jh_tail[small] = t_n
        jh1[small] = 1.0 + t_n1
        f_tail[small] = _f_tail_vec(n, zs, qs, 1.0 + t_n)
        fm[small] = 1.0 + _f_tail_vec(n - 1, zs, qs, 1.0 + t_m)
    for idx in np.flatnonzero(~small):
        a, b, c, d = _direct_hats(n, float(z[idx]))
        jh_tail[idx], jh1[idx], f_tail[idx], fm[idx] = a - 1.0, b, c - 1.0, d

    jh = 1.0 + jh_tail
    f = 1.0 + f_tail
    dj_tail = jh_tail - z * z * jh1 / (2.0 * n * (n + 1))
    dy_tail = f_tail - z * z * fm / (2.0 * n * (n - 1))
    d_jh = -z * jh1 / (2.0 * (n + 1))
    d_dj = z * (jh1 / (2.0 * (n + 1)) - jh / n)
    d_f = z * fm / (2.0 * (n - 1))
    d_dy = z * (f / n - fm / (2.0 * (n - 1)))
    return NormalizedCylinder(
        n=n, z=z, jh=jh, jh_tail=jh_tail, dj=1.0 + dj_tail, dj_tail=dj_tail,
        f=f, f_tail=f_tail, dy=1.0 + dy_tail, dy_tail=dy_tail,
        d_jh=d_jh, d_dj=d_dj, d_f=d_f, d_dy=d_dy,
    )


# ---------------------------------------------------------------------------
# Lambert W, lower real branch
# ---------------------------------------------------------------------------

_INV_E = math.exp(-1.0)


def lambert_w_minus1(z: float) -> float:
    """Lower real branch ``W_{-1}(z)`` for ``-1/e <= z < 0``.

    Halley iteration, seeded by the branch-point expansion near ``-1/e``
    and by the log-log asymptotic form near ``0-``.
    """
    z = float(z)
    if not (-_INV_E - 1e-17 <= z < 0.0) or not math.isfinite(z):
        raise DomainError(f"W_-1 needs -1/e <= z < 0, got {z!r}")
    if z <= -_INV_E:
        return -1.0
    if z < -0.25:
        p = -math.sqrt(max(2.0 * (1.0 + math.e * z), 0.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    else:
        l1 = math.log(-z)
        l2 = math.log(-l1)
        w = l1 - l2 + l2 / l1
    for _ in range(100):
        if w > -1.0:
            w = -1.0 - 1e-12
        ew = math.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        step = f / denom
        w -= step
        if abs(step) <= 4e-16 * abs(w):
            break
    return w
