"""Multiprecision real/complex scalars with explicit per-value precision.

Values wrap gmpy2 (MPFR/MPC) numbers together with the binary precision they
were produced at.  Arithmetic between operands of different precision is
carried out at the maximum of the two precisions, so mixed expressions never
silently truncate.  gmpy2 contexts are thread-local, which keeps every
operation here safe to call from concurrent workers.
"""

from __future__ import annotations

from typing import Union

import gmpy2
from gmpy2 import mpc, mpfr

MIN_PRECISION_BITS = 64

Number = Union["MPReal", "MPComplex", int, float, str]


class raw_precision:
    """Set the thread-local gmpy2 precision for a raw-arithmetic block.

    Cheaper than per-operation contexts; used by the dense kernels
    (factorizations, quadrature loops, polynomial evaluation).
    """

    __slots__ = ("bits", "allow_complex", "_old_bits", "_old_cplx")

    def __init__(self, bits: int, allow_complex: bool = False):
        self.bits = int(bits)
        self.allow_complex = allow_complex

    def __enter__(self):
        ctx = gmpy2.get_context()
        self._old_bits = ctx.precision
        self._old_cplx = ctx.allow_complex
        ctx.precision = self.bits
        if self.allow_complex:
            ctx.allow_complex = True
        return ctx

    def __exit__(self, *exc):
        ctx = gmpy2.get_context()
        ctx.precision = self._old_bits
        ctx.allow_complex = self._old_cplx
        return False


def _bits_of(x) -> int:
    if isinstance(x, (MPReal, MPComplex)):
        return x.precision_bits
    return MIN_PRECISION_BITS


def _raw_of(x):
    if isinstance(x, (MPReal, MPComplex)):
        return x._v
    if isinstance(x, complex):
        return mpc(x)
    return x  # int/float/str/mpfr handled by gmpy2 coercion


def _wrap(value, bits: int):
    if isinstance(value, mpc):
        if value.imag == 0:
            return MPReal(value.real, bits)
        return MPComplex(value, bits)
    return MPReal(value, bits)


class MPReal:
    """A real scalar carried at a fixed binary precision (>= 64 bits)."""

    __slots__ = ("_v", "precision_bits")

    def __init__(self, value: Number = 0, precision_bits: int | None = None):
        if precision_bits is None:
            precision_bits = _bits_of(value) if isinstance(value, (MPReal, MPComplex)) else MIN_PRECISION_BITS
        bits = max(int(precision_bits), MIN_PRECISION_BITS)
        if isinstance(value, MPComplex):
            raise TypeError("cannot build MPReal from MPComplex")
        raw = value._v if isinstance(value, MPReal) else value
        with raw_precision(bits):
            self._v = mpfr(raw)
        self.precision_bits = bits

    @property
    def value(self) -> mpfr:
        return self._v

    # -- arithmetic ---------------------------------------------------------
    def _binop(self, other, op, reflected=False):
        if isinstance(other, complex):
            other = MPComplex(other, MIN_PRECISION_BITS)
        bits = max(self.precision_bits, _bits_of(other), MIN_PRECISION_BITS)
        a, b = self._v, _raw_of(other)
        if reflected:
            a, b = b, a
        with raw_precision(bits):
            return _wrap(op(a, b), bits)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: a - b, reflected=True)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binop(other, lambda a, b: a / b, reflected=True)

    def __pow__(self, other):
        return self._binop(other, lambda a, b: a ** b)

    def __rpow__(self, other):
        return self._binop(other, lambda a, b: a ** b, reflected=True)

    def __neg__(self):
        return MPReal(-self._v, self.precision_bits)

    def __pos__(self):
        return self

    def __abs__(self):
        return MPReal(abs(self._v), self.precision_bits)

    # -- comparisons (exact, precision independent) -------------------------
    def __eq__(self, other):
        return self._v == _raw_of(other)

    def __ne__(self, other):
        return self._v != _raw_of(other)

    def __lt__(self, other):
        return self._v < _raw_of(other)

    def __le__(self, other):
        return self._v <= _raw_of(other)

    def __gt__(self, other):
        return self._v > _raw_of(other)

    def __ge__(self, other):
        return self._v >= _raw_of(other)

    def __hash__(self):
        return hash(self._v)

    def __float__(self):
        return float(self._v)

    def __int__(self):
        return int(self._v)

    def __repr__(self):
        return f"MPReal({format_scalar(self._v, 17)!r}, {self.precision_bits})"


class MPComplex:
    """A complex scalar stored as an explicit (re, im) pair at fixed precision."""

    __slots__ = ("_v", "precision_bits")

    def __init__(self, value=0, precision_bits: int | None = None, imag=None):
        if precision_bits is None:
            precision_bits = _bits_of(value) if isinstance(value, (MPReal, MPComplex)) else MIN_PRECISION_BITS
            if imag is not None:
                precision_bits = max(precision_bits, _bits_of(imag))
        bits = max(int(precision_bits), MIN_PRECISION_BITS)
        re = _raw_of(value)
        with raw_precision(bits):
            if imag is not None:
                self._v = mpc(mpfr(re), mpfr(_raw_of(imag)))
            else:
                self._v = mpc(re)
        self.precision_bits = bits

    @property
    def value(self) -> mpc:
        return self._v

    @property
    def real(self) -> MPReal:
        return MPReal(self._v.real, self.precision_bits)

    @property
    def imag(self) -> MPReal:
        return MPReal(self._v.imag, self.precision_bits)

    def conjugate(self) -> "MPComplex":
        return MPComplex(self._v.conjugate(), self.precision_bits)

    def _binop(self, other, op, reflected=False):
        bits = max(self.precision_bits, _bits_of(other), MIN_PRECISION_BITS)
        a, b = self._v, _raw_of(other)
        if reflected:
            a, b = b, a
        with raw_precision(bits):
            return MPComplex(op(a, b), bits)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: a - b, reflected=True)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binop(other, lambda a, b: a / b, reflected=True)

    def __pow__(self, other):
        return self._binop(other, lambda a, b: a ** b)

    def __neg__(self):
        return MPComplex(-self._v, self.precision_bits)

    def __abs__(self) -> MPReal:
        with raw_precision(self.precision_bits):
            return MPReal(abs(self._v), self.precision_bits)

    def __eq__(self, other):
        return self._v == _raw_of(other)

    def __ne__(self, other):
        return self._v != _raw_of(other)

    def __hash__(self):
        return hash(self._v)

    def __complex__(self):
        return complex(self._v)

    def __repr__(self):
        return f"MPComplex({complex(self._v)!r}, {self.precision_bits})"


# -- elementary functions at operand precision ------------------------------

def _apply(fn, x: Number, extra_bits: int = 0):
    bits = max(_bits_of(x), MIN_PRECISION_BITS)
    with raw_precision(bits + extra_bits, allow_complex=True):
        out = fn(_raw_of(x))
    with raw_precision(bits):
        return _wrap(mpc(out) if isinstance(out, mpc) else mpfr(out), bits)


def sqrt(x):  # noqa: A001 - deliberate shadow, namespaced use
    return _apply(gmpy2.sqrt, x)


def exp(x):
    return _apply(gmpy2.exp, x)


def log(x):
    return _apply(gmpy2.log, x)


def sin(x):
    return _apply(gmpy2.sin, x)


def cos(x):
    return _apply(gmpy2.cos, x)


def tan(x):
    return _apply(gmpy2.tan, x)


def asin(x):
    return _apply(gmpy2.asin, x)


def acos(x):
    return _apply(gmpy2.acos, x)


def atan(x):
    return _apply(gmpy2.atan, x)


def atan2(y, x):
    bits = max(_bits_of(y), _bits_of(x), MIN_PRECISION_BITS)
    with raw_precision(bits):
        return MPReal(gmpy2.atan2(_raw_of(y), _raw_of(x)), bits)


def pi(bits: int = MIN_PRECISION_BITS) -> MPReal:
    bits = max(int(bits), MIN_PRECISION_BITS)
    with raw_precision(bits):
        return MPReal(gmpy2.const_pi(), bits)


def sinc(x):
    """sin(t)/t with the removable singularity at t = 0."""
    bits = max(_bits_of(x), MIN_PRECISION_BITS)
    t = _raw_of(x)
    with raw_precision(bits + 8):
        t = mpfr(t)
        if t == 0:
            return MPReal(1, bits)
        v = gmpy2.sin(t) / t
    return MPReal(v, bits)


def exp_i_pi(t):
    """e^{i*pi*t} as an MPComplex at the precision of t (with guard bits)."""
    bits = max(_bits_of(t), MIN_PRECISION_BITS)
    with raw_precision(bits + 16):
        arg = gmpy2.const_pi() * mpfr(_raw_of(t))
        s, c = gmpy2.sin(arg), gmpy2.cos(arg)
    with raw_precision(bits):
        return MPComplex(mpc(mpfr(c), mpfr(s)), bits)


def format_scalar(v, digits: int = 12) -> str:
    """Decimal string of a gmpy2 scalar with the requested significant digits."""
    if isinstance(v, (MPReal, MPComplex)):
        v = v._v
    if isinstance(v, mpc):
        return f"{format_scalar(v.real, digits)}{'+' if v.imag >= 0 else '-'}{format_scalar(abs(v.imag), digits)}j"
    if gmpy2.is_nan(v) or gmpy2.is_infinite(v):
        return str(float(v))
    return gmpy2.mpfr(v).__format__(f".{digits}g")
