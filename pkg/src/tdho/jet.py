"""Truncated multivariate Taylor series ("jets") about the all-ones point.

A jet in v variables with orders (d1, ..., dv) stores the coefficients of
prod_i (mu_i - 1)^k_i for every k_i <= d_i. Box truncation is closed under
multiplication, so products are exact within the stored orders.

Coefficient arrays may carry trailing batch axes: a jet then represents one
series per batch element, and all arithmetic broadcasts over the batch.

Coefficients are float64 by default; ``np.longdouble`` arrays are kept as
they are, for extra working precision where the platform provides it.
Object arrays of ``fractions.Fraction`` are also accepted for exact
arithmetic; ``exp`` and non-integer powers then require a unit constant
term.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import CompositionDomainError


class Jet:
    __slots__ = ("c", "nvars")

    def __init__(self, coeffs, nvars: int | None = None):
        c = np.asarray(coeffs)
        self.c = c if c.dtype in (object, np.longdouble) else c.astype(float)
        self.nvars = self.c.ndim if nvars is None else nvars

    # -- construction -------------------------------------------------------

    @classmethod
    def constant(cls, value, orders: Sequence[int], exact: bool = False) -> "Jet":
        value = _as_coeffs(value, exact)
        c = np.zeros(tuple(d + 1 for d in orders) + value.shape, dtype=value.dtype)
        c[(0,) * len(orders)] = value
        return cls(c, len(orders))

    @classmethod
    def variable(cls, i: int, orders: Sequence[int], exact: bool = False,
                 dtype=float) -> "Jet":
        """The jet of mu_i itself, i.e. 1 + (mu_i - 1)."""
        one = Fraction(1) if exact else 1.0
        c = np.zeros(tuple(d + 1 for d in orders), dtype=object if exact else dtype)
        c[...] = 0 * one
        c[(0,) * len(orders)] = one
        if orders[i] >= 1:
            idx = [0] * len(orders)
            idx[i] = 1
            c[tuple(idx)] = one
        return cls(c, len(orders))

    @property
    def exact(self) -> bool:
        return self.c.dtype == object

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(s - 1 for s in self.c.shape[: self.nvars])

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.c.shape[self.nvars:]

    @property
    def const(self) -> np.ndarray:
        return self.c[(0,) * self.nvars]

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.orders != self.orders:
                raise ValueError(f"jet orders differ: {self.orders} vs {other.orders}")
            return other
        return Jet.constant(other, self.orders, exact=self.exact)

    def _bcast(self, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        nv = self.nvars
        batch = np.broadcast_shapes(a.shape[nv:], b.shape[nv:])

        def pad(x):
            missing = len(batch) - (x.ndim - nv)
            return x.reshape(x.shape[:nv] + (1,) * missing + x.shape[nv:])

        a, b = pad(a), pad(b)
        return (np.broadcast_to(a, a.shape[:nv] + batch), np.broadcast_to(b, b.shape[:nv] + batch))

    def __add__(self, other) -> "Jet":
        o = self._coerce(other)
        a, b = self._bcast(self.c, o.c)
        return Jet(a + b, self.nvars)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(-self.c, self.nvars)

    def __sub__(self, other) -> "Jet":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            c, v = self._lift(other)
            return Jet(c * v, self.nvars)
        o = self._coerce(other)
        a, b = self.c, o.c
        ia, ib = _nonzero_indices(a, self.nvars), _nonzero_indices(b, self.nvars)
        # iterate over the sparser operand
        if len(ia) > len(ib):
            a, b, ia = b, a, ib
        a, b = self._bcast(a, b)
        out = np.zeros_like(a)
        shape = a.shape[: self.nvars]
        for k in ia:
            dst = tuple(slice(ki, None) for ki in k)
            src = tuple(slice(0, s - ki) for s, ki in zip(shape, k))
            out[dst] += a[k] * b[src]
        return Jet(out, self.nvars)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return self * other.reciprocal()
        c, v = self._lift(other)
        return Jet(c / v, self.nvars)

    def _lift(self, value) -> tuple[np.ndarray, np.ndarray]:
        # batch-shaped scalars broadcast against the trailing axes only
        v = _as_coeffs(value, self.exact)
        c = self.c
        extra = v.ndim - (c.ndim - self.nvars)
        if extra > 0:
            c = c.reshape(c.shape[: self.nvars] + (1,) * extra + c.shape[self.nvars:])
        return c, v.reshape((1,) * self.nvars + v.shape)

    # -- composition with scalar functions ------------------------------------

    @property
    def _max_power(self) -> int:
        # (mu - 1)-part is nilpotent: powers above the summed orders vanish
        return sum(self.orders)

    def compose(self, taylor: Sequence) -> "Jet":
        """h(self) given taylor[k] = h^(k)(c0) / k! at the constant term c0.

        Horner evaluation in the zero-constant part g = self - c0.
        """
        K = min(len(taylor) - 1, self._max_power)
        g = Jet(self.c.copy(), self.nvars)
        g.c[(0,) * self.nvars] = Fraction(0) if self.exact else 0.0
        acc = Jet.constant(taylor[K], self.orders, self.exact)
        for k in range(K - 1, -1, -1):
            acc = acc * g + Jet.constant(taylor[k], self.orders, self.exact)
        return acc

    def exp(self) -> "Jet":
        """exp(self) via the coefficient recurrence of h' = h f'."""
        if self.exact:
            if np.any(self.const != 0):
                raise CompositionDomainError("exact exp needs a zero constant term")
            h0 = Fraction(1)
        else:
            h0 = np.exp(self.const)
        return self._recur(h0, lambda ki, ji: ki - ji, None)

    def power(self, alpha: float) -> "Jet":
        """self**alpha via the coefficient recurrence of f h' = alpha h f'."""
        c0 = self.const
        if alpha != int(alpha) and np.any(c0 <= 0):
            raise CompositionDomainError(
                f"non-integer power {alpha} of a jet with non-positive constant term")
        if alpha < 0 and np.any(c0 == 0):
            raise CompositionDomainError(f"negative power {alpha} of a jet with zero constant term")
        if self.exact:
            if alpha != int(alpha) and np.any(c0 != 1):
                raise CompositionDomainError("exact non-integer power needs a unit constant term")
            alpha = Fraction(alpha)
            h0 = np.vectorize(lambda v: v ** int(alpha) if alpha.denominator == 1 else Fraction(1),
                              otypes=[object])(c0)
        else:
            h0 = np.power(c0, alpha)
        return self._recur(h0, lambda ki, ji: alpha * ki - (alpha + 1) * ji, c0)

    def _recur(self, h0, weight, f0) -> "Jet":
        # h_k = sum_{j <= k} weight(k_i, j_i) f_{k-j} h_j / (k_i [f0]), picking
        # any axis i with k_i > 0; h_k itself is still zero on the right side
        nv = self.nvars
        f = self.c
        h = np.zeros(f.shape[:nv] + np.shape(h0), dtype=f.dtype)
        f, h = self._bcast(f, h)
        h = h.copy()
        if self.exact:
            h[...] = Fraction(0)
        h[(0,) * nv] = h0
        nb = h.ndim - nv
        for k in np.ndindex(*f.shape[:nv]):
            if not any(k):
                continue
            i = max(range(nv), key=lambda a: k[a])
            box = tuple(slice(0, ka + 1) for ka in k)
            rev = tuple(slice(ka, None, -1) if ka > 0 else slice(0, 1) for ka in k)
            ji = np.arange(k[i] + 1, dtype=f.dtype).reshape(
                (1,) * i + (-1,) + (1,) * (nv - i - 1 + nb))
            prod = weight(k[i], ji) * f[rev] * h[box]
            val = prod.reshape((-1,) + h.shape[nv:]).sum(axis=0) / k[i]
            h[k] = val if f0 is None else val / f0
        return Jet(h, nv)

    def inv_sqrt(self) -> "Jet":
        return self.power(-0.5)

    def reciprocal(self) -> "Jet":
        return self.power(-1.0)

    # -- read-out -------------------------------------------------------------

    def coeff(self, idx: Sequence[int]):
        return self.c[tuple(idx)]

    def derivative(self, idx: Sequence[int]):
        """Mixed partial derivative d^|idx| / prod d mu_i^idx_i at the all-ones point."""
        scale = math.prod(math.factorial(k) for k in idx)
        return self.c[tuple(idx)] * scale

    def __repr__(self) -> str:
        return f"Jet(orders={self.orders}, batch={self.batch_shape})"


def _as_coeffs(value, exact: bool) -> np.ndarray:
    arr = np.asarray(value)
    if exact or arr.dtype == object:
        if arr.dtype != object:
            arr = np.vectorize(Fraction, otypes=[object])(arr) if arr.ndim else \
                np.array(Fraction(value), dtype=object)
        return arr
    return arr.astype(float)


def _nonzero_indices(a: np.ndarray, nvars: int) -> Iterable[tuple[int, ...]]:
    shape = a.shape[:nvars]
    flat = a.reshape(shape + (-1,)) if a.ndim > nvars else a[..., None]
    mask = np.any(flat != 0, axis=-1)
    return [tuple(int(i) for i in k) for k in zip(*np.nonzero(mask))]


def multi_indices(orders: Sequence[int]):
    return itertools.product(*(range(d + 1) for d in orders))
