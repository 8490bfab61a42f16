"""Partial Bell polynomials and the multi-index sets of the averaging
recurrences.

``enumerate_S(l)`` lists the tuples (b_1, ..., b_l) of non-negative
integers with b_1 + 2 b_2 + ... + l b_l = l; they index the terms of the
l-th order derivative cascade.  ``bell_partial`` evaluates B_{p,q} from
its defining sum.
"""

from dataclasses import dataclass
from functools import lru_cache

__all__ = ["MAX_ORDER", "factorial", "PartitionTuple", "enumerate_S",
           "bell_partial"]

# Orders are capped well above the k <= 7 used in practice; factorials
# stay exact integers.
MAX_ORDER = 12

_FACT = [1]
for _j in range(1, MAX_ORDER + 1):
    _FACT.append(_FACT[-1] * _j)


def factorial(n):
    if not 0 <= n <= MAX_ORDER:
        raise ValueError(f"factorial supported for 0..{MAX_ORDER}, got {n}")
    return _FACT[n]


@dataclass(frozen=True)
class PartitionTuple:
    """One multi-index (b_1, ..., b_l) with b_1 + 2 b_2 + ... + l b_l = l."""

    b: tuple
    l: int

    @property
    def L(self):
        return sum(self.b)


def _weighted_tuples(length, weight, extra=None):
    """All tuples (b_1..b_length) with sum m*b_m = weight, descending
    lexicographic; ``extra`` optionally constrains sum b_m."""
    out = []
    buf = [0] * length

    def rec(m, rem):
        if m == length:
            buf[m - 1] = 0
            if rem % m == 0 and (extra is None or sum(buf[:-1]) + rem // m == extra):
                buf[m - 1] = rem // m
                out.append(tuple(buf))
            return
        for bm in range(rem // m, -1, -1):
            buf[m - 1] = bm
            rec(m + 1, rem - m * bm)

    if length == 0:
        return [()] if weight == 0 else []
    rec(1, weight)
    return out


@lru_cache(maxsize=None)
def enumerate_S(l):
    """The set S_l as a tuple of PartitionTuple, in a fixed deterministic
    (descending lexicographic) order."""
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    if l > MAX_ORDER:
        raise ValueError(f"l must be <= {MAX_ORDER}, got {l}")
    return tuple(PartitionTuple(b, l) for b in _weighted_tuples(l, l))


def bell_partial(p, q, x):
    """Partial Bell polynomial B_{p,q}(x_1, ..., x_{p-q+1}).

    Sum over tuples with b_1 + 2 b_2 + ... = p and b_1 + b_2 + ... = q of
    p!/(b_1! ... b_{p-q+1}!) * prod (x_j / j!)^{b_j}.
    """
    if not 1 <= q <= p:
        raise ValueError(f"need 1 <= q <= p, got p={p}, q={q}")
    if p > MAX_ORDER:
        raise ValueError(f"p must be <= {MAX_ORDER}, got {p}")
    x = tuple(x)
    if len(x) != p - q + 1:
        raise ValueError(f"x must have length p-q+1 = {p - q + 1}, "
                         f"got {len(x)}")
    total = 0.0
    for b in _weighted_tuples(p - q + 1, p, extra=q):
        # integer multinomial weight p! / prod(b_j! * (j!)^b_j)
        den = 1
        for j, bj in enumerate(b, start=1):
            den *= _FACT[bj] * _FACT[j] ** bj
        term = _FACT[p] / den
        for j, bj in enumerate(b, start=1):
            if bj:
                term *= x[j - 1] ** bj
        total += term
    return total
