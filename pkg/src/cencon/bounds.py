"""Thom-Milnor component bounds in exact integer arithmetic."""

from __future__ import annotations

from dataclasses import dataclass

from .central import Exponent
from .errors import HypothesisError, InputError

__all__ = ["BoundResult", "milnor_component_bound", "cc_max_degree", "thom_milnor_cc_bound"]


@dataclass(frozen=True)
class BoundResult:
    beta: int
    nvars: int
    value: int

    def __str__(self) -> str:
        return str(self.value)


def milnor_component_bound(max_degree: int, nvars: int) -> BoundResult:
    """Bound ``beta (2 beta - 1)^(nvars - 1)`` on the connected components of a
    real algebraic set cut out by polynomials of degree at most ``beta``."""
    if max_degree < 1 or nvars < 1:
        raise InputError("max_degree and nvars must both be at least 1")
    return BoundResult(max_degree, nvars, max_degree * (2 * max_degree - 1) ** (nvars - 1))


def cc_max_degree(n: int, a: Exponent) -> int:
    """Largest degree among the polynomials of the Dziobek system for ``n`` bodies."""
    a.require_nonzero()
    if a.two_a < 0:
        return max(-a.two_a + 2, 2 * n)
    return max(a.two_a, 2 * n)


def thom_milnor_cc_bound(n: int, a: Exponent) -> BoundResult:
    """Upper bound on the number of (n-2)-dimensional central configurations
    for generic masses, valid for ``n >= 4``."""
    if n < 4:
        raise HypothesisError(f"the counting bound is only asserted for n >= 4, got n={n}")
    q = n * (n - 1) // 2
    return milnor_component_bound(cc_max_degree(n, a), q + n + 1)
