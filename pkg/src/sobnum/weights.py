"""Weight families on Z^d for periodic Sobolev-type Hilbert spaces.

Two families are supported:

* isotropic      w(k) = (1 + sum_j |k_j|^r)^(s/r)
* mixed          w(k) = prod_j (1 + |k_j|^r)^(s/r)

with r = inf read as the pointwise limit, max(1, |k|_inf)^s and
prod_j max(1, |k_j|)^s respectively.

Whenever r is a positive integer or infinite, every weight is u**e for a
positive integer "level" u and a fixed exponent e; the counting and tail
machinery works on these integer levels so that boundary comparisons are
exact.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

ISO = "iso"
MIX = "mix"

_SPEC_RE = re.compile(r"^\s*(iso|mix)\s*:\s*(.*)$", re.IGNORECASE)


class NotEmbeddedError(ValueError):
    """The requested embedding does not exist (weights not summable)."""


def _fmt_num(x: float) -> str:
    if math.isinf(x):
        return "inf"
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


@dataclass(frozen=True)
class WeightFamily:
    kind: str
    s: float
    r: float
    d: int

    def __post_init__(self):
        if self.kind not in (ISO, MIX):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "r", float(self.r))
        if isinstance(self.d, float) and not self.d.is_integer():
            raise ValueError(f"dimension must be an integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        if not (self.s > 0 and math.isfinite(self.s)):
            raise ValueError(f"smoothness s must be positive, got {self.s}")
        if not self.r > 0:
            raise ValueError(f"exponent r must be positive or inf, got {self.r}")
        if self.d < 1:
            raise ValueError(f"dimension d must be >= 1, got {self.d}")

    @classmethod
    def parse(cls, text: str) -> "WeightFamily":
        """Parse ``iso:s=<f>,r=<f|inf>,d=<int>`` (or ``mix:...``)."""
        m = _SPEC_RE.match(text)
        if not m:
            raise ValueError(f"bad family spec {text!r}; expected iso:s=..,r=..,d=..")
        kind = m.group(1).lower()
        fields = {}
        for part in m.group(2).split(","):
            if not part.strip():
                continue
            key, sep, val = part.partition("=")
            key = key.strip().lower()
            if not sep or key not in ("s", "r", "d"):
                raise ValueError(f"bad field {part!r} in family spec {text!r}")
            fields[key] = val.strip()
        missing = {"s", "r", "d"} - fields.keys()
        if missing:
            raise ValueError(f"family spec {text!r} missing {sorted(missing)}")
        try:
            s = float(fields["s"])
            r = math.inf if fields["r"].lower() in ("inf", "infinity") else float(fields["r"])
            d_f = float(fields["d"])
        except ValueError as exc:
            raise ValueError(f"bad number in family spec {text!r}") from exc
        if not d_f.is_integer():
            raise ValueError(f"dimension must be an integer in {text!r}")
        return cls(kind, s, r, int(d_f))

    def __str__(self) -> str:
        return f"{self.kind}:s={_fmt_num(self.s)},r={_fmt_num(self.r)},d={self.d}"

    @property
    def integer_levels(self) -> bool:
        """True when weights are u**e with integer levels u."""
        return math.isinf(self.r) or self.r.is_integer()

    @property
    def exponent(self) -> float:
        """Exponent e with w = u**e; only meaningful for integer-level families."""
        return self.s if math.isinf(self.r) else self.s / self.r

    @property
    def int_r(self) -> int | None:
        """r as an int, or None for r = inf."""
        return None if math.isinf(self.r) else int(self.r)


def level_of(family: WeightFamily, k: Sequence[int]) -> int:
    """Integer level u(k) with w(k) = u**e (integer-level families only)."""
    if not family.integer_levels:
        raise ValueError(f"{family} has no integer level representation")
    a = [abs(int(x)) for x in k]
    r = family.int_r
    if family.kind == ISO:
        if r is None:
            return max(1, max(a))
        return 1 + sum(x**r for x in a)
    u = 1
    for x in a:
        u *= max(1, x) if r is None else 1 + x**r
    return u


def weight_of_level(family: WeightFamily, u) -> float:
    return float(u) ** family.exponent


def eval_weight(family: WeightFamily, k: Sequence[int]) -> float:
    if len(k) != family.d:
        raise ValueError(f"index has length {len(k)}, family dimension is {family.d}")
    if family.integer_levels:
        return weight_of_level(family, level_of(family, k))
    s, r = family.s, family.r
    a = [abs(float(x)) for x in k]
    if family.kind == ISO:
        return (1.0 + sum(x**r for x in a)) ** (s / r)
    return math.prod(1.0 + x**r for x in a) ** (s / r)


def check_summability(family: WeightFamily, q: float = 2.0) -> bool:
    """Whether sum_k w(k)^(-q) converges."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if family.kind == ISO:
        return q * family.s > family.d
    return q * family.s > 1


def require_summable(family: WeightFamily, q: float) -> None:
    if not check_summability(family, q):
        need = f"{q:g}*s > {family.d if family.kind == ISO else 1}"
        raise NotEmbeddedError(f"sum of w(k)^-{q:g} diverges for {family} (needs {need})")
