"""Approximation numbers a_n of F_d(w) -> target space.

Into L2 the embedding is diagonal, so a_n = sigma_n.  Into L_inf, C, the
Wiener algebra A, and B^0_{inf,1}, a_n is the l_2 tail of (sigma_j)_{j >= n};
by duality the same numbers belong to M -> F_d(1/w) and B -> F_d(1/w), where
M is the space of measures and B the space of distributions with bounded
Fourier coefficients.  Into L_p, 2 < p < inf, only the upper bound by the
l_q tail with 1/q = 1/2 - 1/p is available.
"""

from __future__ import annotations

from dataclasses import dataclass

from .constants import lp_tail_exponent
from .counting import DEFAULT_BUDGET
from .tails import DEFAULT_WIDTH, Enclosure, sigma, tail
from .weights import WeightFamily, require_summable

L2 = "L2"
LINF = "Linf"
CONT = "Continuous"
WIENER = "Wiener"
B0INF1 = "B0inf1"
DUAL_MEASURES = "DualMeasuresToF"
DUAL_B = "DualBToF"
LP = "Lp"

# all of these share a_n = l_2 tail of sigma
SUP_TARGETS = (LINF, CONT, WIENER, B0INF1, DUAL_MEASURES, DUAL_B)

EQUALITY = "Equality"
UPPER_BOUND = "UpperBound"

_ALIASES = {
    "l2": L2,
    "linf": LINF,
    "l_inf": LINF,
    "c": CONT,
    "continuous": CONT,
    "wiener": WIENER,
    "a": WIENER,
    "b0inf1": B0INF1,
    "dual-measures": DUAL_MEASURES,
    "dualmeasurestof": DUAL_MEASURES,
    "dual-b": DUAL_B,
    "dualbtof": DUAL_B,
}


@dataclass(frozen=True)
class TargetSpace:
    tag: str
    p: float | None = None

    def __post_init__(self):
        if self.tag == LP:
            lp_tail_exponent(self.p if self.p is not None else float("nan"))
        elif self.tag not in (L2,) + SUP_TARGETS:
            raise ValueError(f"unknown target space {self.tag!r}")
        elif self.p is not None:
            raise ValueError(f"target {self.tag} takes no exponent")

    @classmethod
    def parse(cls, text: str) -> "TargetSpace":
        t = text.strip()
        low = t.lower()
        if low.startswith("lp"):
            rest = low[2:].lstrip(":=")
            try:
                return cls(LP, float(rest))
            except ValueError:
                raise ValueError(f"bad L_p target {text!r}; use lp:<p>") from None
        if low not in _ALIASES:
            raise ValueError(f"unknown target {text!r}")
        return cls(_ALIASES[low])

    @property
    def q(self) -> float | None:
        """Exponent of the sigma tail governing this target (None for L2)."""
        if self.tag == L2:
            return None
        if self.tag == LP:
            return lp_tail_exponent(self.p)
        return 2.0

    def __str__(self) -> str:
        return f"Lp:{self.p:g}" if self.tag == LP else self.tag


@dataclass(frozen=True)
class ApproxResult:
    family: WeightFamily
    n: int
    target: TargetSpace
    enclosure: Enclosure
    exactness: str

    @property
    def exact(self) -> bool:
        return self.exactness == EQUALITY


def approx_number(
    family: WeightFamily,
    n: int,
    target: TargetSpace | str,
    width: float = DEFAULT_WIDTH,
    budget: int = DEFAULT_BUDGET,
) -> ApproxResult:
    """a_n(I_d : F_d(w) -> target), as an enclosure.

    Raises NotEmbeddedError when the weights are not summable enough for the
    embedding to exist.
    """
    if isinstance(target, str):
        target = TargetSpace.parse(target)
    if target.tag == L2:
        sv = sigma(family, n, budget)
        return ApproxResult(family, n, target, Enclosure(sv.value, sv.value), EQUALITY)
    q = target.q
    require_summable(family, q)
    enc = tail(family, n, q, width=width, budget=budget)
    kind = UPPER_BOUND if target.tag == LP else EQUALITY
    return ApproxResult(family, n, target, enc, kind)
