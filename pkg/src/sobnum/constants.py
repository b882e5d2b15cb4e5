"""Closed-form constants: l_r-ball volumes, limit constants, explicit bounds.

All logarithms are natural logarithms.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .weights import ISO, MIX

L2 = "L2"
LINF = "Linf"
LP = "Lp"
UPPER = "upper"
LOWER = "lower"


# ------------------------------------------------------------------ Gamma


def gamma_fn(x: float) -> float:
    """Gamma(x) for x > 0 (relative error ~1e-15 on (0, 171])."""
    if not x > 0:
        raise ValueError(f"gamma_fn needs x > 0, got {x}")
    try:
        return math.gamma(x)
    except OverflowError:
        raise OverflowError(f"Gamma({x}) overflows a double") from None


def gamma_bounds(x: float) -> tuple[float, float]:
    """((x/e)^x, (x+1)^x), which bracket Gamma(1+x) for x > 0."""
    if not x > 0:
        raise ValueError(f"gamma_bounds needs x > 0, got {x}")
    return (x / math.e) ** x, (x + 1.0) ** x


def volume_ball(d: int, r: float) -> float:
    """Volume of the unit ball of |.|_r in R^d: 2^d Gamma(1+1/r)^d / Gamma(1+d/r)."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    if math.isinf(r):
        return math.ldexp(1.0, d)
    try:
        return math.ldexp(gamma_fn(1.0 + 1.0 / r) ** d / gamma_fn(1.0 + d / r), d)
    except OverflowError:
        pass
    logv = d * math.log(2.0) + d * math.lgamma(1.0 + 1.0 / r) - math.lgamma(1.0 + d / r)
    try:
        return math.exp(logv)
    except OverflowError:
        raise OverflowError(f"vol(B_{r}^{d}) overflows a double") from None


def volume_decay_bounds(d: int, s: float, r: float) -> tuple[float, float]:
    """Two-sided bounds on vol(B_r^d)^(s/d) from the Gamma bracket."""
    if math.isinf(r):
        raise ValueError("volume_decay_bounds needs finite r")
    lower = 2.0**s / (math.e * (d + r)) ** (s / r)
    upper = 2.0**s * (math.e * (r + 1.0)) ** (s / r) / d ** (s / r)
    return lower, upper


# --------------------------------------------------------------- limits


@dataclass(frozen=True)
class LimitSpec:
    """n^rate * a_n / (ln n)^log_exponent -> constant."""

    family_kind: str
    target: str
    s: float
    r: float
    d: int
    rate_exponent: float
    log_exponent: float
    constant: float

    def to_dict(self) -> dict:
        out = asdict(self)
        out["r"] = "inf" if math.isinf(self.r) else self.r
        return out


def mixed_constant(d: int, s: float) -> float:
    return (2.0**d / math.factorial(d - 1)) ** s


def limit_constant(family_kind: str, target: str, s: float, r: float, d: int) -> LimitSpec:
    if target not in (L2, LINF):
        raise ValueError(f"limit constants exist for L2 and Linf, not {target!r}")
    if family_kind == ISO:
        vol = volume_ball(d, r) ** (s / d)
        if target == L2:
            return LimitSpec(ISO, L2, s, r, d, s / d, 0.0, vol)
        if not s > d / 2:
            raise ValueError(f"isotropic Linf limit needs s > d/2 (s={s}, d={d})")
        return LimitSpec(ISO, LINF, s, r, d, s / d - 0.5, 0.0, math.sqrt(d / (2 * s - d)) * vol)
    if family_kind == MIX:
        c = mixed_constant(d, s)
        if target == L2:
            return LimitSpec(MIX, L2, s, r, d, s, (d - 1) * s, c)
        if not s > 0.5:
            raise ValueError(f"mixed Linf limit needs s > 1/2 (s={s})")
        return LimitSpec(MIX, LINF, s, r, d, s - 0.5, (d - 1) * s, c / math.sqrt(2 * s - 1))
    raise ValueError(f"unknown family kind {family_kind!r}")


# ------------------------------------------- transfer from sigma to tails


def transfer_upper(B: float, alpha: float, beta: float, N: int) -> tuple[float, float, float]:
    """L2 upper bound B n^-alpha (ln n)^beta (n >= N) -> bound on a_{n+1} into Linf.

    Returns (coefficient, n exponent, threshold); the log power stays beta.
    """
    if not alpha > 0.5:
        raise ValueError(f"transfer needs alpha > 1/2, got {alpha}")
    if beta < 0:
        raise ValueError(f"transfer needs beta >= 0, got {beta}")
    coef = B * math.sqrt(2.0 / (2 * alpha - 1))
    return coef, 0.5 - alpha, max(float(N), math.exp(4 * beta / (2 * alpha - 1)))


def transfer_lower(A: float, alpha: float, beta: float, N: int) -> tuple[float, float, float]:
    """L2 lower bound A n^-alpha (ln n)^beta (n >= N) -> bound on a_n into Linf, with ln(2n)."""
    if not alpha > 0.5:
        raise ValueError(f"transfer needs alpha > 1/2, got {alpha}")
    if beta < 0:
        raise ValueError(f"transfer needs beta >= 0, got {beta}")
    coef = A * math.sqrt(1.0 / (4 * alpha - 2))
    return coef, 0.5 - alpha, max(float(N), 2.0)


def transfer_lp_upper(C: float, alpha: float, p: float, N: int) -> tuple[float, float, float]:
    """L2 upper bound C n^-alpha (n >= N) -> bound on a_{n+1} into L_p, 2 < p < inf."""
    q = lp_tail_exponent(p)
    if not alpha > 1.0 / q:
        raise ValueError(f"Lp transfer needs alpha > 1/2 - 1/p, got alpha={alpha}, p={p}")
    return C / (alpha * q - 1.0) ** (1.0 / q), 1.0 / q - alpha, float(N)


def lp_tail_exponent(p: float) -> float:
    """q with 1/q = 1/2 - 1/p."""
    if not (2 < p < math.inf):
        raise ValueError(f"L_p targets need 2 < p < inf, got {p}")
    return 1.0 / (0.5 - 1.0 / p)


# ----------------------------------------------------- explicit bounds

BOUND_NAMES = {
    "prop2-upper": "Prop2Upper",
    "prop2-lower": "Prop2Lower",
    "cor1-upper": "Cor1Upper",
    "cor1-lower": "Cor1Lower",
    "cor1-lower-substituted": "Cor1LowerSubstituted",
    "cor12-upper": "Cor12Upper",
    "cor12-lower": "Cor12Lower",
    "cor12b-upper": "Cor12bUpper",
}


@dataclass(frozen=True)
class BoundCertificate:
    """bound(n) = coefficient * n^n_exponent * ln(log_scale * n)^log_exponent.

    It bounds a_{n + index_offset} into ``target`` for every n >= first_n.
    """

    name: str
    side: str
    target: str
    family_kind: str
    r: float
    d: int
    s: float
    coefficient: float
    n_exponent: float
    log_exponent: float
    log_scale: int
    threshold: float
    strict: bool
    index_offset: int = 0
    p: float | None = None

    def __post_init__(self):
        if not self.coefficient > 0:
            raise ValueError("certificate coefficient must be positive")
        if self.threshold < 1:
            raise ValueError("certificate threshold must be >= 1")

    @property
    def first_n(self) -> int:
        """Smallest valid n: ceil(t) for 'n >= t', floor(t) + 1 for 'n > t'."""
        if self.strict:
            return math.floor(self.threshold) + 1
        return math.ceil(self.threshold)

    @property
    def q(self) -> float:
        if self.target == LP:
            return lp_tail_exponent(self.p)
        return 2.0

    def bound(self, n: int) -> float:
        val = self.coefficient * float(n) ** self.n_exponent
        if self.log_exponent:
            val *= math.log(self.log_scale * n) ** self.log_exponent
        return val

    def to_dict(self) -> dict:
        out = asdict(self)
        out["r"] = "inf" if math.isinf(self.r) else self.r
        out["first_n"] = self.first_n
        return out


def _iso_l2_upper(d, s):
    return (32 * math.e / d) ** (s / 2), 9.0**d * math.exp(d / 2)


def _iso_l2_lower(d, s):
    return (1.0 / (math.e * (d + 2))) ** (s / 2), 11.0**d * math.exp(d / 2)


def explicit_bound(name: str, d: int, s: float, p: float | None = None) -> BoundCertificate:
    """One of the explicit preasymptotic bounds, with its exact constants.

    ``name`` is the kebab-case id (``prop2-upper``) or the CamelCase one.
    Isotropic bounds are for H^{s,2}; mixed bounds are for H^{s,2}_mix.
    """
    key = {v.lower(): k for k, v in BOUND_NAMES.items()}.get(name.lower(), name.lower())
    if key not in BOUND_NAMES:
        raise ValueError(f"unknown bound {name!r}; choose from {sorted(BOUND_NAMES)}")
    d, s = int(d), float(s)
    if d < 1 or not s > 0:
        raise ValueError(f"bad parameters d={d}, s={s}")
    common = dict(name=BOUND_NAMES[key], r=2.0, d=d, s=s)

    if key == "prop2-upper":
        coef, thr = _iso_l2_upper(d, s)
        return BoundCertificate(side=UPPER, target=L2, family_kind=ISO, coefficient=coef,
                                n_exponent=-s / d, log_exponent=0.0, log_scale=1,
                                threshold=thr, strict=False, **common)
    if key == "prop2-lower":
        coef, thr = _iso_l2_lower(d, s)
        return BoundCertificate(side=LOWER, target=L2, family_kind=ISO, coefficient=coef,
                                n_exponent=-s / d, log_exponent=0.0, log_scale=1,
                                threshold=thr, strict=False, **common)
    if key == "cor1-upper":
        if not s > d / 2:
            raise ValueError(f"{BOUND_NAMES[key]} needs s > d/2 (s={s}, d={d})")
        B, N = _iso_l2_upper(d, s)
        coef, expo, thr = transfer_upper(B, s / d, 0.0, 1)
        # same as sqrt(2d / (2s - d)) * (32e/d)^(s/2)
        return BoundCertificate(side=UPPER, target=LINF, family_kind=ISO, coefficient=coef,
                                n_exponent=expo, log_exponent=0.0, log_scale=1,
                                threshold=max(N, thr), strict=False, index_offset=1, **common)
    if key == "cor1-lower":
        if not s > d / 2:
            raise ValueError(f"{BOUND_NAMES[key]} needs s > d/2 (s={s}, d={d})")
        A, N = _iso_l2_lower(d, s)
        coef = math.sqrt(4.0 * d / (4 * s - d)) * A
        return BoundCertificate(side=LOWER, target=LINF, family_kind=ISO, coefficient=coef,
                                n_exponent=0.5 - s / d, log_exponent=0.0, log_scale=1,
                                threshold=N, strict=False, **common)
    if key == "cor1-lower-substituted":
        if not s > d / 2:
            raise ValueError(f"{BOUND_NAMES[key]} needs s > d/2 (s={s}, d={d})")
        A, N = _iso_l2_lower(d, s)
        coef, expo, thr = transfer_lower(A, s / d, 0.0, 2)
        return BoundCertificate(side=LOWER, target=LINF, family_kind=ISO, coefficient=coef,
                                n_exponent=expo, log_exponent=0.0, log_scale=2,
                                threshold=max(N, thr), strict=False, **common)
    if key == "cor12-upper":
        if not s > 0.5:
            raise ValueError(f"{BOUND_NAMES[key]} needs s > 1/2 (s={s})")
        coef = math.sqrt(2.0 / (2 * s - 1)) * ((3 * math.sqrt(2)) ** d / math.factorial(d - 1)) ** s
        thr = max(27.0**d, math.exp(4 * (d - 1) * s / (2 * s - 1)))
        return BoundCertificate(side=UPPER, target=LINF, family_kind=MIX, coefficient=coef,
                                n_exponent=0.5 - s, log_exponent=(d - 1) * s, log_scale=1,
                                threshold=thr, strict=True, **common)
    if key == "cor12-lower":
        if not s > 0.5:
            raise ValueError(f"{BOUND_NAMES[key]} needs s > 1/2 (s={s})")
        base = 5.0 / (6 * math.factorial(d) * (1 + math.log(math.sqrt(12.0))) ** d)
        coef = math.sqrt(1.0 / (4 * s - 2)) * base**s
        return BoundCertificate(side=LOWER, target=LINF, family_kind=MIX, coefficient=coef,
                                n_exponent=0.5 - s, log_exponent=(d - 1) * s, log_scale=2,
                                threshold=(12 * math.e**2) ** d, strict=True, **common)
    # cor12b-upper
    if p is None:
        raise ValueError(f"{BOUND_NAMES[key]} needs the target exponent p")
    q = lp_tail_exponent(p)
    if not s > d * (0.5 - 1.0 / p):
        raise ValueError(f"{BOUND_NAMES[key]} needs s > d(1/2 - 1/p) (s={s}, d={d}, p={p})")
    C, N = _iso_l2_upper(d, s)
    coef, expo, thr = transfer_lp_upper(C, s / d, p, 1)
    return BoundCertificate(side=UPPER, target=LP, family_kind=ISO, coefficient=coef,
                            n_exponent=expo, log_exponent=0.0, log_scale=1,
                            threshold=max(N, thr), strict=False, index_offset=1, p=float(p), **common)
