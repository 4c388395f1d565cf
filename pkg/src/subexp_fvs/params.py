"""Nice-class parameters and the thresholds derived from them.

Every polynomial of the analysis is modelled as ``lead * r**exp * (1 + log2 r)**log_exp``;
the exponents are exact rationals so that ``c7``, ``epsilon`` and ``eta`` come
out exactly. Only the integer thresholds ``r`` and ``t`` and the size
polynomials ``p1..p4`` influence what the solver does, and none of them affects
correctness.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

Number = Fraction


def _frac(x: Any) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


@dataclass(frozen=True)
class NiceClassParams:
    name: str
    alpha: int
    delta: Fraction
    # treewidth bound tau(r)
    c_f: Fraction
    # density bound d(r)
    c_d: Fraction
    # f1(r)
    c_f1: Fraction
    # f2(r, p, m) = r**c_f2 * (p + m)**c_f2p
    c_f2: Fraction
    c_f2p: Fraction
    lead_tau: Fraction = Fraction(1)
    lead_d: Fraction = Fraction(1)
    lead_f1: Fraction = Fraction(1)
    lead_f2: Fraction = Fraction(1)
    log_tau: Fraction = Fraction(0)
    log_d: Fraction = Fraction(0)
    log_f1: Fraction = Fraction(0)
    log_f2: Fraction = Fraction(0)
    # pseudo-disk f2 only depends on p; s-string f2 depends on p + m
    f2_uses_m: bool = True
    # eta printed for this preset in the literature, if any (reported, never used)
    stated_eta: Optional[Fraction] = None

    def __post_init__(self) -> None:
        for name in (
            "delta", "c_f", "c_d", "c_f1", "c_f2", "c_f2p",
            "lead_tau", "lead_d", "lead_f1", "lead_f2",
            "log_tau", "log_d", "log_f1", "log_f2",
        ):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if self.stated_eta is not None:
            object.__setattr__(self, "stated_eta", _frac(self.stated_eta))
        self.validate()

    def validate(self) -> None:
        if not (0 <= self.delta < 1):
            raise ValueError("delta must lie in [0, 1)")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        for name in ("c_f", "c_d", "c_f1", "c_f2", "c_f2p"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    # -- the functions of the class ---------------------------------------

    @staticmethod
    def _poly(lead: Fraction, exp: Fraction, log_exp: Fraction, r: int) -> float:
        return float(lead) * r ** float(exp) * (1 + math.log2(r)) ** float(log_exp)

    def tau(self, r: int) -> float:
        return self._poly(self.lead_tau, self.c_f, self.log_tau, r)

    def d(self, r: int) -> float:
        # density bound is assumed to be at least r
        return max(float(r), self._poly(self.lead_d, self.c_d, self.log_d, r))

    def f1(self, r: int) -> float:
        return self._poly(self.lead_f1, self.c_f1, self.log_f1, r)

    def f2(self, r: int, p: float, m: float) -> float:
        base = p + m if self.f2_uses_m else p
        return self._poly(self.lead_f2, self.c_f2, self.log_f2, r) * base ** float(self.c_f2p)

    # -- exponents of the running-time analysis -----------------------------

    @property
    def c7(self) -> Fraction:
        a = 6 + self.alpha
        return self.c_f + self.delta * (2 * (self.c_d + self.c_f2) + (self.c_f2p + 1) * (self.c_f1 + a))

    @property
    def c7_alternative(self) -> Fraction:
        """The unsimplified expression printed alongside ``c7``; it is not equal to it."""
        a = 6 + self.alpha
        return self.c_f + self.delta * (
            2 * (self.c_d + self.c_f2 + self.c_f2p * (self.c_f1 + a * self.c_d)) + self.c_f1 + a * self.c_d
        )

    @property
    def epsilon(self) -> Fraction:
        return (1 - self.delta) / (self.c7 + 1)

    @property
    def eta(self) -> Fraction:
        return 1 - self.epsilon

    def to_json(self) -> Dict[str, Any]:
        out = asdict(self)
        for k, v in out.items():
            if isinstance(v, Fraction):
                out[k] = str(v)
        return out

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "NiceClassParams":
        return cls(**data)

    @classmethod
    def load(cls, path: str) -> "NiceClassParams":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


PSEUDO_DISK = NiceClassParams(
    name="pseudo-disk",
    alpha=4,
    delta=Fraction(1, 2),
    c_f=Fraction(1, 2),
    c_d=Fraction(1),
    c_f1=Fraction(0),
    c_f2=Fraction(0),
    c_f2p=Fraction(3),
    log_tau=Fraction(1, 2),
    log_d=Fraction(1),
    f2_uses_m=False,
    stated_eta=Fraction(44, 45),
)


def s_string(s: int = 1) -> NiceClassParams:
    """Preset for intersection graphs of curves crossing pairwise at most ``s`` times."""
    if s < 1:
        raise ValueError("s must be at least 1")
    return NiceClassParams(
        name=f"s-string({s})",
        alpha=4,
        delta=Fraction(1, 2),
        c_f=Fraction(1, 2),
        c_d=Fraction(1),
        c_f1=Fraction(1),
        c_f2=Fraction(4),
        c_f2p=Fraction(3),
        lead_f1=Fraction(s) ** 4,
        lead_f2=Fraction(s) ** 4,
        log_tau=Fraction(1, 2),
        log_d=Fraction(1),
        log_f1=Fraction(1),
        log_f2=Fraction(4),
        f2_uses_m=True,
        stated_eta=Fraction(52, 53),
    )


PRESETS = {"pseudo-disk": lambda s=1: PSEUDO_DISK, "s-string": s_string}


def preset(name: str, s: int = 1) -> NiceClassParams:
    try:
        return PRESETS[name](s)
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def ceil_rational_power(base: int, exponent: Fraction) -> int:
    """Exact ``ceil(base ** exponent)`` for a nonnegative rational exponent."""
    if base <= 1 or exponent == 0:
        return 1 if base >= 1 or exponent == 0 else 0
    num, den = exponent.numerator, exponent.denominator
    target = base**num
    # smallest integer x with x**den >= target
    x = max(1, int(round(float(base) ** float(exponent))))
    while x**den < target:
        x += 1
    while x > 1 and (x - 1) ** den >= target:
        x -= 1
    return x


@dataclass
class Thresholds:
    """Integer thresholds and size polynomials for one solver run.

    ``p3_scale`` is mutable on purpose: when extracting a K~_{t,t} fails the
    solver doubles it for the rest of the run.
    """

    params: NiceClassParams
    k0: int
    r: int
    t: int
    c1: float = 16.0
    p3_scale: float = 1.0
    overridden: Dict[str, Any] = field(default_factory=dict)
    _p1_cache: Dict[Tuple[int, float], float] = field(default_factory=dict, repr=False, compare=False)

    @property
    def c7(self) -> Fraction:
        return self.params.c7

    @property
    def epsilon(self) -> Fraction:
        return self.params.epsilon

    @property
    def eta(self) -> Fraction:
        return self.params.eta

    def p1(self, r: int, y: float) -> float:
        # db = 0 only occurs on trees KR1 removes; clamp so they are not oversized
        y = max(y, 1)
        key = (r, y)
        if key not in self._p1_cache:
            self._p1_cache[key] = self.c1 * self.params.f1(r) * float(y) ** (6 + self.params.alpha)
        return self._p1_cache[key]

    def p2(self, r: int, t: int) -> float:
        return self.p1(r, 2 * t)

    def p3(self, r: int, t: int) -> float:
        return self.p3_scale * 4 * t * self.params.f2(r, 2 * t, self.p2(r, t))

    def p4(self, r: int, t: int) -> float:
        return (2 * t + 4) * self.params.f2(r, 2 * t + 2, self.p1(r, 2 * t + 2))

    def p6(self, r: int, t: int) -> float:
        return self.p2(r, t) * self.p3(r, t) * self.p4(r, t)

    def p7(self, r: int, t: int) -> float:
        tau = self.params.tau(r)
        p6 = self.p6(r, t)
        return tau * math.log2(max(2.0, tau * max(self.k0, 1) * p6)) * p6 ** float(self.params.delta)

    def m_bound(self) -> float:
        """Upper bound on ``|M|`` along any recursion path."""
        return 4 * self.k0 + 2 * self.k0 * self.p2(self.r, self.t)

    def leaf_bound(self) -> float:
        return self.k0 * self.p6(self.r, self.t)

    def summary(self) -> Dict[str, Any]:
        p = self.params
        out: Dict[str, Any] = {
            "preset": p.name,
            "k0": self.k0,
            "r": self.r,
            "t": self.t,
            "c7": str(p.c7),
            "c7_alternative": str(p.c7_alternative),
            "epsilon": str(p.epsilon),
            "eta": str(p.eta),
            "p3_scale": self.p3_scale,
        }
        if p.stated_eta is not None:
            out["eta_stated"] = str(p.stated_eta)
            out["eta_unreconciled"] = p.stated_eta != p.eta
        if self.overridden:
            out["overridden"] = dict(self.overridden)
        return out


def derive_thresholds(
    params: NiceClassParams,
    k0: int,
    *,
    r: Optional[int] = None,
    t: Optional[int] = None,
    c1: float = 16.0,
    p3_scale: float = 1.0,
) -> Thresholds:
    """``r = max(2, ceil(k0**epsilon))`` and ``t = 2 * ceil(d(r))`` unless overridden."""
    overridden: Dict[str, Any] = {}
    if r is None:
        r = max(2, ceil_rational_power(max(k0, 1), params.epsilon))
    else:
        overridden["r"] = r
    if t is None:
        t = 2 * math.ceil(params.d(r) - 1e-9)
    else:
        overridden["t"] = t
    if r < 2 or t < 2:
        raise ValueError("thresholds r and t must be at least 2")
    if c1 != 16.0:
        overridden["c1"] = c1
    if p3_scale != 1.0:
        overridden["p3_scale"] = p3_scale
    return Thresholds(params, k0, r, t, c1, p3_scale, overridden)
