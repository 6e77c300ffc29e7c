"""Truncated Poincare series and the equivariant Morse inequality check."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

DEFAULT_TRUNCATION = 32
FIELDS = ("Q", "Z2")

__all__ = [
    "PoincareSeries",
    "Verdict",
    "MorseCheck",
    "DEFAULT_TRUNCATION",
    "kirwan_product",
    "check_inequalities",
    "classifying_space_circle",
    "projective_line",
    "sl2r_p1_data",
    "sl2c_p1_data",
]


@dataclass(frozen=True)
class PoincareSeries:
    """c_0 + c_1 t + ... + c_N t^N with integer coefficients.

    ``field`` records the coefficient field of the cohomology the series
    counts ("Q" or "Z2"); it is bookkeeping only.
    """

    coeffs: tuple[int, ...]
    label: str = ""
    field: str = "Q"

    def __post_init__(self):
        cs = tuple(self.coeffs)
        if not cs:
            raise ValueError("a series needs at least the constant term")
        for c in cs:
            if isinstance(c, bool) or int(c) != c:
                raise TypeError(f"coefficient {c!r} is not an integer")
        if self.field not in FIELDS:
            raise ValueError(f"unknown coefficient field {self.field!r}")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in cs))

    @classmethod
    def polynomial(cls, coeffs: Iterable[int], truncation: int = DEFAULT_TRUNCATION, label: str = "", field: str = "Q"):
        cs = list(coeffs)[: truncation + 1]
        return cls(tuple(cs + [0] * (truncation + 1 - len(cs))), label, field)

    @classmethod
    def zero(cls, truncation: int = DEFAULT_TRUNCATION, field: str = "Q"):
        return cls((0,) * (truncation + 1), "0", field)

    @classmethod
    def one(cls, truncation: int = DEFAULT_TRUNCATION, field: str = "Q"):
        return cls.polynomial([1], truncation, "1", field)

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def truncate(self, n: int) -> "PoincareSeries":
        if n > self.truncation:
            raise ValueError(f"cannot extend a series known to degree {self.truncation} to {n}")
        return PoincareSeries(self.coeffs[: n + 1], self.label, self.field)

    def _align(self, other: "PoincareSeries") -> tuple[int, str]:
        if self.field != other.field:
            raise ValueError(f"coefficient fields differ: {self.field} vs {other.field}")
        return min(self.truncation, other.truncation), self.field

    def __add__(self, other: "PoincareSeries") -> "PoincareSeries":
        n, f = self._align(other)
        return PoincareSeries(tuple(a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs)), f"({self.label})+({other.label})", f)

    def __sub__(self, other: "PoincareSeries") -> "PoincareSeries":
        n, f = self._align(other)
        return PoincareSeries(tuple(a - b for a, b in zip(self.coeffs[: n + 1], other.coeffs)), f"({self.label})-({other.label})", f)

    def __neg__(self) -> "PoincareSeries":
        return PoincareSeries(tuple(-c for c in self.coeffs), f"-({self.label})", self.field)

    def __mul__(self, other) -> "PoincareSeries":
        if isinstance(other, int):
            return PoincareSeries(tuple(other * c for c in self.coeffs), f"{other}*({self.label})", self.field)
        n, f = self._align(other)
        out = [0] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a:
                for j, b in enumerate(other.coeffs[: n + 1 - i]):
                    out[i + j] += a * b
        return PoincareSeries(tuple(out), f"({self.label})*({other.label})", f)

    __rmul__ = __mul__

    def shift(self, m: int) -> "PoincareSeries":
        """Multiply by t^m, keeping the truncation degree."""
        if m < 0:
            raise ValueError("negative shift")
        cs = ((0,) * m + self.coeffs)[: self.truncation + 1]
        return PoincareSeries(cs, f"t^{m}*({self.label})" if m else self.label, self.field)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_dict(self) -> dict:
        return {"coeffs": list(self.coeffs), "label": self.label, "field": self.field}

    @classmethod
    def from_dict(cls, d: dict) -> "PoincareSeries":
        return cls(tuple(d["coeffs"]), d.get("label", ""), d.get("field", "Q"))

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
                coef = str(c) if (c != 1 or k == 0) and (c != -1 or k == 0) else ("-" if c == -1 else "")
                terms.append(f"{coef}{mono}")
        body = " + ".join(terms).replace("+ -", "- ") if terms else "0"
        return f"{body} + O(t^{self.truncation + 1})"


def kirwan_product(space: PoincareSeries, bk: PoincareSeries) -> PoincareSeries:
    """P_K(Z) = P(Z) P(BK) for compact Z and compact connected K."""
    out = space * bk
    return PoincareSeries(out.coeffs, f"P({space.label})*P({bk.label})", out.field)


def classifying_space_circle(truncation: int = DEFAULT_TRUNCATION, field: str = "Q") -> PoincareSeries:
    """P(BS^1) = 1 + t^2 + t^4 + ..."""
    return PoincareSeries(tuple(1 if k % 2 == 0 else 0 for k in range(truncation + 1)), "BS1", field)


def projective_line(truncation: int = DEFAULT_TRUNCATION, field: str = "Q") -> PoincareSeries:
    return PoincareSeries.polynomial([1, 0, 1], truncation, "P1(C)", field)


class Verdict(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"


@dataclass(frozen=True)
class MorseCheck:
    """D = sum_m t^m P_m - P_total and its quotient R = D / (1 + t).

    R is determined up to degree N - 1 by D up to degree N; ``exact`` records
    that (1 + t) R reproduces D through that degree.
    """

    difference: PoincareSeries
    quotient: PoincareSeries
    verdict: Verdict
    exact: bool
    offending_degree: int | None = None
    field: str = "Q"

    def to_dict(self) -> dict:
        return {
            "D": self.difference.to_dict(),
            "R": self.quotient.to_dict(),
            "verdict": self.verdict.value,
            "exact": self.exact,
            "offending_degree": self.offending_degree,
            "field": self.field,
        }


def check_inequalities(stratum_terms: Sequence[tuple[int, PoincareSeries]], total: PoincareSeries) -> MorseCheck:
    n = min([total.truncation] + [p.truncation for _, p in stratum_terms])
    if n < 1:
        raise ValueError("need truncation degree at least 1")
    total = total.truncate(n)
    acc = PoincareSeries.zero(n, total.field)
    for m, p in stratum_terms:
        acc = acc + p.truncate(n).shift(m)
    d = acc - total
    # synthetic division by (1 + t): r_k = d_k - r_{k-1}
    r: list[int] = []
    prev = 0
    for k in range(n):
        prev = d.coeffs[k] - prev
        r.append(prev)
    check = [r[k] + (r[k - 1] if k else 0) for k in range(n)]
    exact = check == list(d.coeffs[:n])
    offending = next((k for k, c in enumerate(r) if c < 0), None)
    verdict = Verdict.PASS if exact and offending is None else Verdict.FAIL
    if not exact and offending is None:
        offending = next(k for k in range(n) if check[k] != d.coeffs[k])
    return MorseCheck(
        difference=PoincareSeries(d.coeffs, "D", total.field),
        quotient=PoincareSeries(tuple(r), "R", total.field),
        verdict=verdict,
        exact=exact,
        offending_degree=offending,
        field=total.field,
    )


def sl2r_p1_data(truncation: int = DEFAULT_TRUNCATION):
    """Strata of SL_2(R) on P_1(C) with K = SO(2).

    The semistable stratum is two K-fixed points up to homotopy, each with
    series P(BK); the closed stratum K.[1:0] is a free K-orbit (series 1) of
    codimension one.  Returns (terms, total).
    """
    bk = classifying_space_circle(truncation)
    semistable = PoincareSeries((2 * bk).coeffs, "S_0", "Q")
    closed = PoincareSeries.one(truncation)
    closed = PoincareSeries(closed.coeffs, "K.[1:0]", "Q")
    total = kirwan_product(projective_line(truncation), bk)
    return [(0, semistable), (1, closed)], total


def sl2c_p1_data(truncation: int = DEFAULT_TRUNCATION):
    """SL_2(C) on P_1(C) with K = SU(2): a single stratum SU(2)/T, so
    P_K = P(BT) = P(BS^1), against P(P_1) P(BSU(2))."""
    bt = classifying_space_circle(truncation)
    stratum = PoincareSeries(bt.coeffs, "SU2/T", "Q")
    bsu2 = PoincareSeries(tuple(1 if k % 4 == 0 else 0 for k in range(truncation + 1)), "BSU2", "Q")
    total = kirwan_product(projective_line(truncation), bsu2)
    return [(0, stratum)], total
