"""Machine-readable report types and their flat serialization.

Every report serializes to a flat JSON object (lists of numbers are the only
nested values) and ``from_dict(to_dict(r)) == r`` holds for each type.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from typing import Any, ClassVar, Union

Scalar = Union[str, int, float, bool, None]


@dataclass
class VerificationReport:
    check: str
    status: str
    degree: int
    terms: int
    millis: float | None = None
    extra: dict[str, Scalar] = field(default_factory=dict)

    kind: ClassVar[str] = "verification"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self, timings: bool = True) -> dict[str, Scalar]:
        out: dict[str, Scalar] = {
            "check": self.check,
            "status": self.status,
            "degree": self.degree,
            "terms": self.terms,
            "millis": self.millis if timings else None,
        }
        for k, v in self.extra.items():
            if k in out:
                raise ValueError(f"extra key {k!r} shadows a report field")
            out[k] = v
        return out

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "VerificationReport":
        core = {"check", "status", "degree", "terms", "millis"}
        return cls(
            check=d["check"],
            status=d["status"],
            degree=d["degree"],
            terms=d["terms"],
            millis=d.get("millis"),
            extra={k: v for k, v in d.items() if k not in core},
        )


@dataclass
class QuadratureReport:
    s: float
    tol: float
    value: float
    tail_correction: float
    inner_estimate_error: float
    radius_used: float
    cells: int

    kind: ClassVar[str] = "quadrature"

    def to_dict(self) -> dict[str, Scalar]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "QuadratureReport":
        return cls(**{f.name: d[f.name] for f in fields(cls)})


@dataclass
class ProbeSeries:
    kind_name: str
    field: str
    phi: float
    s: float
    abscissae: list[float]
    values: list[float]
    extrapolated_limit: float
    method: str
    reference: float | None = None
    sup: float | None = None
    sup_stable: bool | None = None

    kind: ClassVar[str] = "probe"

    @property
    def deviation(self) -> float | None:
        if self.reference is None:
            return None
        return abs(self.extrapolated_limit - self.reference)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["deviation"] = self.deviation
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ProbeSeries":
        return cls(**{f.name: d[f.name] for f in fields(cls) if f.name in d})


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=False, allow_nan=False)
