"""Construction specs, verification reports and their canonical serialization."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from . import __version__
from .analysis import GrowthMetrics
from .constructions import (
    BlockSpec,
    CasselsSpec2,
    PartitionSpec,
    GAdicSpec,
    cassels_block,
    cassels_order2,
    cassels_order_h,
    cassels_progressions,
    fibonacci_cassels_covering,
    fibonacci_q,
    g_adic_component,
    jia_nathanson,
    raikov_stohr,
)
from .core import MonotoneSequence

SCHEMA = "thinbase_report_v1"
CSV_HEADER = ["kind", "index_or_x", "value_numerator", "value_denominator", "value_decimal"]
DECIMAL_PLACES = 15

# construction name -> (required params, optional params)
CONSTRUCTIONS: dict[str, tuple[set[str], set[str]]] = {
    "raikov_stohr": ({"h", "bound"}, set()),
    "g_adic": ({"g", "exponents", "bound"}, set()),
    "jia_nathanson": ({"g", "h", "bound"}, {"parts"}),
    "cassels_progressions": ({"q", "m", "K"}, set()),
    "cassels_order2": (set(), {"q", "K", "bound"}),
    "cassels_block": ({"h", "v", "L"}, set()),
    "cassels_order_h": ({"h", "j_max"}, set()),
}


@dataclass(frozen=True)
class ConstructionSpec:
    construction: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.construction not in CONSTRUCTIONS:
            raise ValueError(
                f"unknown construction {self.construction!r}; choose from {sorted(CONSTRUCTIONS)}"
            )
        required, optional = CONSTRUCTIONS[self.construction]
        missing = required - self.params.keys()
        if missing:
            raise ValueError(f"{self.construction}: missing params {sorted(missing)}")
        extra = self.params.keys() - required - optional
        if extra:
            raise ValueError(f"{self.construction}: unknown params {sorted(extra)}")
        if self.construction == "cassels_order2" and not ({"K", "bound"} & self.params.keys()):
            raise ValueError("cassels_order2: give K or bound")

    @classmethod
    def from_dict(cls, doc: dict) -> "ConstructionSpec":
        if not isinstance(doc, dict) or "construction" not in doc:
            raise ValueError('construction document needs a "construction" key')
        return cls(doc["construction"], dict(doc.get("params") or {}))

    @classmethod
    def from_json(cls, text: str) -> "ConstructionSpec":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {"construction": self.construction, "params": self.params}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @property
    def order(self) -> Optional[int]:
        """The basis order the construction targets, when it fixes one."""
        if self.construction in ("cassels_progressions", "cassels_order2"):
            return 2
        return self.params.get("h")


@dataclass
class Built:
    sequence: MonotoneSequence
    meta: dict


def build(spec: ConstructionSpec) -> Built:
    """Generate the sequence a spec describes, plus construction tables."""
    p = spec.params
    name = spec.construction
    if name == "raikov_stohr":
        return Built(raikov_stohr(p["h"], p["bound"]), {})
    if name == "g_adic":
        return Built(g_adic_component(GAdicSpec(p["g"], tuple(p["exponents"]), p["bound"])), {})
    if name == "jia_nathanson":
        if "parts" in p:
            part = PartitionSpec(p["g"], p["h"], tuple(tuple(x) for x in p["parts"]), p["bound"])
        else:
            part = PartitionSpec.residues(p["g"], p["h"], p["bound"])
        return Built(jia_nathanson(part), {"parts": [list(x) for x in part.parts]})
    if name == "cassels_progressions":
        res = cassels_progressions(CasselsSpec2(tuple(p["q"]), tuple(p["m"]), p["K"]))
        return Built(res.A, {"blocks": res.table()})
    if name == "cassels_order2":
        if "q" in p:
            if "K" not in p:
                raise ValueError("cassels_order2: K is required with an explicit q")
            res = cassels_order2(p["q"], p["K"])
        elif "K" in p:
            res = cassels_order2(fibonacci_q(p["K"] + 4), p["K"])
        else:
            res = fibonacci_cassels_covering(p["bound"])
        return Built(res.A, {"blocks": res.table()})
    if name == "cassels_block":
        bs = BlockSpec(p["h"], p["v"], p["L"])
        cov = bs.coverage_interval()
        return Built(cassels_block(bs), {"g": bs.g, "coverage_interval": [cov.lo, cov.hi], "hi_inclusive": False})
    if name == "cassels_order_h":
        res = cassels_order_h(p["h"], p["j_max"])
        return Built(res.A, res.meta())
    raise ValueError(f"unknown construction {name!r}")


def fraction_decimal(x: Fraction, places: int = DECIMAL_PLACES) -> str:
    """Decimal string of x truncated toward zero to ``places`` digits."""
    x = Fraction(x)
    sign = "-" if x < 0 else ""
    x = abs(x)
    whole, rest = divmod(x.numerator, x.denominator)
    if places <= 0:
        return f"{sign}{whole}"
    digits = rest * 10**places // x.denominator
    return f"{sign}{whole}.{digits:0{places}d}"


def jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return {
            "numerator": obj.numerator,
            "denominator": obj.denominator,
            "decimal": fraction_decimal(obj),
        }
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


@dataclass
class VerificationReport:
    config: dict
    construction: Optional[dict]
    construction_meta: dict = field(default_factory=dict)
    coverage: Optional[dict] = None
    metrics: Optional[dict] = None
    checks: dict = field(default_factory=dict)
    growth: Optional[GrowthMetrics] = None
    timing: Optional[dict] = None
    version: str = __version__

    def to_dict(self) -> dict:
        doc = {
            "schema": SCHEMA,
            "version": self.version,
            "config": self.config,
            "construction": self.construction,
            "construction_meta": self.construction_meta,
            "coverage": self.coverage,
            "metrics": self.metrics,
            "checks": self.checks,
        }
        if self.timing is not None:
            doc["timing"] = self.timing
        return jsonable(doc)


def metrics_csv(metrics: Optional[GrowthMetrics]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    if metrics is not None:
        for kind, where, value in metrics.rows():
            writer.writerow([kind, where, value.numerator, value.denominator, fraction_decimal(value)])
    return buf.getvalue()


def emit_report(report: VerificationReport, fmt: str = "json") -> bytes:
    """Canonical bytes: sorted keys, rationals as numerator/denominator/decimal."""
    if fmt == "json":
        return (json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n").encode("ascii")
    if fmt == "csv":
        return metrics_csv(report.growth).encode("ascii")
    raise ValueError(f"unknown format {fmt!r}")
