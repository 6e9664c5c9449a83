"""CVSS v3.1 base scoring and roll-up of per-element metric arrays.

Arithmetic is done in ``Decimal`` at high precision, so every intermediate
value is exact and the final Roundup is bit-for-bit reproducible.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass, fields
from decimal import Decimal
from typing import Mapping, Sequence

from .errors import ValidationError

D = Decimal

METRICS = ("AV", "AC", "PR", "UI", "S", "C", "I", "A")

# most severe first
SEVERITY = {
    "AV": "NALP",
    "AC": "LH",
    "PR": "NLH",
    "UI": "NR",
    "S": "CU",
    "C": "HLN",
    "I": "HLN",
    "A": "HLN",
}

_CIA_NAMES = {"High": "H", "Low": "L", "None": "N"}
LONG_NAMES = {
    "AV": {"Network": "N", "Adjacent": "A", "Adjacent Network": "A", "Local": "L", "Physical": "P"},
    "AC": {"Low": "L", "High": "H"},
    "PR": {"None": "N", "Low": "L", "High": "H"},
    "UI": {"None": "N", "Required": "R"},
    "S": {"Unchanged": "U", "Changed": "C"},
    "C": _CIA_NAMES,
    "I": _CIA_NAMES,
    "A": _CIA_NAMES,
}

_AV = {"N": D("0.85"), "A": D("0.62"), "L": D("0.55"), "P": D("0.2")}
_AC = {"L": D("0.77"), "H": D("0.44")}
_PR_UNCHANGED = {"N": D("0.85"), "L": D("0.62"), "H": D("0.27")}
_PR_CHANGED = {"N": D("0.85"), "L": D("0.68"), "H": D("0.5")}
_UI = {"N": D("0.85"), "R": D("0.62")}
_CIA = {"H": D("0.56"), "L": D("0.22"), "N": D(0)}

_EXACT = decimal.Context(prec=300, rounding=decimal.ROUND_HALF_EVEN)


@dataclass(frozen=True)
class CvssVector:
    AV: str
    AC: str
    PR: str
    UI: str
    S: str
    C: str
    I: str  # noqa: E741
    A: str

    def __post_init__(self) -> None:
        for metric in METRICS:
            if getattr(self, metric) not in SEVERITY[metric]:
                raise ValidationError(f"invalid value {getattr(self, metric)!r} for metric {metric}")

    def vector_string(self) -> str:
        return "CVSS:3.1/" + "/".join(f"{m}:{getattr(self, m)}" for m in METRICS)

    def __str__(self) -> str:
        return self.vector_string()

    @classmethod
    def parse(cls, text: str) -> "CvssVector":
        parts = text.strip().split("/")
        if not parts or parts[0] != "CVSS:3.1":
            raise ValidationError(f"not a CVSS 3.1 vector: {text!r}")
        values = {}
        for part in parts[1:]:
            key, _, value = part.partition(":")
            if key not in SEVERITY or key in values:
                raise ValidationError(f"bad metric {part!r} in {text!r}")
            values[key] = value
        if tuple(values) != METRICS:
            raise ValidationError(f"metrics missing or out of order in {text!r}")
        return cls(**values)

    def raised(self, metric: str) -> "CvssVector | None":
        """Same vector with ``metric`` one step more severe, or None at the top."""
        order = SEVERITY[metric]
        pos = order.index(getattr(self, metric))
        if pos == 0:
            return None
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values[metric] = order[pos - 1]
        return CvssVector(**values)


@dataclass(frozen=True)
class CvssResult:
    base_score: Decimal
    vector_string: str

    def to_json(self) -> dict:
        return {"score": float(self.base_score), "vs": self.vector_string}


def roundup(x: Decimal) -> Decimal:
    """Smallest one-decimal number >= x, guarded against representation noise."""
    int_input = int((x * 100000).to_integral_value(rounding=decimal.ROUND_HALF_UP))
    if int_input % 10000 == 0:
        return D(int_input) / D(100000)
    return D(int_input // 10000 + 1) / D(10)


def base_score(v: CvssVector) -> CvssResult:
    with decimal.localcontext(_EXACT):
        changed = v.S == "C"
        iss = 1 - (1 - _CIA[v.C]) * (1 - _CIA[v.I]) * (1 - _CIA[v.A])
        if changed:
            impact = D("7.52") * (iss - D("0.029")) - D("3.25") * (iss - D("0.02")) ** 15
        else:
            impact = D("6.42") * iss
        pr = (_PR_CHANGED if changed else _PR_UNCHANGED)[v.PR]
        exploitability = D("8.22") * _AV[v.AV] * _AC[v.AC] * pr * _UI[v.UI]
        if impact <= 0:
            score = D("0.0")
        elif changed:
            score = roundup(min(D("1.08") * (impact + exploitability), D(10)))
        else:
            score = roundup(min(impact + exploitability, D(10)))
    return CvssResult(score.quantize(D("0.1")), v.vector_string())


def score_vector(text: str) -> Decimal:
    return base_score(CvssVector.parse(text)).base_score


# ------------------------------------------------------------------ roll-up


def metric_code(metric: str, value: str) -> str:
    """Translate a long-form model value ("Physical") or a one-letter code."""
    table = LONG_NAMES[metric]
    if value in table:
        return table[value]
    if value in SEVERITY[metric]:
        return value
    raise ValidationError(f"unparseable value {value!r} for metric {metric}", code="bad-metric-value")


def _metric_of(key: str) -> str:
    name = key.removesuffix("_inherited").upper()
    if name not in SEVERITY:
        raise ValidationError(f"unknown metric {key!r}", code="bad-metric-value")
    return name


def normalize_arrays(port_arrays: Mapping[str, Sequence[str] | str]) -> dict[str, list[str]]:
    """Keyed by metric code, values translated to one-letter codes."""
    out: dict[str, list[str]] = {}
    for key, values in port_arrays.items():
        metric = _metric_of(key)
        if isinstance(values, str):
            values = [values]
        if not values:
            raise ValidationError(f"empty array for metric {metric}", code="missing-in-port")
        out[metric] = [metric_code(metric, str(v)) for v in values]
    missing = [m for m in METRICS if m not in out]
    if missing:
        raise ValidationError(f"missing metrics: {', '.join(missing)}", code="missing-in-port")
    return out


def worst_case_vector(arrays: Mapping[str, Sequence[str]]) -> CvssVector:
    return CvssVector(**{m: min(arrays[m], key=SEVERITY[m].index) for m in METRICS})


def element_vectors(arrays: Mapping[str, Sequence[str]]) -> list[CvssVector]:
    """Aligned per-element vectors; singleton arrays broadcast to the common length."""
    lengths = {len(arrays[m]) for m in METRICS} - {1}
    if len(lengths) > 1:
        raise ValidationError(
            "max-score needs equal-length metric arrays, got lengths "
            + ", ".join(f"{m}={len(arrays[m])}" for m in METRICS),
            code="length-mismatch",
        )
    n = lengths.pop() if lengths else 1
    cols = {m: arrays[m] * n if len(arrays[m]) == 1 else list(arrays[m]) for m in METRICS}
    return [CvssVector(**{m: cols[m][k] for m in METRICS}) for k in range(n)]


STRATEGIES = ("worst-case", "max-score")


def roll_up(port_arrays: Mapping[str, Sequence[str] | str], strategy: str = "worst-case") -> CvssResult:
    arrays = normalize_arrays(port_arrays)
    if strategy == "worst-case":
        return base_score(worst_case_vector(arrays))
    if strategy == "max-score":
        results = [base_score(v) for v in element_vectors(arrays)]
        return max(results, key=lambda r: r.base_score)  # first wins on ties
    raise ValidationError(f"unknown roll-up strategy {strategy!r}", code="bad-strategy")
