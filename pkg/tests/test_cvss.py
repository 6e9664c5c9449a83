from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import golden
from oracles import all_vectors, oracle_cvss
from defii.cvss import (
    METRICS,
    SEVERITY,
    CvssVector,
    base_score,
    metric_code,
    roll_up,
    score_vector,
)
from defii.errors import ValidationError

VECTORS = [CvssVector.parse(v) for v in all_vectors()]
vectors = st.sampled_from(VECTORS)


def test_exhaustive_agreement_with_oracle():
    assert len(VECTORS) == 2592
    for v in VECTORS:
        assert base_score(v).base_score == oracle_cvss(v.vector_string()), v


@pytest.mark.parametrize(
    "vector, score",
    [
        (golden("thread.json")["case-study"]["vs"], "1.6"),
        ("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", "9.8"),
        ("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:C/C:N/I:N/A:N", "0.0"),
        ("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:C/C:H/I:H/A:H", "10.0"),
    ],
)
def test_known_scores(vector, score):
    assert score_vector(vector) == Decimal(score)


def test_range_granularity_monotonicity():
    for v in VECTORS:
        s = base_score(v).base_score
        assert Decimal(0) <= s <= Decimal(10)
        assert s == s.quantize(Decimal("0.1"))
        for m in METRICS:
            up = v.raised(m)
            if up is not None:
                assert base_score(up).base_score >= s, (v, m)


def test_scope_sensitivity():
    for v in VECTORS:
        if v.S == "U" and (v.C, v.I, v.A) != ("N", "N", "N"):
            assert base_score(v.raised("S")).base_score >= base_score(v).base_score


@given(vectors)
def test_vector_round_trip(v):
    assert CvssVector.parse(v.vector_string()) == v
    assert v.vector_string().startswith("CVSS:3.1/AV:")


@pytest.mark.parametrize("bad", ["AV:N/AC:L", "CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H",
                                 "CVSS:3.1/AC:L/AV:N/PR:N/UI:N/S:U/C:H/I:H/A:H", "CVSS:3.1/AV:X/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"])
def test_parse_rejects(bad):
    with pytest.raises(ValidationError):
        CvssVector.parse(bad)


def _long(metric, code):
    from defii.cvss import LONG_NAMES

    return next(k for k, c in LONG_NAMES[metric].items() if c == code)


def arrays_of(vs):
    return {f"{m.lower()}_inherited": [_long(m, getattr(v, m)) for v in vs] for m in METRICS}


@given(vectors)
def test_singleton_rollup_is_plain_score(v):
    arrays = arrays_of([v])
    assert roll_up(arrays, "worst-case") == base_score(v)
    assert roll_up(arrays, "max-score") == base_score(v)


@given(st.lists(vectors, min_size=1, max_size=6))
def test_rollup_dominance(vs):
    arrays = arrays_of(vs)
    worst = roll_up(arrays, "worst-case").base_score
    best = roll_up(arrays, "max-score").base_score
    assert worst >= best == max(base_score(v).base_score for v in vs)


def test_worst_case_per_metric():
    arrays = arrays_of([CvssVector.parse(golden("thread.json")["case-study"]["vs"])])
    arrays["s_inherited"] = ["Changed", "Unchanged", "Unchanged"]
    arrays["av_inherited"] = ["Physical", "Network"]
    r = roll_up(arrays)
    assert "/AV:N/" in r.vector_string and "/S:C/" in r.vector_string


def test_table_rows_under_max_score(engine):
    view = engine.view("CVSS_Model", engine.instantiate("CVSS_Model").rsplit("/", 1)[1]).values
    arrays = {k: v for k, v in view.items() if k.endswith("_inherited")}
    n = len(arrays["av_inherited"])
    by_hand = []
    for k in range(n):
        codes = {m: metric_code(m, arrays[f"{m.lower()}_inherited"][k if len(arrays[f"{m.lower()}_inherited"]) > 1 else 0]) for m in METRICS}
        by_hand.append(oracle_cvss("CVSS:3.1/" + "/".join(f"{m}:{codes[m]}" for m in METRICS)))
    assert roll_up(arrays, "max-score").base_score == max(by_hand)
    expected = golden("thread.json")["worst-case"]
    r = roll_up(arrays, "worst-case")
    assert (str(r.base_score), r.vector_string) == (expected["score"], expected["vs"])
    assert oracle_cvss(expected["vs"]) == Decimal(expected["score"])


def test_rollup_errors():
    arrays = arrays_of(VECTORS[:2])
    with pytest.raises(ValidationError, match="unparseable"):
        roll_up({**arrays, "av_inherited": ["Orbital"]})
    with pytest.raises(ValidationError, match="equal-length"):
        roll_up({**arrays, "ac_inherited": ["Low", "Low", "High"]}, "max-score")
    with pytest.raises(ValidationError, match="missing"):
        roll_up({k: v for k, v in arrays.items() if k != "ui_inherited"})
    with pytest.raises(ValidationError):
        roll_up(arrays, "average")


def test_severity_tables_cover_codes():
    assert set(SEVERITY) == set(METRICS)
