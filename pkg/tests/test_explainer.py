import json
import math
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from react_planner.execution import FailureMessage
from react_planner.explainer import (
    EMBED_DIM,
    DatasetError,
    Explainer,
    FailureRecord,
    cosine,
    embed,
    fnv1a_64,
    load_dataset,
    parse_dataset,
    retrieve,
    suggest,
)
from react_planner.world_sim import too_far_message

WORKED_REQUEST = "Go to the table in the kitchen, pick up the bottle and bring it to the bedroom"


def record(id, request, skill="PICK", code="OBJECT_TOO_FAR", suggestion="move closer"):
    return FailureRecord(id, skill, request, code, "reason", suggestion)


# published FNV-1a 64-bit test vectors
@pytest.mark.parametrize(
    "data, value",
    [(b"", 0xCBF29CE484222325), (b"a", 0xAF63DC4C8601EC8C), (b"foobar", 0x85944171F73967E8)],
)
def test_fnv_vectors(data, value):
    assert fnv1a_64(data) == value


def oracle_embed(text):
    # independent restatement: count tokens first, then hash the distinct ones
    tokens = Counter(t for t in "".join(c if c.isascii() and c.isalnum() else " " for c in text.lower()).split())
    vec = [0.0] * EMBED_DIM
    for tok, n in tokens.items():
        h = 0xCBF29CE484222325
        for b in tok.encode():
            h = ((h ^ b) * 0x100000001B3) % 2**64
        vec[h % EMBED_DIM] += n
    norm = math.sqrt(sum(v * v for v in vec))
    return [v / norm for v in vec] if norm else vec


@given(st.text(alphabet="abcxyz019 ,.-_!ABC", max_size=60))
def test_embed_matches_oracle(text):
    assert embed(text) == pytest.approx(oracle_embed(text), abs=1e-12)


def test_embed_zero_and_unit():
    assert embed("") == (0.0,) * EMBED_DIM
    assert embed("!!! ...") == (0.0,) * EMBED_DIM
    assert math.isclose(math.sqrt(sum(x * x for x in embed("pick the bottle"))), 1.0, abs_tol=1e-9)


def test_repeated_token_same_direction():
    assert cosine(embed("bottle bottle"), embed("bottle")) == pytest.approx(1.0, abs=1e-12)
    assert embed("Bottle") == embed("bottle")


def test_cosine_examples():
    v = embed("kitchen table")
    assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)
    a = [0.0] * EMBED_DIM
    b = [0.0] * EMBED_DIM
    a[0], b[1] = 1.0, 1.0
    assert cosine(a, b) == 0.0
    c = [0.0] * EMBED_DIM
    c[0] = c[1] = 1 / math.sqrt(2)
    assert abs(cosine(a, c) - 0.70711) <= 1e-5
    assert cosine([0.0] * EMBED_DIM, a) == 0.0
    with pytest.raises(ValueError):
        cosine([1.0], [1.0, 0.0])


def test_worked_example_top_record():
    hits = retrieve("PICK", "OBJECT_TOO_FAR", WORKED_REQUEST, load_dataset())
    assert hits[0][0].suggestion == "Use the GOTO skill to move near the object to pick"


def test_retrieve_filter_is_exact():
    data = load_dataset()
    for skill in ("PICK", "PLACE", "GOTO"):
        for code in {r.error_code for r in data}:
            for rec, _ in retrieve(skill, code, WORKED_REQUEST, data):
                assert (rec.skill, rec.error_code) == (skill, code)


def test_retrieve_empty_and_ties():
    assert retrieve("PICK", "OBJECT_TOO_FAR", "x", []) == []
    data = [record("r2", "pick the cup"), record("r1", "pick the cup"), record("r0", "fly away")]
    ids = [rec.id for rec, _ in retrieve("PICK", "OBJECT_TOO_FAR", "pick the cup", data)]
    assert ids == ["r1", "r2", "r0"]


def test_suggest_worked_example():
    failure = FailureMessage("PICK", "OBJECT_TOO_FAR", too_far_message("PICK"), "approach_arm")
    s = suggest(failure, WORKED_REQUEST, load_dataset())
    assert s.text == "Use the GOTO skill to move near the object to pick"
    assert s.matched_record == "f001"
    assert s.similarity >= 0.35


def test_suggest_none_cases():
    failure = FailureMessage("PICK", "OBJECT_TOO_FAR", "r", "approach_arm")
    assert suggest(FailureMessage("GOTO", "NOPE", "r", "c"), WORKED_REQUEST, load_dataset()) is None
    data = [record("r1", "bring me a blanket from the sofa please now")]
    sim = cosine(embed("pick the cup"), embed(data[0].user_request))
    assert sim < 0.35
    assert suggest(failure, "pick the cup", data) is None
    assert Explainer(data, threshold=sim).explain(failure, "pick the cup") is not None


def test_dataset_validation(tmp_path):
    good = json.dumps({"id": "a", "skill": "PICK", "user_request": "u", "error_code": "E", "failure_reason": "r", "suggestion": "s"})
    assert len(parse_dataset([good, "", good.replace('"a"', '"b"')])) == 2
    with pytest.raises(DatasetError):
        parse_dataset([good, good])
    with pytest.raises(DatasetError):
        parse_dataset(["{not json"])
    with pytest.raises(DatasetError):
        parse_dataset([good.replace('"s"', '""')])
    with pytest.raises(DatasetError):
        parse_dataset([json.dumps({"id": "a"})])
    path = tmp_path / "d.jsonl"
    path.write_text(good + "\n")
    assert load_dataset(str(path))[0].id == "a"


def test_seed_dataset_loads():
    data = load_dataset()
    assert len(data) >= 10
    assert len({r.id for r in data}) == len(data)
