import random

import pytest
from corpora import random_corpus

from monoschema import config as C
from monoschema.config import DiscoveryConfig
from monoschema.emit import emit_json_schema
from monoschema.evalgen import (
    GenerationError,
    GeneratorConfig,
    evaluate_validity,
    exclude_conforming,
    generate_documents,
    overfit_split,
    split_indices,
)
from monoschema.fold import fold_streaming
from monoschema.schema import project

PERSON = {"firstName": "Ann", "lastName": "Lee", "age": 31}


def test_random_person_shape(min_cfg):
    s = fold_streaming([PERSON], min_cfg)
    docs = generate_documents(s, GeneratorConfig(seed=1, inclusion_probability=0.5), 50)
    for d in docs:
        assert set(d) <= {"firstName", "lastName", "age"}
        assert all(isinstance(d[k], str) for k in ("firstName", "lastName") if k in d)
        assert "age" not in d or isinstance(d["age"], int)


def test_zero_docs(min_cfg):
    assert generate_documents(fold_streaming([PERSON], min_cfg), GeneratorConfig(), 0) == []


@pytest.mark.parametrize("mode", ["random", "sampled"])
def test_generated_docs_validate_against_min_schema(mode, all_cfg):
    corpus = random_corpus(1, 300)
    ref = fold_streaming(corpus, all_cfg)
    minimal = project(ref, C.MIN_FACETS)
    docs = generate_documents(minimal, GeneratorConfig(mode=mode, seed=2), 300, ref)
    assert evaluate_validity(emit_json_schema(minimal), docs).validity_fraction == 1.0


def test_sampled_values_come_from_reservoirs(all_cfg):
    corpus = [{"c": c} for c in "xyz" * 10]
    ref = fold_streaming(corpus, all_cfg)
    docs = generate_documents(project(ref, C.MIN_FACETS), GeneratorConfig(mode="sampled", seed=0, inclusion_probability=1.0), 40, ref)
    assert {d["c"] for d in docs} <= {"x", "y", "z"}


def test_sampled_without_examples(min_cfg):
    s = fold_streaming([PERSON], min_cfg)
    with pytest.raises(GenerationError):
        generate_documents(s, GeneratorConfig(mode="sampled"), 5)


def test_generation_deterministic(min_cfg):
    s = fold_streaming(random_corpus(2, 50), min_cfg)
    assert generate_documents(s, GeneratorConfig(seed=5), 30) == generate_documents(s, GeneratorConfig(seed=5), 30)


def test_random_doc_fails_format_schema(simple_cfg):
    s = emit_json_schema(fold_streaming([{"homepage": "https://a.org"}, {"homepage": "http://b.net/x"}], simple_cfg))
    assert evaluate_validity(s, [{"homepage": "t1KSAC"}]).validity_fraction == 0.0


def test_evaluate_counts():
    rep = evaluate_validity({"type": "integer"}, [1] * 50 + ["x"] * 50)
    assert (rep.total, rep.valid, rep.invalid, rep.validity_fraction) == (100, 50, 50, 0.5)
    empty = evaluate_validity({"type": "integer"}, [])
    assert empty.validity_fraction is None and "validity_fraction" not in empty.to_dict()


def test_exclude_conforming():
    ref = {"type": "object", "properties": {"a": {"type": "integer"}}}
    assert exclude_conforming([{"a": 1}, {"a": "x"}], ref) == [{"a": "x"}]


def test_split_deterministic():
    assert split_indices(20, 0.9, 3) == split_indices(20, 0.9, 3)
    tr, te = split_indices(20, 0.9, 3)
    assert len(tr) == 18 and sorted(tr + te) == list(range(20))


def test_overfit_identical_docs(all_cfg):
    assert overfit_split([PERSON] * 20, all_cfg).overfit == 0.0


def test_overfit_min_single_structure(min_cfg):
    rng = random.Random(0)
    docs = [{"a": rng.random(), "b": str(rng.random()), "c": [rng.randint(0, 9)] * rng.randint(1, 5)} for _ in range(200)]
    assert overfit_split(docs, min_cfg, 0.9, 1).overfit == 0.0


def heavy_tail_corpus(n=500, seed=0):
    rng = random.Random(seed)
    return [{"s": "x" * int(rng.paretovariate(1.0))} for _ in range(n)]


def test_overfit_heavy_tail_lengths_oracle():
    docs = heavy_tail_corpus()
    cfg = DiscoveryConfig.from_monoids("ObjectTypes,ArrayType,MaxMinStringLength")
    seen_positive = False
    for seed in range(20):
        train, test = split_indices(len(docs), 0.9, seed)
        lengths = [len(docs[i]["s"]) for i in train]
        lo, hi = min(lengths), max(lengths)
        expected = sum(not lo <= len(docs[i]["s"]) <= hi for i in test) / len(test)
        got = overfit_split(docs, cfg, 0.9, seed).overfit
        assert got == pytest.approx(expected)
        seen_positive |= got > 0
    assert seen_positive


def test_overfit_too_small(min_cfg):
    with pytest.raises(ValueError):
        overfit_split([{}] * 9, min_cfg)


def test_monotone_validity():
    docs = random_corpus(3, 400)
    train, test = docs[:300], docs[300:]
    fracs = [
        evaluate_validity(emit_json_schema(fold_streaming(train, DiscoveryConfig.from_monoids(m))), test).validity_fraction
        for m in ("min", "simple", "all")
    ]
    assert fracs[0] >= fracs[1] >= fracs[2]
