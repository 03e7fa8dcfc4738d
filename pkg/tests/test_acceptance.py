"""Acceptance suite: one test per criterion, each printed as a PASS/FAIL line in the summary.

Every expected value is produced by an independent oracle (two-pass
moments, exact distinct counts, exact-sample KS, brute-force folds or
hand-evaluated merge formulas) before the implementation is consulted.
"""

from __future__ import annotations

import contextlib
import functools
import gc
import io
import json
import math
import random
import statistics
import string
import time
import tracemalloc

import numpy as np
import pytest
from corpora import random_doc
from corpora_amazon import product_corpus
from scipy import stats as sps

from monoschema import config as C
from monoschema.analysis import detect_outliers, histogram_ks, suggest_foreign_keys, suggest_primary_keys
from monoschema.cli import main as cli_main
from monoschema.config import DiscoveryConfig
from monoschema.emit import deterministic_view, dumps, emit_json_schema, strip_annotations
from monoschema.evalgen import GeneratorConfig, evaluate_validity, generate_documents, overfit_split, split_indices
from monoschema.facets import (
    ArrayType,
    AttributeCounts,
    Dependencies,
    Examples,
    Format,
    MaxMin,
    Multiple,
    ObjectTypes,
    Pattern,
    Required,
    Unique,
)
from monoschema.fold import discover, fold_streaming
from monoschema.hashing import hash128
from monoschema.moments import MomentsAccumulator
from monoschema.pds import BloomFilter, HyperLogLog, StreamingHistogram, bloom_false_positive_rate
from monoschema.schema import canonicalize, discover_document, project
from monoschema.validate import is_valid

ALL = DiscoveryConfig.from_monoids("all")
MIN = DiscoveryConfig.from_monoids("min")


def view_bytes(node) -> str:
    return dumps(deterministic_view(emit_json_schema(canonicalize(node))))


def mixed_corpus(seed: int, n: int) -> list:
    """Mostly objects of four shapes, with some top-level arrays and scalars."""
    rng = random.Random(seed)
    docs = []
    for _ in range(n):
        r = rng.random()
        if r < 0.9:
            docs.append(random_doc(rng))
        elif r < 0.95:
            docs.append([random_doc(rng) for _ in range(rng.randint(0, 3))])
        else:
            docs.append(rng.choice([None, True, rng.randint(-5, 5), "s" * rng.randint(0, 4), 2.5]))
    return docs


# --- criterion 1 -------------------------------------------------------------


def _fold(values, of, identity):
    acc = identity
    for v in values:
        acc = acc.combine(of(v))
    return acc


def _small_doc(rng):
    keys = rng.sample("abcd", rng.randint(0, 3))
    return {k: rng.choice([1, 2.5, "x", [1, 2], [rng.randint(0, 3)] * rng.randint(0, 3), {"z": 1}, None]) for k in keys}


def _facet_generators():
    bloom = lambda v: BloomFilter(1024, 3).add(v)  # noqa: E731
    hll = lambda v: HyperLogLog(6).add(v)  # noqa: E731

    def words(rng):
        return ["".join(rng.choice("abc") for _ in range(rng.randint(0, 4))) for _ in range(rng.randint(0, 3))]

    def keysets(rng):
        return [frozenset(rng.sample("abcde", rng.randint(0, 4))) for _ in range(rng.randint(0, 3))]

    def objects(rng):
        docs = [_small_doc(rng) for _ in range(rng.randint(0, 3))]
        return _fold(docs, lambda d: discover_document(d, MIN).facets[C.OBJECT_TYPES], ObjectTypes.identity())

    def arrays(rng):
        docs = [[rng.choice([1, "a", [2], None]) for _ in range(rng.randint(0, 3))] for _ in range(rng.randint(0, 3))]
        return _fold(docs, lambda d: discover_document(d, MIN).facets[C.ARRAY_TYPE], ArrayType.identity())

    nums = lambda rng: [rng.choice([rng.randint(-60, 60), rng.randint(-6, 6) * 0.5]) for _ in range(rng.randint(0, 3))]  # noqa: E731
    return {
        "ObjectTypes": (ObjectTypes.identity(), objects),
        "ArrayType": (ArrayType.identity(), arrays),
        "Required": (Required.identity(), lambda r: _fold(keysets(r), Required, Required.identity())),
        "AttributeCounts": (AttributeCounts.identity(), lambda r: _fold(keysets(r), AttributeCounts.of, AttributeCounts.identity())),
        "Dependencies": (Dependencies.identity(), lambda r: _fold(keysets(r), Dependencies.of, Dependencies.identity())),
        "Unique": (
            Unique.identity(),
            lambda r: _fold([[r.randint(0, 2) for _ in range(r.randint(0, 3))] for _ in range(r.randint(0, 2))], Unique.of, Unique.identity()),
        ),
        "MaxMinNumber": (MaxMin.identity(), lambda r: _fold(nums(r), MaxMin.of, MaxMin.identity())),
        "MaxMinStringLength": (MaxMin.identity(), lambda r: _fold([len(w) for w in words(r)], MaxMin.of, MaxMin.identity())),
        "MaxMinArrayLength": (MaxMin.identity(), lambda r: _fold([r.randint(0, 9) for _ in range(r.randint(0, 3))], MaxMin.of, MaxMin.identity())),
        "Multiple": (Multiple.identity(), lambda r: _fold(nums(r), Multiple.of, Multiple.identity())),
        "Pattern": (Pattern.identity(), lambda r: _fold(words(r), Pattern.of, Pattern.identity())),
        "Format": (
            Format.identity(),
            lambda r: _fold([r.choice(["a@b.co", "2020-01-01", "plain", "::1"]) for _ in range(r.randint(0, 2))], Format.of, Format.identity()),
        ),
        "Bloom": (BloomFilter(1024, 3), lambda r: _fold([r.randint(0, 50) for _ in range(r.randint(0, 4))], bloom, BloomFilter(1024, 3))),
        "HLL": (HyperLogLog(6), lambda r: _fold([r.randint(0, 50) for _ in range(r.randint(0, 4))], hll, HyperLogLog(6))),
    }


def _moments_close(x: MomentsAccumulator, y: MomentsAccumulator, rel=1e-9) -> bool:
    if x.n != y.n:
        return False
    s2 = max(abs(x.m2), abs(y.m2), 1e-300)
    scale = {"mean": max(abs(x.mean), math.sqrt(s2 / max(x.n, 1))), "m2": s2, "m3": s2**1.5, "m4": s2 * s2}
    return all(abs(getattr(x, k) - getattr(y, k)) <= rel * max(abs(getattr(x, k)), abs(getattr(y, k)), scale[k]) for k in scale)


@pytest.mark.criterion(1, "monoid laws: 1,000 trials per deterministic facet; Histogram/Stats tolerances")
def test_criterion_1_monoid_laws():
    start = time.perf_counter()
    rng = random.Random(1)
    failures = []
    for name, (identity, gen) in _facet_generators().items():
        for _ in range(1000):
            a, b, c = gen(rng), gen(rng), gen(rng)
            if not (a.combine(identity) == a and identity.combine(a) == a):
                failures.append((name, "identity"))
            if a.combine(b) != b.combine(a):
                failures.append((name, "commutativity"))
            if a.combine(b).combine(c) != a.combine(b.combine(c)):
                failures.append((name, "associativity"))
    # Stats: exact commutativity, associativity within 1e-9 relative
    for _ in range(1000):
        parts = [[rng.uniform(-100, 100) + 50 for _ in range(rng.randint(0, 20))] for _ in range(3)]
        a, b, c = (_fold(p, MomentsAccumulator.of, MomentsAccumulator()) for p in parts)
        if a.combine(b) != b.combine(a):
            failures.append(("Stats", "commutativity"))
        if not _moments_close(a.combine(b).combine(c), a.combine(b.combine(c))):
            failures.append(("Stats", "associativity"))
    # Histogram: exact commutativity on small inputs
    for _ in range(1000):
        h = [_fold([rng.randint(0, 40) for _ in range(rng.randint(0, 15))], lambda v: StreamingHistogram(8, ((v, 1),)), StreamingHistogram(8)) for _ in range(2)]
        if h[0].combine(h[1]) != h[1].combine(h[0]):
            failures.append(("Histogram", "commutativity"))
    # Histogram associativity: quantiles within 5% on n >= 1,000 uniform samples
    nrng = np.random.default_rng(1)
    qs = np.linspace(0.05, 0.95, 19)
    for _ in range(20):
        xs = [nrng.uniform(0, 1, 400) for _ in range(3)]
        a, b, c = (_fold(x.tolist(), lambda v: StreamingHistogram(100, ((v, 1),)), StreamingHistogram(100)) for x in xs)
        left, right = a.combine(b).combine(c), a.combine(b.combine(c))
        exact = np.quantile(np.concatenate(xs), qs)
        for q, e in zip(qs, exact):
            if abs(left.quantile(q) - right.quantile(q)) > 0.05 or abs(left.quantile(q) - e) > 0.05:
                failures.append(("Histogram", f"associativity q={q:.2f}"))
    elapsed = time.perf_counter() - start
    assert not failures, failures[:10]
    assert elapsed < 120, f"law suite took {elapsed:.1f}s"


# --- criterion 2 -------------------------------------------------------------


@pytest.mark.criterion(2, "soundness: 20 corpora x 1k docs x {min,simple,all} x {kind,label}")
def test_criterion_2_soundness():
    failures = 0
    for seed in range(20):
        docs = mixed_corpus(seed, 1000)
        for monoids in ("min", "simple", "all"):
            for eq in ("kind", "label"):
                cfg = DiscoveryConfig.from_monoids(monoids, equivalence=eq, rng_seed=seed)
                schema = emit_json_schema(fold_streaming(docs, cfg))
                failures += sum(not is_valid(schema, d) for d in docs)
    assert failures == 0


# --- criterion 3 -------------------------------------------------------------


@pytest.mark.criterion(3, "streaming == tree reduce for workers {1,2,4,8} x 10 permutations")
def test_criterion_3_streaming_equals_tree():
    docs = mixed_corpus(99, 500)
    reference = view_bytes(fold_streaming(docs, ALL))
    rng = random.Random(3)
    mismatches = []
    for perm in range(10):
        shuffled = docs[:]
        rng.shuffle(shuffled)
        if view_bytes(fold_streaming(shuffled, ALL)) != reference:
            mismatches.append((perm, "streaming"))
        for workers in (1, 2, 4, 8):
            if view_bytes(discover(shuffled, ALL, "tree", workers)) != reference:
                mismatches.append((perm, workers))
    assert not mismatches


# --- criterion 4 -------------------------------------------------------------


def _hll_check():
    values = random.Random(4).sample(range(2**48), 100_000)
    exact = len(set(values))
    hll = HyperLogLog(12)
    for v in values:
        hll = hll.add(v)
    return exact, hll.estimate()


def _bloom_check():
    rng = random.Random(44)
    members = [f"m{rng.getrandbits(64)}" for _ in range(10_000)]
    absent = [f"a{rng.getrandbits(64)}" for _ in range(10_000)]
    bloom = BloomFilter(65536, 7)
    for v in members:
        bloom = bloom.add(v)
    false_neg = sum(v not in bloom for v in members)
    fpr = sum(v in bloom for v in absent) / len(absent)
    return false_neg, fpr, bloom_false_positive_rate(65536, 7, len(members))


@pytest.mark.criterion(4, "PDS accuracy: HLL p=12 within 5% at 100k; Bloom FPR <= 3x analytic, no false negatives")
def test_criterion_4_pds_accuracy():
    exact, est = _hll_check()
    assert exact == 100_000
    assert abs(est - exact) / exact <= 0.05
    false_neg, fpr, analytic = _bloom_check()
    assert false_neg == 0
    assert fpr <= 3 * analytic


# --- criterion 5 -------------------------------------------------------------


@pytest.mark.criterion(5, "constraint discovery on a 10k product corpus")
def test_criterion_5_constraints():
    docs = product_corpus(10_000, seed=5)
    schema = fold_streaming(docs, ALL)
    # oracle: exact distinct counts
    assert len({d["asin"] for d in docs}) == 10_000
    assert len({d["salesRank"]["category"] for d in docs}) == 3
    pks = {s.subject for s in suggest_primary_keys(schema, len(docs))}
    assert "/asin" in pks
    assert "/salesRank/category" not in pks
    fks = {(s.subject, s.target) for s in suggest_foreign_keys(schema)}
    assert ("/related/also_bought/*", "/asin") in fks
    assert ("/related/also_viewed/*", "/asin") in fks


# --- criterion 6 -------------------------------------------------------------


def heavy_tail_corpus(n=400, seed=6):
    rng = random.Random(seed)
    return [
        {"s": "x" * int(rng.paretovariate(1.0)), "a": [0] * int(rng.paretovariate(1.2))}
        for _ in range(n)
    ]


def _length_overfit_oracle(docs, seed):
    train, test = split_indices(len(docs), 0.9, seed)
    bounds = {}
    for key, size in (("s", len), ("a", len)):
        vals = [size(docs[i][key]) for i in train]
        bounds[key] = (min(vals), max(vals))
    bad = sum(any(not bounds[k][0] <= len(docs[i][k]) <= bounds[k][1] for k in bounds) for i in test)
    return bad / len(test)


@pytest.mark.criterion(6, "overfit mechanism and monotonicity")
def test_criterion_6_overfit():
    # structural facets only: zero overfit on single-structure corpora
    for seed in range(5):
        rng = random.Random(seed)
        docs = [{"id": rng.randint(0, 10**6), "name": "n" * rng.randint(0, 30), "tags": ["t"] * rng.randint(0, 6)} for _ in range(300)]
        assert overfit_split(docs, MIN, 0.9, seed).overfit == 0.0

    # length bounds on a heavy-tailed corpus: overfit equals the brute-force count, and is > 0
    # for splits where the test maximum exceeds the training maximum
    docs = heavy_tail_corpus()
    lengths_cfg = DiscoveryConfig.from_monoids("ObjectTypes,ArrayType,MaxMinStringLength,MaxMinArrayLength")
    positive = 0
    for seed in range(20):
        expected = _length_overfit_oracle(docs, seed)
        got = overfit_split(docs, lengths_cfg, 0.9, seed).overfit
        assert got == pytest.approx(expected)
        positive += got > 0
        assert overfit_split(docs, MIN, 0.9, seed).overfit == 0.0
    assert positive > 0

    # Required: optional key present throughout training, missing from some test docs
    n, seed = 200, 3
    train, test = split_indices(n, 0.9, seed)
    missing = set(test[::2])
    docs = [{"k": i, **({} if i in missing else {"opt": i})} for i in range(n)]
    required_cfg = DiscoveryConfig.from_monoids("ObjectTypes,ArrayType,Required")
    assert overfit_split(docs, required_cfg, 0.9, seed).overfit == pytest.approx(len(missing) / len(test))
    assert overfit_split(docs, MIN, 0.9, seed).overfit == 0.0

    # monotonicity: more facets never raise the validity fraction of a fixed document set
    extra = sorted(C.ALL_FACETS - C.MIN_FACETS)
    for seed in range(3):
        train = mixed_corpus(seed, 300)
        probes = mixed_corpus(seed + 100, 200)
        probes += generate_documents(fold_streaming(train, MIN), GeneratorConfig(seed=seed), 100)
        frac = lambda facets: evaluate_validity(  # noqa: E731
            emit_json_schema(fold_streaming(train, DiscoveryConfig(facets=frozenset(facets)))), probes
        ).validity_fraction
        base = frac(C.MIN_FACETS)
        for f in extra:
            assert frac(C.MIN_FACETS | {f}) <= base, f
        assert frac(C.ALL_FACETS) <= frac(C.SIMPLE_FACETS) <= base


# --- criterion 7 -------------------------------------------------------------


def _median_runtime(docs, cfg, reps=3):
    times = []
    for _ in range(reps):
        gc.collect()
        t = time.perf_counter()
        fold_streaming(docs, cfg)
        times.append(time.perf_counter() - t)
    return statistics.median(times)


@pytest.mark.criterion(7, "linear scalability: runtime(2N) <= 2.5 x runtime(N) for Min and All")
def test_criterion_7_scalability():
    start = time.perf_counter()
    ratios = {}
    for name, cfg, n in (("min", MIN, 20_000), ("all", ALL, 5_000)):
        rng = random.Random(7)
        docs = [random_doc(rng) for _ in range(2 * n)]
        t1 = _median_runtime(docs[:n], cfg)
        t2 = _median_runtime(docs, cfg)
        ratios[name] = t2 / t1
    print("runtime ratios at 2x documents:", ratios)
    assert all(r <= 2.5 for r in ratios.values()), ratios
    assert time.perf_counter() - start < 600


def _peak_streaming_memory(n):
    def docs():
        rng = random.Random(70)
        for i in range(n):
            yield {"id": i, "v": rng.random(), "s": "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(1, 12)))}

    gc.collect()
    tracemalloc.start()
    fold_streaming(docs(), ALL)
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    return peak


def test_streaming_memory_bounded():
    small, large = _peak_streaming_memory(10_000), _peak_streaming_memory(100_000)
    print(f"peak bytes: 10k={small} 100k={large}")
    assert large < 2 * small


# --- criterion 8 -------------------------------------------------------------


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli_main(list(argv))
    return code, out.getvalue(), err.getvalue()


def _micro_examples(tmp_path):
    """Yield (name, ok) pairs; each expected value is computed by an oracle first."""
    # label vs kind equivalence on {a,b} and {a,c}
    docs = [{"a": 1, "b": 2}, {"a": 1, "c": 3}]
    label = fold_streaming(docs, DiscoveryConfig.from_monoids("min", equivalence="label"))
    kind = fold_streaming(docs, MIN)
    yield "label equivalence splits", label.kind == "product" and [set(b.labels) for b in label.branches] == [set(d) for d in docs]
    yield "kind equivalence unions keys", kind.kind == "object" and set(kind.properties) == set().union(*docs)

    # 1,000 copies equal one discovery, ignoring count-carrying annotations
    doc = {"k": "v", "n": [1, 2.5], "o": {"x": None}}
    many = strip_annotations(emit_json_schema(fold_streaming([doc] * 1000, ALL)))
    one = strip_annotations(emit_json_schema(discover_document(doc, ALL)))
    yield "1,000 copies", many == one

    docs = mixed_corpus(8, 400)
    yield "4 batches vs streaming", view_bytes(discover(docs, ALL, "tree", 4)) == view_bytes(fold_streaming(docs, ALL))
    perm = docs[::-1]
    yield "permuted input", view_bytes(fold_streaming(perm, ALL)) == view_bytes(fold_streaming(docs, ALL))

    s = emit_json_schema(fold_streaming([{"a": "x"}, {"a": 2}], MIN))
    yield "string/number product", s["properties"]["a"] == {"oneOf": [{"type": "integer"}, {"type": "string"}]}

    tup = fold_streaming([[1, 2], [3, 4, 5]], MIN).facets[C.ARRAY_TYPE]
    scalar = fold_streaming([1, 2, 3, 4, 5], MIN)
    yield "tuple lengths collapse to list", tup.mode == "list" and tup.item == scalar

    rng = random.Random(9)
    docs = [{"a": 1, **({"b": 1} if i < 25 else {})} for i in range(100)]
    rng.shuffle(docs)
    freq = sum("b" in d for d in docs) / len(docs)
    s = emit_json_schema(fold_streaming(docs, ALL))
    yield "attribute frequency", s["x-jsonoid-attribute-frequencies"]["b"] == freq == 0.25

    docs = [{"city": 1, "state": 1}, {"city": 1, "state": 1}, {"state": 1}]
    co = lambda a, b: all(b in d for d in docs if a in d)  # noqa: E731
    deps = fold_streaming(docs, ALL).facets[C.DEPENDENCIES]
    yield "dependencies", deps.holds("city", "state") == co("city", "state") and deps.holds("state", "city") == co("state", "city") is False

    values = [10, 20, 30, 45]
    g = functools.reduce(math.gcd, values)
    node = fold_streaming(values, DiscoveryConfig.from_monoids("simple"))
    yield "gcd fold", node.facets[C.MULTIPLE].multiple_of == g == 5
    yield "number keywords", strip_annotations(emit_json_schema(node)) == {
        "$schema": "https://json-schema.org/draft/2019-09/schema",
        "type": "integer",
        "multipleOf": g,
        "minimum": min(values),
        "maximum": max(values),
    }

    rng = random.Random(10)
    e1 = Examples(tuple(f"a{i}" for i in range(10)), 10, 10)
    e2 = Examples(tuple(f"b{i}" for i in range(10)), 100, 10)
    from_e2 = sum(sum(v.startswith("b") for v in e1.combine(e2, rng).values) for _ in range(10_000)) / 100_000
    yield "weighted reservoir", abs(from_e2 - 100 / 110) <= 0.02

    false_neg, fpr, analytic = _bloom_check()
    yield "bloom fpr", false_neg == 0 and fpr <= 3 * analytic
    exact, est = _hll_check()
    yield "hll 100k", abs(est - exact) / exact <= 0.05

    h = StreamingHistogram(2)
    for v in (1, 2, 10):
        h = h.add(v)
    yield "histogram shrink", h.bins == ((1.5, 2), (10, 1))

    def two_pass(xs):
        x = np.asarray(xs, float)
        d = x - x.mean()
        return len(x), x.mean(), (d**2).sum(), (d**3).sum(), (d**4).sum()

    acc = lambda xs: _fold(xs, MomentsAccumulator.of, MomentsAccumulator())  # noqa: E731
    n, mu, m2, _, _ = two_pass([2, 4])
    a = acc([2, 4])
    yield "moments {2,4}", (a.mean, a.m2) == (mu, m2) == (3.0, 2.0)
    r = acc([1, 2, 3, 4, 5]).report()
    yield "moments 1..5", r["stddev"] ** 2 == pytest.approx(np.var([1, 2, 3, 4, 5])) and abs(r["skewness"]) < 1e-12
    rng = random.Random(11)
    xs = [rng.uniform(-5, 20) for _ in range(1000)]
    cut = rng.randrange(1, 999)
    merged = acc(xs[:cut]).combine(acc(xs[cut:]))
    n, mu, m2, m3, m4 = two_pass(xs)
    yield "split combine vs two-pass", _moments_close(merged, MomentsAccumulator(n, mu, m2, m3, m4))
    z = np.random.default_rng(12).standard_normal(100_000)
    rep = acc(z.tolist()).report()
    yield "normal skew/kurtosis", (
        rep["skewness"] == pytest.approx(sps.skew(z), rel=1e-6, abs=1e-9)
        and rep["kurtosis"] == pytest.approx(sps.kurtosis(z), rel=1e-6, abs=1e-9)
        and abs(rep["skewness"]) <= 0.05
        and abs(rep["kurtosis"]) <= 0.1
    )

    rng = random.Random(13)
    train = [{"x": rng.gauss(0, 1)} for _ in range(300)]
    with_hist = emit_json_schema(fold_streaming(train, ALL))
    probes = [{"x": rng.gauss(0, 3)} if rng.random() < 0.8 else {"x": "s"} for _ in range(1000)]
    yield "histogram annotation inert", [is_valid(with_hist, p) for p in probes] == [is_valid(strip_annotations(with_hist), p) for p in probes]

    rng = random.Random(14)
    docs = [{"id": i, "status": rng.choice(["new", "open", "done"])} for i in range(10_000)]
    exact = {k: len({d[k] for d in docs}) for k in ("id", "status")}
    pks = {s.subject for s in suggest_primary_keys(fold_streaming(docs, ALL), len(docs))}
    yield "sequential id PK", exact == {"id": 10_000, "status": 3} and pks == {"/id"}

    docs = [{"a": f"left{i}", "b": f"right{i}"} for i in range(50)]
    schema = fold_streaming(docs, ALL)
    fa, fb = schema.properties["a"].facets[C.BLOOM], schema.properties["b"].facets[C.BLOOM]
    differing = fa.bits & ~fb.bits != 0
    fks = {(s.subject, s.target) for s in suggest_foreign_keys(schema)}
    yield "disjoint domains", differing and ("/a", "/b") not in fks and ("/b", "/a") not in fks

    docs = [{"x": 1, **({"debug": True} if i == 500 else {})} for i in range(1000)]
    schema = fold_streaming(docs, ALL)
    reports = [detect_outliers(schema, d) for d in docs]
    flagged = [i for i, r in enumerate(reports) if any(o.category == "rare-attribute" for o in r)]
    yield "rare attribute", flagged == [i for i, d in enumerate(docs) if "debug" in d] and 1 / 1000 < 0.01

    nrng = np.random.default_rng(15)
    u1, u2 = nrng.uniform(0, 1, 10_000), nrng.uniform(0.5, 1.5, 10_000)
    exact_ks = sps.ks_2samp(u1, u2).statistic
    h1 = _fold(u1.tolist(), lambda v: StreamingHistogram(100, ((v, 1),)), StreamingHistogram(100))
    h2 = _fold(u2.tolist(), lambda v: StreamingHistogram(100, ((v, 1),)), StreamingHistogram(100))
    ks = histogram_ks(h1, h2)
    yield "KS uniform shift", abs(exact_ks - 0.5) <= 0.05 and abs(ks - 0.5) <= 0.05

    rng = random.Random(16)
    docs = [{"a": rng.random(), "b": [1] * rng.randint(0, 4)} for _ in range(100)]
    yield "min overfit zero", overfit_split(docs, MIN, 0.9, 1).overfit == 0.0
    docs = heavy_tail_corpus()
    seed = next(s for s in range(50) if _length_overfit_oracle(docs, s) > 0)
    lengths_cfg = DiscoveryConfig.from_monoids("ObjectTypes,ArrayType,MaxMin")
    yield "heavy tail overfit", overfit_split(docs, lengths_cfg, 0.9, seed).overfit == pytest.approx(_length_overfit_oracle(docs, seed))

    # CLI differential runs
    corpus = tmp_path / "c.ndjson"
    corpus.write_text("".join(json.dumps(d) + "\n" for d in mixed_corpus(17, 200)))
    _, tree, _ = _cli("discover", "--mode", "tree", "--workers", "4", str(corpus))
    _, stream, _ = _cli("discover", str(corpus))
    yield "cli tree == streaming", deterministic_view(json.loads(tree)) == deterministic_view(json.loads(stream))

    schema_file = tmp_path / "s.json"
    _cli("discover", "--monoids", "simple", "--out", str(schema_file), str(corpus))
    mixed = tmp_path / "m.ndjson"
    probes = mixed_corpus(17, 50) + mixed_corpus(18, 50)
    mixed.write_text("".join(json.dumps(d) + "\n" for d in probes))
    manual = sum(is_valid(json.loads(schema_file.read_text()), d) for d in probes) / len(probes)
    _, out, _ = _cli("validate", str(schema_file), str(mixed))
    yield "cli validate recount", json.loads(out.splitlines()[-1])["summary"]["validity_fraction"] == manual

    ids = tmp_path / "ids.ndjson"
    rng = random.Random(19)
    ids.write_text("".join(json.dumps({"id": i, "status": rng.choice("xyz"), "refs": rng.sample(range(2000), rng.randint(1, 4))}) + "\n" for i in range(2000)))
    state = tmp_path / "ids.jz"
    _cli("discover", "--save-state", str(state), str(ids))
    _, out, _ = _cli("constraints", str(state))
    recs = [json.loads(line) for line in out.splitlines()]
    yield "cli constraints", (
        {r["subject"] for r in recs if r["kind"] == "primary-key"} == {"/id"}
        and ("/refs/*", "/id") in {(r["subject"], r.get("target")) for r in recs}
    )

    single = tmp_path / "single.ndjson"
    rng = random.Random(20)
    single.write_text("".join(json.dumps({"a": rng.random(), "b": "x" * rng.randint(0, 9)}) + "\n" for _ in range(100)))
    _, out, _ = _cli("evaluate", "--split", "0.9", "--seed", "1", "--monoids", "min", str(single))
    yield "cli evaluate min", json.loads(out)["overfit"] == 0.0


@pytest.mark.criterion(8, "worked micro-examples checked against brute-force oracles")
def test_criterion_8_micro_examples(tmp_path):
    results = list(_micro_examples(tmp_path))
    failed = [name for name, ok in results if not ok]
    assert len(results) >= 25
    assert not failed, failed
