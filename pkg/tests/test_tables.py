import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgtables.errors import ConfigError, GenerationError, RelationTooSmallError
from kgtables.tables import (
    NEGATIVE_LABEL,
    GenerationConfig,
    generate_dataset,
    generate_negative_table,
    generate_positive_table,
    sample_row_count,
)
from kgtables.triples import FactTriple, group_by_relation

from .conftest import make_kg_store


def small_store(counts: dict[str, int]):
    triples = [
        FactTriple(f"{rel}_s{i}", rel, f"{rel}_o{i}")
        for rel, n in counts.items()
        for i in range(n)
    ]
    return group_by_relation(triples)


class TestSampleRowCount:
    def test_degenerate_interval(self):
        assert sample_row_count(random.Random(1), (5, 5)) == 5

    def test_bounds_min_over_max_is_config_error(self):
        with pytest.raises(ConfigError):
            sample_row_count(random.Random(1), (6, 5))

    def test_10000_draws_cover_exactly_the_interval(self):
        # Frequency tally over the draws: every value of {5..10} observed,
        # nothing outside.
        rng = random.Random(99)
        tally = Counter(sample_row_count(rng, (5, 10)) for _ in range(10_000))
        assert set(tally) == {5, 6, 7, 8, 9, 10}

    def test_same_seed_gives_identical_sequence(self):
        seq_a = [sample_row_count(random.Random(7), (5, 10)) for _ in range(1)]
        rng_a, rng_b = random.Random(7), random.Random(7)
        assert [sample_row_count(rng_a, (5, 10)) for _ in range(50)] == [
            sample_row_count(rng_b, (5, 10)) for _ in range(50)
        ]
        assert seq_a[0] == random.Random(7).randint(5, 10)


class TestPositiveTables:
    def test_relation_with_exactly_min_triples_uses_all_of_them(self):
        store = small_store({"r1": 5})
        table = generate_positive_table(store, "r1", random.Random(3))
        assert sorted((r.left, r.right) for r in table.rows) == sorted(
            (t.subject, t.object) for t in store.triples_for("r1")
        )

    def test_too_small_relation_raises_named_error(self):
        store = small_store({"tiny": 3})
        with pytest.raises(RelationTooSmallError) as exc_info:
            generate_positive_table(store, "tiny", random.Random(0))
        assert exc_info.value.relation == "tiny"

    def test_unknown_relation_raises(self):
        store = small_store({"r1": 5})
        with pytest.raises(RelationTooSmallError):
            generate_positive_table(store, "missing", random.Random(0))

    def test_membership_and_no_duplicates_on_large_relation(self):
        # Membership oracle: every row must be a stored (subject, object)
        # pair of the relation.
        store = small_store({"big": 100})
        allowed = {(t.subject, t.object) for t in store.triples_for("big")}
        for seed in range(20):
            table = generate_positive_table(store, "big", random.Random(seed))
            pairs = [(r.left, r.right) for r in table.rows]
            assert len(set(pairs)) == len(pairs)
            assert set(pairs) <= allowed
            assert 5 <= len(pairs) <= 10
            assert table.relation_label == "big"


class TestNegativeTables:
    def make_pool(self):
        store = small_store({"r1": 5, "r2": 7})
        t1 = generate_positive_table(store, "r1", random.Random(1), rows_min=5, rows_max=5)
        t2 = generate_positive_table(store, "r2", random.Random(2), rows_min=7, rows_max=7)
        return [t1, t2]

    def test_min_truncation_and_column_sources(self):
        pool = self.make_pool()
        table = generate_negative_table(pool, random.Random(5))
        assert table.relation_label == NEGATIVE_LABEL
        assert len(table.rows) == 5
        by_label = {t.relation_label: t for t in pool}
        first, second = table.provenance.relations
        lefts = [r.left for r in by_label[first].rows][:5]
        rights = [r.right for r in by_label[second].rows][:5]
        assert [r.left for r in table.rows] == lefts
        assert [r.right for r in table.rows] == rights

    def test_single_table_pool_raises(self):
        pool = self.make_pool()[:1]
        with pytest.raises(GenerationError):
            generate_negative_table(pool, random.Random(0))

    def test_mono_relation_pool_raises(self):
        store = small_store({"r1": 30})
        pool = [
            generate_positive_table(store, "r1", random.Random(i), ordinal=i) for i in range(3)
        ]
        with pytest.raises(GenerationError):
            generate_negative_table(pool, random.Random(0))

    def test_fixed_seed_and_pool_reproduce_exactly(self):
        pool = self.make_pool()
        a = generate_negative_table(pool, random.Random(11))
        b = generate_negative_table(pool, random.Random(11))
        assert a == b

    def test_source_relations_always_distinct(self):
        store = small_store({"r1": 8, "r2": 8, "r3": 8})
        pool = [
            generate_positive_table(store, rel, random.Random(i), ordinal=i)
            for i, rel in enumerate(["r1", "r2", "r3", "r1", "r2"])
        ]
        for seed in range(50):
            table = generate_negative_table(pool, random.Random(seed))
            assert len(set(table.provenance.relations)) == 2


class TestGenerateDataset:
    def test_table_count_without_negatives(self):
        store = small_store({"r1": 12, "r2": 12})
        config = GenerationConfig(master_seed=1, tables_per_relation=3)
        got = list(generate_dataset(store, config))
        assert len(got) == 6
        assert all(not t.is_negative for t in got)

    def test_negative_count_uses_ceiling(self):
        store = small_store({"r1": 12, "r2": 12})
        config = GenerationConfig(master_seed=1, tables_per_relation=3, negative_fraction=0.5)
        got = list(generate_dataset(store, config))
        negatives = [t for t in got if t.is_negative]
        assert len(got) == 9
        assert len(negatives) == 3

    def test_too_small_relations_are_skipped_not_fatal(self):
        store = small_store({"r1": 12, "tiny": 2})
        config = GenerationConfig(master_seed=1, tables_per_relation=2)
        got = list(generate_dataset(store, config))
        assert {t.relation_label for t in got} == {"r1"}
        assert len(got) == 2

    def test_same_master_seed_reproduces_dataset(self):
        store = make_kg_store(n_relations=5, triples_per=20)
        config = GenerationConfig(master_seed=42, tables_per_relation=4, negative_fraction=0.25)
        run_a = list(generate_dataset(store, config))
        run_b = list(generate_dataset(store, config))
        assert run_a == run_b
        assert [t.table_id for t in run_a] == [t.table_id for t in run_b]

    def test_different_seeds_differ(self):
        store = make_kg_store(n_relations=5, triples_per=20)
        a = list(generate_dataset(store, GenerationConfig(master_seed=1, tables_per_relation=4)))
        b = list(generate_dataset(store, GenerationConfig(master_seed=2, tables_per_relation=4)))
        assert a != b

    def test_invalid_config_rejected(self):
        store = small_store({"r1": 12})
        with pytest.raises(ConfigError):
            list(generate_dataset(store, GenerationConfig(rows_min=0)))
        with pytest.raises(ConfigError):
            list(generate_dataset(store, GenerationConfig(rows_min=8, rows_max=5)))
        with pytest.raises(ConfigError):
            list(generate_dataset(store, GenerationConfig(negative_fraction=1.5)))


@settings(max_examples=30, deadline=None)
@given(
    relation_sizes=st.dictionaries(
        st.sampled_from(["ra", "rb", "rc", "rd"]), st.integers(min_value=5, max_value=40), min_size=2
    ),
    master_seed=st.integers(min_value=0, max_value=2**32),
)
def test_dataset_invariants_hold_for_any_store_and_seed(relation_sizes, master_seed):
    store = small_store(relation_sizes)
    config = GenerationConfig(
        master_seed=master_seed, tables_per_relation=2, negative_fraction=0.5
    )
    tables = list(generate_dataset(store, config))
    positives = [t for t in tables if not t.is_negative]
    for table in tables:
        assert 5 <= len(table.rows) <= 10
        if table.is_negative:
            assert len(set(table.provenance.relations)) == 2
        else:
            allowed = {(t.subject, t.object) for t in store.triples_for(table.relation_label)}
            pairs = [(r.left, r.right) for r in table.rows]
            assert set(pairs) <= allowed
            assert len(set(pairs)) == len(pairs)
    n_negatives = len(tables) - len(positives)
    assert n_negatives == -(-len(positives) // 2)  # ceil(0.5 * positives)
