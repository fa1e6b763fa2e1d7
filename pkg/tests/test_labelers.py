from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faceteval.corpus import Fam, SupportGroup, sample_from_record
from faceteval.labelers import (
    GREEDY,
    LEAD,
    TOPN,
    LabelerConfig,
    greedy_select,
    label_dataset,
    make_machine_fams,
    per_facet_rank,
    predicted_support_set,
)
from faceteval.rouge import tokenize
from faceteval.similarity import Measure

from oracles import bag_f1
from helpers import LISTERIA_MANUAL, LISTERIA_OVERLAP, LISTERIA_REF, WORDS

sentence = st.lists(st.sampled_from(WORDS[:8]), min_size=1, max_size=6).map(tuple)
document = st.lists(sentence, min_size=1, max_size=8)


def toks(*texts):
    return [tokenize(t) for t in texts]


class TestGreedy:
    def test_hand_example(self):
        doc = toks("the cat sat", "dogs bark loud", "the cat sat on the mat")
        assert greedy_select(doc, toks("the cat sat on the mat")) == [2]

    def test_no_overlap(self):
        assert greedy_select(toks("a b", "c d"), toks("x y")) == []

    def test_identity(self):
        assert greedy_select(toks("same words"), toks("same words")) == [0]

    def test_tie_goes_to_lowest_index(self):
        assert greedy_select(toks("a", "a", "b"), toks("a b"))[0] == 0

    @settings(max_examples=100)
    @given(document, document)
    def test_trace_strictly_increasing(self, doc, ref):
        order = greedy_select(doc, ref)
        assert len(order) == len(set(order)) <= len(doc)
        trace = [bag_f1([doc[i] for i in order[:j]], ref) for j in range(len(order) + 1)]
        assert all(a < b for a, b in zip(trace, trace[1:]))

    @settings(max_examples=150)
    @given(document, document)
    def test_stops_only_when_nothing_helps(self, doc, ref):
        order = greedy_select(doc, ref)
        final = bag_f1([doc[i] for i in order], ref)
        for i in set(range(len(doc))) - set(order):
            assert bag_f1([doc[j] for j in order] + [doc[i]], ref) <= final


class TestPerFacetRank:
    def test_all_zero_keeps_order(self):
        assert per_facet_rank(toks("a", "b", "c"), ("z",), Measure.ROUGE1_F1) == [0, 1, 2]

    def test_exact_copy_first(self):
        doc = toks("x y", "q r", "a b c", "p", "t u", "a b c d")
        assert per_facet_rank(doc, tokenize("a b c d"), "rouge1_f1")[0] == 5

    def test_reference_pair_outranks_unrelated(self):
        doc = toks("the weather was mild on tuesday", LISTERIA_OVERLAP, "shares fell sharply", LISTERIA_MANUAL)
        ranked = per_facet_rank(doc, tokenize(LISTERIA_REF), Measure.ROUGE1_F1)
        assert set(ranked[:2]) == {1, 3}

    @given(document, sentence, st.sampled_from(list(Measure)))
    def test_is_permutation(self, doc, facet, measure):
        from faceteval.similarity import fit_tfidf

        ranked = per_facet_rank(doc, facet, measure, fit_tfidf(doc + [facet]))
        assert sorted(ranked) == list(range(len(doc)))

    @given(document, sentence)
    def test_exact_copy_property(self, doc, facet):
        doc = doc + [facet]
        ranked = per_facet_rank(doc, facet, Measure.ROUGE1_F1)
        assert doc[ranked[0]] == facet or Counter(doc[ranked[0]]) == Counter(facet)


def sample(doc, ref, fams=None):
    rec = {"id": "x", "document": doc, "reference": ref}
    if fams is not None:
        rec["fams"] = fams
    return sample_from_record(rec)


class TestMachineFams:
    DOC = ["the cat sat", "dogs bark loud", "the cat sat on the mat", "birds fly"]
    REF = ["the cat sat on the mat", "birds fly south"]

    def test_top1(self):
        fams = make_machine_fams(sample(self.DOC, self.REF), LabelerConfig(TOPN, Measure.ROUGE1_F1))
        assert [[g.indices for g in f.groups] for f in fams] == [[(2,)], [(3,)]]

    def test_top_n_at_least_d(self):
        cfg = LabelerConfig(TOPN, Measure.ROUGEL_F1, top_n=10)
        for fam in make_machine_fams(sample(self.DOC, self.REF), cfg):
            assert sorted(g.indices for g in fam.groups) == [(i,) for i in range(4)]

    @pytest.mark.parametrize("method", ["tfidf", "rouge1-f1", "rouge2-f1", "rougel-recall",
                                        "rougel-precision", "rougel-f1", "rouge-avg-f1"])
    def test_nesting(self, method):
        s = sample(self.DOC, self.REF)
        prev = None
        for n in (1, 2, 3, 4):
            fams = make_machine_fams(s, LabelerConfig.from_method(method, top_n=n))
            groups = [[g.indices for g in f.groups] for f in fams]
            assert all(len(g) == n for g in groups)
            if prev is not None:
                assert all(cur[: n - 1] == old for cur, old in zip(groups, prev))
            prev = groups

    def test_greedy_shared_group(self):
        fams = make_machine_fams(sample(self.DOC, self.REF), LabelerConfig(GREEDY))
        assert len(fams) == 2
        assert fams[0] == fams[1] and len(fams[0].groups) == 1

    def test_greedy_empty(self):
        fams = make_machine_fams(sample(["a b"], ["x y"]), LabelerConfig(GREEDY))
        assert all(not f.groups for f in fams)

    def test_lead(self):
        fams = make_machine_fams(sample(self.DOC, self.REF), LabelerConfig.from_method("lead-3"))
        assert all(f.groups == (SupportGroup((0, 1, 2)),) for f in fams)

    def test_labels_facets_without_gold_support(self):
        s = sample(self.DOC, self.REF, fams=[[[2]], []])
        fams = make_machine_fams(s, LabelerConfig(TOPN, Measure.ROUGE1_F1))
        assert all(f.groups for f in fams)


class TestPredictedSupport:
    def test_dedup(self):
        fams = (Fam((SupportGroup((3,)),)), Fam((SupportGroup((3,)),)))
        assert predicted_support_set(fams) == {3}

    def test_empty(self):
        assert predicted_support_set(()) == frozenset()

    def test_example_shape(self, example):
        assert predicted_support_set(example.fams) == {0, 1, 2, 3}


class TestConfig:
    def test_measure_required_for_topn(self):
        with pytest.raises(ValueError):
            LabelerConfig(TOPN)

    def test_measure_rejected_otherwise(self):
        with pytest.raises(ValueError):
            LabelerConfig(LEAD, Measure.ROUGE1_F1)

    @pytest.mark.parametrize("kwargs", [{"top_n": 0}, {"k": 0}, {"tfidf_scope": "web"}])
    def test_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            LabelerConfig(TOPN, Measure.ROUGE1_F1, **kwargs)

    def test_unknown_method(self):
        with pytest.raises(ValueError, match="unknown labeling method"):
            LabelerConfig.from_method("bleu")

    @pytest.mark.parametrize("method, n, label", [("rouge-avg-f1", 3, "rouge-avg-f1@3"),
                                                  ("lead-5", 1, "lead-5"),
                                                  ("greedy-rouge1", 1, "greedy-rouge1")])
    def test_labels(self, method, n, label):
        assert LabelerConfig.from_method(method, top_n=n).label == label


def test_label_dataset_determinism(annotated_path):
    from faceteval.corpus import load_dataset

    data = load_dataset(annotated_path)
    for method in ("rouge-avg-f1", "tfidf", "greedy-rouge1"):
        cfg = LabelerConfig.from_method(method, top_n=2)
        once = label_dataset(data, cfg, jobs=1)
        assert once == label_dataset(data, cfg, jobs=1) == label_dataset(data, cfg, jobs=3)
        assert [s.id for s in once] == [s.id for s in data]
        assert [s.document for s in once] == [s.document for s in data]
