import json

import pytest

from faceteval.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def systems_args(synthetic):
    args = ["--fams", synthetic["data"]]
    for name, path in synthetic["systems"].items():
        args += ["--system", f"{name}={path}"]
    return args


def tsv(text):
    lines = text.strip("\n").split("\n\n")[0].splitlines()
    header = lines[0].split("\t")
    return [dict(zip(header, line.split("\t"))) for line in lines[1:]]


class TestEval:
    def test_rows_and_columns(self, capsys, synthetic):
        code, out, _ = run(capsys, "eval", *systems_args(synthetic), "--lead", 3, "--oracle",
                           "--abstractive", f"pg={synthetic['abstractive']}")
        assert code == 0
        rows = tsv(out)
        assert [r["system"] for r in rows] == ["sys0", "sys1", "sys2", "pg", "Lead-3", "Oracle"]
        assert rows[3]["far"] == "n/a"
        assert float(rows[-1]["far"]) >= max(float(r["far"]) for r in rows if r["far"] != "n/a")

    def test_annotated_lead_and_oracle(self, capsys, annotated_path):
        code, out, _ = run(capsys, "eval", "--fams", annotated_path, "--lead", 3, "--oracle")
        rows = {r["system"]: r for r in tsv(out)}
        assert code == 0
        assert rows["Lead-3"]["far"] == "45.0"
        assert rows["Oracle"]["far"] == "90.0"

    def test_json_raw_ratios(self, capsys, synthetic, tmp_path):
        out_path = tmp_path / "e.json"
        code, out, _ = run(capsys, "eval", *systems_args(synthetic), "--format", "json", "--out", out_path)
        assert code == 0 and out == ""
        payload = json.loads(out_path.read_text())
        far = payload["rows"][0]["far"]
        assert 0 <= far <= 1
        assert payload["reports"][0]["system"] == "sys0"

    def test_per_sample(self, capsys, synthetic):
        code, out, _ = run(capsys, "eval", *systems_args(synthetic), "--per-sample")
        assert code == 0
        assert len(tsv(out)) == 3 * 12

    def test_categories_filter(self, capsys, synthetic):
        code, out, _ = run(capsys, "eval", *systems_args(synthetic), "--categories", "L")
        assert code == 0
        assert {r["n_samples"] for r in tsv(out)} == {"10"}

    def test_human_agreement(self, capsys, synthetic, tmp_path):
        # human ranks that follow system FAR per sample give agreement 1 on FAR
        code, out, _ = run(capsys, "eval", *systems_args(synthetic), "--format", "json")
        reports = json.loads(out)["reports"]
        rankings = []
        for sid in reports[0]["per_sample"]:
            far = {r["system"]: r["per_sample"][sid]["far"] for r in reports}
            # ties share the better rank, matching the metric side
            ranking = {name: 1 + sum(v > mine for v in far.values()) for name, mine in far.items()}
            rankings.append({"id": sid, "ranking": ranking})
        human = tmp_path / "human.jsonl"
        human.write_text("".join(json.dumps(r) + "\n" for r in rankings))
        code, out, _ = run(capsys, "eval", *systems_args(synthetic), "--human", human, "--format", "json")
        assert code == 0
        agreement = json.loads(out)["human_agreement"]["far"]
        assert agreement["avg_spearman"] == pytest.approx(1.0, abs=1e-4)

    def test_needs_something_to_evaluate(self, capsys, synthetic):
        code, _, err = run(capsys, "eval", "--fams", synthetic["data"])
        assert code == 2 and "needs at least one" in err


class TestExitCodes:
    def test_missing_system_file(self, capsys, synthetic, tmp_path):
        missing = tmp_path / "nope.jsonl"
        code, _, err = run(capsys, "eval", "--fams", synthetic["data"], "--system", f"x={missing}")
        assert code == 2
        assert str(missing) in err

    def test_missing_dataset(self, capsys, tmp_path):
        code, _, err = run(capsys, "stats", "--fams", tmp_path / "absent.jsonl")
        assert code == 2 and "absent.jsonl" in err

    def test_bad_dataset(self, capsys, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"id": "x", "document": ["a"], "reference": ["b"], "fams": [[[3]]]}\n')
        code, _, err = run(capsys, "stats", "--fams", bad)
        assert code == 2 and "'x'" in err

    def test_argparse_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["eval", "--categories", "Q"])
        assert exc.value.code == 2

    def test_undefined_correlation_is_exit_1(self, capsys, synthetic):
        # two identical systems: system-level FAR is constant, so correlation is undefined
        path = synthetic["systems"]["sys0"]
        code, out, err = run(capsys, "correlate", "--fams", synthetic["data"], "--system", f"a={path}",
                             "--system", f"b={path}", "--machine-fams", f"gold={synthetic['data']}")
        assert code == 1
        assert "estimator" in out and "metric failure" in err

    def test_single_system_correlate_is_input_error(self, capsys, synthetic):
        path = synthetic["systems"]["sys0"]
        code, _, err = run(capsys, "correlate", "--fams", synthetic["data"], "--system", f"a={path}",
                           "--machine-fams", f"gold={synthetic['data']}")
        assert code == 2 and "two systems" in err

    def test_machine_fams_missing_sample(self, capsys, synthetic, tmp_path):
        partial = tmp_path / "partial.jsonl"
        partial.write_text(synthetic["data"].read_text().splitlines()[0] + "\n")
        code, _, err = run(capsys, "correlate", *systems_args(synthetic), "--machine-fams", f"m={partial}")
        assert code == 2 and "lacks" in err


class TestLabel:
    def test_shapes(self, capsys, synthetic, tmp_path):
        out_path = tmp_path / "m.jsonl"
        code, _, _ = run(capsys, "label", "--fams", synthetic["data"], "--method", "rouge-avg-f1",
                         "--topn", 2, "--out", out_path)
        assert code == 0
        gold = [json.loads(line) for line in synthetic["data"].read_text().splitlines()]
        machine = [json.loads(line) for line in out_path.read_text().splitlines()]
        assert [m["id"] for m in machine] == [g["id"] for g in gold]
        for g, m in zip(gold, machine):
            assert len(m["fams"]) == len(g["reference"])
            assert all(len(f) == 2 and all(len(grp) == 1 for grp in f) for f in m["fams"])

    def test_output_is_a_dataset(self, capsys, synthetic, tmp_path):
        out_path = tmp_path / "m.jsonl"
        run(capsys, "label", "--fams", synthetic["data"], "--method", "greedy-rouge1", "--out", out_path)
        code, out, _ = run(capsys, "stats", "--fams", out_path)
        assert code == 0 and "sample_count\t12" in out

    def test_unknown_method(self, capsys, synthetic):
        code, _, err = run(capsys, "label", "--fams", synthetic["data"], "--method", "bleu")
        assert code == 2 and "unknown labeling method" in err


class TestBenchLabelers:
    def test_default_rows(self, capsys, synthetic):
        code, out, _ = run(capsys, "bench-labelers", "--fams", synthetic["data"])
        rows = tsv(out)
        assert code == 0
        assert rows[0]["labeler"] == "lead-3"
        assert "rouge-avg-f1@1" in {r["labeler"] for r in rows}

    def test_gold_file_scores_perfectly(self, capsys, synthetic, tmp_path):
        code, out, _ = run(capsys, "bench-labelers", "--fams", synthetic["data"], "--methods", "lead-100")
        (row,) = tsv(out)
        assert row["recall"] == "100.0"


class TestCorrelate:
    def test_identity(self, capsys, synthetic):
        code, out, _ = run(capsys, "correlate", *systems_args(synthetic),
                           "--machine-fams", f"gold={synthetic['data']}")
        assert code == 0
        for row in tsv(out):
            assert row["pearson"] == row["spearman"] == row["kendall"] == "100.0"

    def test_labeler_grid(self, capsys, synthetic):
        code, out, _ = run(capsys, "correlate", *systems_args(synthetic), "--methods", "rouge1-f1,tfidf",
                           "--topn", "1,3")
        assert code == 0
        labels = [r["estimator"] for r in tsv(out)]
        assert labels == [x for x in ("rouge1-f1@1", "rouge1-f1@3", "tfidf@1", "tfidf@3") for _ in range(2)]


class TestAutofar:
    def test_tsv_sections(self, capsys, synthetic):
        code, out, _ = run(capsys, "autofar", *systems_args(synthetic))
        assert code == 0
        sections = out.strip().split("\n\n")
        assert len(sections) == 3
        assert sections[2].startswith("term\tweight\nintercept")

    def test_predict(self, capsys, synthetic):
        args = ["--predict-data", synthetic["data"]]
        for name, path in synthetic["systems"].items():
            args += ["--predict-system", f"{name}={path}"]
        code, out, _ = run(capsys, "autofar", *systems_args(synthetic), *args, "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert "far_vs_autofar_l" in payload
        assert all(row["autofar_l"] is not None for row in payload["rows"])


class TestBreakdown:
    def test_reference_scores_100(self, capsys, synthetic, tmp_path):
        ref = tmp_path / "ref.jsonl"
        rows = [json.loads(line) for line in synthetic["data"].read_text().splitlines()]
        ref.write_text("".join(json.dumps({"id": r["id"], "sentences": r["reference"]}) + "\n" for r in rows))
        code, out, _ = run(capsys, "breakdown", "--fams", synthetic["data"], "--abstractive", f"ref={ref}")
        assert code == 0
        (row,) = tsv(out)
        assert all(row[c] == "100.0" for c in ("N", "L", "H", "L+H"))

    def test_far_for_extractive(self, capsys, synthetic):
        code, out, _ = run(capsys, "breakdown", *systems_args(synthetic), "--metric", "far")
        assert code == 0
        assert len(tsv(out)) == 3


class TestStats:
    def test_annotated(self, capsys, annotated_path):
        code, out, _ = run(capsys, "stats", "--fams", annotated_path, "--format", "json")
        stats = json.loads(out)["stats"]
        assert code == 0
        assert stats["sample_count"] == 2
        assert stats["avg_support_sentences_unique"] == 4.0
        assert stats["avg_support_sentences_nonunique"] == 4.5
        assert stats["avg_groups_per_facet"] == pytest.approx(9 / 7, abs=1e-4)

    def test_synthetic_counts(self, capsys, synthetic):
        code, out, _ = run(capsys, "stats", "--fams", synthetic["data"])
        assert code == 0
        rows = {r["statistic"]: r["value"] for r in tsv(out)}
        assert rows["sample_count"] == "12"
        assert (rows["sample_count_by_category.N"], rows["sample_count_by_category.H"]) == ("1", "1")
