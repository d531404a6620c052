"""Command line surface: subcommands, exit codes, file outputs."""

import json

import numpy as np
import pytest

from neuralfp.cli import main
from neuralfp.corpus import demo_database, pathology_observation
from neuralfp.datagen import sample_observation, signature_family
from neuralfp.dcerpc import format_endpoint_dump, synthetic_windows_corpus
from neuralfp.persistence import load, load_container
from neuralfp.signatures import format_observation, parse_fingerprint_db

TWO_SIG_DB = """\
Fingerprint Alpha Server
Class Alpha | Linux | 2.4.X | general purpose
TSeq(Class=RI%gcd=1%IPID=I%TS=100HZ)
T1(Resp=Y%DF=Y%W=16A0%ACK=S++%Flags=AS%Ops=MNNTNW)

Fingerprint Beta Box
Class Beta | Windows | NT4 | general purpose
TSeq(Class=TD%gcd=1%IPID=BI%TS=U)
T1(Resp=Y%DF=N%W=2017%ACK=S++%Flags=AS%Ops=M)
"""


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    paths = {
        "db": root / "demo.db",
        "two": root / "two.db",
        "prev": root / "prev.txt",
        "sol_obs": root / "solaris.obs",
        "prn_obs": root / "printer.obs",
        "win_obs": root / "win.obs",
        "dump": root / "win.dump",
        "cfg": root / "hier.cfg",
        "rel_ds": root / "rel.ds",
        "fam_ds": root / "fam.ds",
        "stage": root / "fam.stage",
        "stage_csv": root / "fam.csv",
        "model": root / "hier.model",
    }
    paths["db"].write_text(demo_database())
    paths["two"].write_text(TWO_SIG_DB)
    paths["prev"].write_text("# tilted weights\n0.75 Alpha Server\n0.25 Beta Box\n")

    db = parse_fingerprint_db(demo_database())
    sol = next(s for s in db if signature_family(s) == "Solaris")
    paths["sol_obs"].write_text(
        format_observation(sample_observation(sol, np.random.default_rng(5))) + "\n"
    )
    printer = next(s for s in db if "LaserJet" in s.name)
    paths["prn_obs"].write_text(
        format_observation(sample_observation(printer, np.random.default_rng(2))) + "\n"
    )
    win = next(s for s in db if signature_family(s) == "Windows")
    paths["win_obs"].write_text(
        format_observation(sample_observation(win, np.random.default_rng(8))) + "\n"
    )
    dump, triple = synthetic_windows_corpus(seed=6)[0]
    paths["dump"].write_text(format_endpoint_dump(dump))
    paths["triple"] = triple
    paths["cfg"].write_text(json.dumps({"samples": 700, "generations": 120, "windows": True}))

    assert main(["generate", "--db", str(paths["db"]), "--total", "500",
                 "--seed", "3", "--out", str(paths["rel_ds"])]) == 0
    assert main(["generate", "--db", str(paths["db"]), "--total", "400",
                 "--stage", "family", "--seed", "4", "--out", str(paths["fam_ds"])]) == 0
    assert main(["train", "--dataset", str(paths["fam_ds"]), "--seed", "11",
                 "--out", str(paths["stage"]), "--history", str(paths["stage_csv"])]) == 0
    assert main(["train", "--db", str(paths["db"]), "--stage", "hierarchy",
                 "--config", str(paths["cfg"]), "--seed", "6",
                 "--out", str(paths["model"])]) == 0
    return paths


class TestGenerate:
    def test_prints_per_family_counts(self, work, capsys):
        out = work["rel_ds"].parent / "counts.ds"
        assert main(["generate", "--db", str(work["two"]), "--prevalence", str(work["prev"]),
                     "--total", "100", "--seed", "0", "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "samples per family:" in text
        assert "75  Linux" in text
        assert "25  Windows" in text

    def test_dataset_container_kind(self, work):
        assert load_container(work["rel_ds"])["kind"] == "dataset"

    def test_missing_db_exits_2(self, work, capsys):
        assert main(["generate", "--db", "no-such.db", "--total", "10",
                     "--out", "/tmp/never.ds"]) == 2
        assert "no such file" in capsys.readouterr().err

    def test_determinism(self, work, tmp_path):
        a, b = tmp_path / "a.ds", tmp_path / "b.ds"
        for out in (a, b):
            main(["generate", "--db", str(work["db"]), "--total", "150",
                  "--seed", "9", "--out", str(out)])
        da, db_ = load(a), load(b)
        assert np.array_equal(da.inputs, db_.inputs)


class TestReduce:
    def test_report_and_artifact(self, work, capsys, tmp_path):
        out = tmp_path / "rel.pipe"
        assert main(["reduce", "--dataset", str(work["rel_ds"]), "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "columns kept" in text
        assert "% of variance" in text
        assert load_container(out)["kind"] == "pipeline"


class TestTrain:
    def test_history_csv_header(self, work):
        first = work["stage_csv"].read_text().splitlines()[0]
        assert first == "generation,mse,lambda,G"

    def test_stage_metadata(self, work):
        meta = load_container(work["stage"])["metadata"]
        assert meta["stage"] == "family"
        assert meta["seed"] == 11
        assert "config_digest" in meta

    def test_fixed_lr_flag_freezes_lambda(self, work, tmp_path):
        out = tmp_path / "fixed.stage"
        csv = tmp_path / "fixed.csv"
        assert main(["train", "--dataset", str(work["fam_ds"]), "--seed", "11",
                     "--fixed-lr", "--out", str(out), "--history", str(csv)]) == 0
        rows = csv.read_text().splitlines()[1:]
        lams = {row.split(",")[2] for row in rows}
        assert len(lams) == 1

    def test_stage_must_match_dataset(self, work, tmp_path, capsys):
        assert main(["train", "--dataset", str(work["fam_ds"]), "--stage", "relevance",
                     "--out", str(tmp_path / "x.stage")]) == 1
        assert "holds stage 'family'" in capsys.readouterr().err

    def test_resume_continues_training(self, work, tmp_path):
        out = tmp_path / "resumed.stage"
        assert main(["train", "--dataset", str(work["fam_ds"]), "--seed", "12",
                     "--resume", str(work["stage"]), "--out", str(out)]) == 0
        assert load_container(out)["kind"] == "stage"

    def test_resume_rejects_schema_mismatch(self, work, tmp_path, capsys):
        assert main(["train", "--dataset", str(work["rel_ds"]),
                     "--resume", str(work["stage"]),
                     "--out", str(tmp_path / "bad.stage")]) == 1
        assert "schema mismatch" in capsys.readouterr().err

    def test_hierarchy_requires_db(self, tmp_path, capsys):
        assert main(["train", "--stage", "hierarchy", "--out", str(tmp_path / "h.model")]) == 1
        assert "requires --db" in capsys.readouterr().err

    def test_hierarchy_history_per_stage(self, work, tmp_path):
        stem = tmp_path / "curves.csv"
        cfg = tmp_path / "small.cfg"
        cfg.write_text(json.dumps({"samples": 300, "generations": 30}))
        assert main(["train", "--db", str(work["db"]), "--stage", "hierarchy",
                     "--config", str(cfg), "--seed", "2",
                     "--out", str(tmp_path / "h.model"), "--history", str(stem)]) == 0
        written = sorted(p.name for p in tmp_path.glob("curves-*.csv"))
        assert "curves-relevance.csv" in written
        assert "curves-family.csv" in written
        assert "curves-Linux.csv" in written


class TestClassify:
    def test_classified_exit_0(self, work, capsys):
        assert main(["classify", "--model", str(work["model"]),
                     "--obs", str(work["sol_obs"])]) == 0
        text = capsys.readouterr().out
        assert "Relevant / not relevant analysis" in text
        assert "OS family analysis" in text
        assert "Setting OS to Solaris" in text

    def test_not_relevant_exit_3(self, work, capsys):
        assert main(["classify", "--model", str(work["model"]),
                     "--obs", str(work["prn_obs"])]) == 3
        assert "not relevant" in capsys.readouterr().out

    def test_windows_dump_combined_report(self, work, capsys):
        assert main(["classify", "--model", str(work["model"]),
                     "--obs", str(work["win_obs"]), "--dump", str(work["dump"])]) == 0
        text = capsys.readouterr().out
        assert "DCE-RPC Windows analysis" in text
        version, edition, sp = work["triple"]
        assert f"Setting OS to Windows {version} {edition} sp{sp}" in text

    def test_unknown_exit_4(self, work, tmp_path, capsys):
        model = load(work["model"])
        model.decision_threshold = 2.0
        from neuralfp.persistence import save

        strict = tmp_path / "strict.model"
        save(model, strict)
        assert main(["classify", "--model", str(strict),
                     "--obs", str(work["sol_obs"])]) == 4
        assert "OS unknown" in capsys.readouterr().out

    def test_pathology_observation_classified(self, work, tmp_path, capsys):
        obs = tmp_path / "pathology.obs"
        obs.write_text(format_observation(pathology_observation()) + "\n")
        assert main(["classify", "--model", str(work["model"]), "--obs", str(obs)]) == 0
        assert "Setting OS to Linux 2.6.X" in capsys.readouterr().out


class TestEvaluateBaseline:
    def test_evaluate_report(self, work, capsys):
        assert main(["evaluate", "--model", str(work["model"]),
                     "--dataset", str(work["rel_ds"])]) == 0
        text = capsys.readouterr().out
        assert "Evaluation over 500 held-out observations" in text
        assert "outcomes:" in text

    def test_evaluate_rejects_non_relevance_dataset(self, work, capsys):
        assert main(["evaluate", "--model", str(work["model"]),
                     "--dataset", str(work["fam_ds"])]) == 1
        assert "relevance-stage" in capsys.readouterr().err

    def test_baseline_top_flag(self, work, tmp_path, capsys):
        obs = tmp_path / "pathology.obs"
        obs.write_text(format_observation(pathology_observation()) + "\n")
        assert main(["baseline", "--db", str(work["db"]), "--obs", str(obs),
                     "--top", "4"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "best-fit scores (top 4 of 61 signatures)"
        assert len(lines) == 5
        # the sparse impostor pathology shows up right at the top
        assert "1.00000  RetroBox Game Console" in lines[1]


class TestExports:
    def test_export_curves_stage(self, work, tmp_path, capsys):
        out = tmp_path / "re.csv"
        assert main(["export-curves", "--model", str(work["stage"]),
                     "--out", str(out)]) == 0
        assert out.read_text().startswith("generation,mse,lambda,G")

    def test_export_curves_hierarchy(self, work, tmp_path):
        stem = tmp_path / "h.csv"
        assert main(["export-curves", "--model", str(work["model"]),
                     "--out", str(stem)]) == 0
        names = {p.name for p in tmp_path.glob("h-*.csv")}
        assert {"h-relevance.csv", "h-family.csv", "h-windows.csv"} <= names

    def test_export_curves_rejects_pipeline(self, work, tmp_path, capsys):
        pipe = tmp_path / "p.pipe"
        main(["reduce", "--dataset", str(work["rel_ds"]), "--out", str(pipe)])
        capsys.readouterr()
        assert main(["export-curves", "--model", str(pipe),
                     "--out", str(tmp_path / "no.csv")]) == 1
        assert "no training curves" in capsys.readouterr().err

    def test_export_layout(self, work, tmp_path, capsys):
        out = tmp_path / "layout.txt"
        assert main(["export-layout", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "index  test  feature"
        assert len(lines) == 1 + 568
        assert lines[1].split() == ["0", "T1", "ACK", "FIELD"]
