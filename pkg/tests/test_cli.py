"""End-to-end command-line behavior: exit codes, file layout, determinism."""

import json
import shutil
import subprocess
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from conftest import bulk_import_stream, day, stepped_period_stream
from scalemine import __version__
from scalemine.cli import main
from scalemine.config import RunConfig
from scalemine.records import persist_records


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Records for two datasets plus their manifest files."""
    ws = tmp_path_factory.mktemp("cliws")
    records = ws / "records"
    records.mkdir()
    persist_records(stepped_period_stream(1, ratios=(3, 2)), records / "p1.jsonl")
    persist_records(stepped_period_stream(2, ratios=(3, 2)), records / "p2.jsonl")
    persist_records(bulk_import_stream(), records / "import1.jsonl")
    persist_records(stepped_period_stream(1, scale=3, ratios=(3, 2)), records / "q1.jsonl")
    persist_records(stepped_period_stream(2, scale=4, ratios=(3, 2)), records / "q2.jsonl")
    persist_records(stepped_period_stream(0), records / "m1.jsonl")

    def manifest(name, ids):
        path = ws / f"{name}.json"
        payload = {
            "name": name,
            "projects": [
                {"id": i, "locator": f"/r/{i}", "start": "2010-01-01", "end": "2012-12-31"}
                for i in ids
            ],
        }
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return {
        "root": ws,
        "records": records,
        "alpha": manifest("ds_alpha", ["p1", "p2", "import1"]),
        "beta": manifest("ds_beta", ["q1", "q2"]),
        "mono": manifest("ds_mono", ["m1"]),
    }


def base_args(workspace, out):
    return [
        "--manifest", str(workspace["alpha"]),
        "--manifest", str(workspace["beta"]),
        "--records-dir", str(workspace["records"]),
        "--out", str(out),
    ]


def run_pipeline(workspace, out, jobs=None):
    args = base_args(workspace, out)
    job_args = ["--jobs", str(jobs)] if jobs else []
    assert main(["analyze", *args, *job_args]) == 0
    assert main(["sweep", *args, "--grid", "0,30"]) == 0
    assert main(["compare", *args]) == 0
    assert main(["report", "--out", str(out)]) == 0


class TestParser:
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_unknown_command_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_console_script_installed(self):
        exe = shutil.which("scalemine")
        if exe is None:
            pytest.skip("console script not on PATH")
        proc = subprocess.run([exe, "--version"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert __version__ in proc.stdout


class TestMine:
    def test_writes_records_and_report(self, repo, tmp_path, capsys):
        repo.commit(day(0), "a@x", "A", {"f.txt": "one\n"})
        repo.commit(day(1), "b@x", "B", {"f.txt": "one\ntwo\n"})
        repo.commit(day(2), "a@x", "A", {"g.txt": "x\n"})
        out = tmp_path / "proj.jsonl"
        code = main(["mine", str(repo.root), "--cutoff", "2010-12-31", "--out", str(out)])
        assert code == 0
        assert "3 commit records" in capsys.readouterr().out
        assert out.exists()
        report = json.loads(Path(str(out) + ".report.json").read_text(encoding="utf-8"))
        assert report["commits_total"] == 3
        assert report["project"] == "repo"

    def test_cutoff_excludes_later_commits(self, repo, tmp_path):
        repo.commit(day(0), "a@x", "A", {"f.txt": "one\n"})
        repo.commit(day(400), "a@x", "A", {"f.txt": "two\n"})
        out = tmp_path / "proj.jsonl"
        assert main(["mine", str(repo.root), "--cutoff", "2010-06-01", "--out", str(out)]) == 0
        assert len(out.read_text(encoding="utf-8").splitlines()) == 1

    def test_missing_repo_is_input_error(self, tmp_path, capsys):
        out = tmp_path / "x.jsonl"
        code = main(["mine", str(tmp_path / "no-repo"), "--cutoff", "2010-12-31",
                     "--out", str(out)])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_bad_cutoff_is_input_error(self, repo, tmp_path):
        repo.commit(day(0), "a@x", "A", {"f.txt": "one\n"})
        code = main(["mine", str(repo.root), "--cutoff", "2010-13-01",
                     "--out", str(tmp_path / "x.jsonl")])
        assert code == 2


class TestAnalyze:
    def test_layout_and_row_counts(self, workspace, tmp_path):
        out = tmp_path / "out"
        assert main(["analyze", *base_args(workspace, out)]) == 0

        scaling = (out / "ds_alpha" / "scaling.csv").read_text(encoding="utf-8").splitlines()
        assert scaling[0] == "project,method,variant,coefficient,classification,n_points"
        assert len(scaling) == 1 + 3 * 2  # three projects x two default variants
        beta_scaling = (out / "ds_beta" / "scaling.csv").read_text(encoding="utf-8").splitlines()
        assert len(beta_scaling) == 1 + 2 * 2

        periods = (out / "ds_beta" / "periods.csv").read_text(encoding="utf-8").splitlines()
        assert periods[0] == "project,period_index,beta,p_value,n_windows"
        # q1 has three periods, q2 has four
        assert len(periods) == 1 + 3 + 4

        crosstable = (out / "crosstable.csv").read_text(encoding="utf-8").splitlines()
        assert crosstable[0] == "method,variant,dataset,sublinear,superlinear,undetermined,total"
        assert len(crosstable) == 1 + 2 * 2  # two variants x two datasets

    def test_requires_manifest(self, tmp_path, capsys):
        assert main(["analyze", "--out", str(tmp_path / "out")]) == 2
        assert "manifest" in capsys.readouterr().err

    def test_config_file_drives_run(self, workspace, tmp_path):
        out = tmp_path / "out"
        cfg = RunConfig(
            manifests=[str(workspace["beta"])],
            records_dir=str(workspace["records"]),
            methods=["sornette"],
            out_dir=str(out),
        )
        cfg_path = tmp_path / "run.json"
        cfg.save(cfg_path)
        assert main(["analyze", "--config", str(cfg_path)]) == 0
        rows = (out / "ds_beta" / "scaling.csv").read_text(encoding="utf-8").splitlines()[1:]
        assert len(rows) == 2
        assert all(",sornette," in row for row in rows)

    def test_cli_overrides_config_out_dir(self, workspace, tmp_path):
        cfg = RunConfig(
            manifests=[str(workspace["beta"])],
            records_dir=str(workspace["records"]),
            out_dir=str(tmp_path / "ignored"),
        )
        cfg_path = tmp_path / "run.json"
        cfg.save(cfg_path)
        out = tmp_path / "actual"
        assert main(["analyze", "--config", str(cfg_path), "--out", str(out)]) == 0
        assert (out / "crosstable.csv").exists()
        assert not (tmp_path / "ignored").exists()

    def test_bad_method_spec_is_input_error(self, workspace, tmp_path, capsys):
        code = main([
            "analyze", *base_args(workspace, tmp_path / "out"), "--method", "sornette:bogus",
        ])
        assert code == 2
        assert "bogus" in capsys.readouterr().err


class TestSweep:
    def test_grid_rows(self, workspace, tmp_path):
        out = tmp_path / "out"
        assert main(["sweep", *base_args(workspace, out), "--grid", "0,30"]) == 0
        rows = (out / "ds_beta" / "sweep.csv").read_text(encoding="utf-8").splitlines()
        assert rows[0] == "project,front_load_days,alpha3,determined"
        assert len(rows) == 1 + 2 * 2  # two projects x two grid points
        summary = (out / "sweep_summary.csv").read_text(encoding="utf-8").splitlines()
        assert summary[0] == "dataset,front_load_days,mean_alpha3,n_determined"
        assert len(summary) == 1 + 2 * 2  # two datasets x two grid points

    def test_range_grid_syntax(self, workspace, tmp_path):
        out = tmp_path / "out"
        assert main(["sweep", *base_args(workspace, out), "--grid", "0:60:30"]) == 0
        rows = (out / "ds_beta" / "sweep.csv").read_text(encoding="utf-8").splitlines()
        assert len(rows) == 1 + 2 * 3

    @pytest.mark.parametrize("grid", ["abc", "30:0:-30", "0:10:0"])
    def test_bad_grid_is_input_error(self, workspace, tmp_path, grid):
        assert main(["sweep", *base_args(workspace, tmp_path / "o"), "--grid", grid]) == 2


class TestCompare:
    def test_rows_cover_all_experiments(self, workspace, tmp_path):
        out = tmp_path / "out"
        assert main(["compare", *base_args(workspace, out)]) == 0
        lines = (out / "compare.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "experiment,statistic,p_value,n_pairs,mean_relative_change"
        experiments = [line.split(",")[0] for line in lines[1:]]
        assert experiments == [
            "drop_first_period/ds_alpha",
            "drop_first_period/ds_beta",
            "drop_first_period/pooled",
            "ks_scholtes/ds_alpha-vs-ds_beta",
            "ks_sornette/ds_alpha-vs-ds_beta",
            "p_filter/ds_alpha",
            "p_filter/ds_beta",
            "p_filter/pooled",
        ]

    def test_degenerate_cohort_exits_3(self, workspace, tmp_path, capsys):
        code = main([
            "compare",
            "--manifest", str(workspace["mono"]),
            "--records-dir", str(workspace["records"]),
            "--out", str(tmp_path / "out"),
        ])
        assert code == 3
        assert "error" in capsys.readouterr().err


class TestReport:
    def test_requires_analyze_outputs(self, tmp_path, capsys):
        assert main(["report", "--out", str(tmp_path / "empty")]) == 2
        assert "analyze" in capsys.readouterr().err

    def test_renders_summary_and_charts(self, workspace, tmp_path):
        out = tmp_path / "out"
        assert main(["analyze", *base_args(workspace, out)]) == 0
        assert main(["report", "--out", str(out)]) == 0

        differences = (out / "differences.csv").read_text(encoding="utf-8").splitlines()
        assert [row.split(",")[0] for row in differences[1:]] == [
            "original", "selection_adjusted", "method_adjusted", "both_adjusted",
        ]
        superlinearity = (out / "superlinearity.csv").read_text(encoding="utf-8")
        assert "percent_superlinear" in superlinearity

        for name in ("superlinearity.svg", "histogram_sornette.svg", "histogram_scholtes.svg"):
            ET.fromstring((out / name).read_text(encoding="utf-8"))
        hist = (out / "histogram_sornette.csv").read_text(encoding="utf-8").splitlines()
        assert hist[0] == "series,bin_start,bin_end,count"
        assert {line.split(",")[0] for line in hist[1:]} == {"ds_alpha", "ds_beta"}

    def test_unknown_home_dataset_is_input_error(self, workspace, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["analyze", *base_args(workspace, out)]) == 0
        code = main(["report", "--out", str(out), "--sornette-home", "nope"])
        assert code == 2
        assert "nope" in capsys.readouterr().err


class TestDeterminism:
    def test_reruns_and_jobs_are_byte_identical(self, workspace, tmp_path):
        outs = [tmp_path / "out_a", tmp_path / "out_b", tmp_path / "out_c"]
        run_pipeline(workspace, outs[0])
        run_pipeline(workspace, outs[1])
        run_pipeline(workspace, outs[2], jobs=4)

        names = sorted(
            str(p.relative_to(outs[0])) for p in outs[0].rglob("*") if p.is_file()
        )
        assert names  # the pipeline wrote something
        for other in outs[1:]:
            other_names = sorted(
                str(p.relative_to(other)) for p in other.rglob("*") if p.is_file()
            )
            assert other_names == names
            for name in names:
                assert (outs[0] / name).read_bytes() == (other / name).read_bytes(), name
