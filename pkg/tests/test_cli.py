import json

import numpy as np
import pytest

from conftest import make_blobs
from qksvm.cli import main


def write_toy_csv(path, n_per_class=14, seed=0):
    features, labels = make_blobs(n_per_class=n_per_class, seed=seed)
    lines = [
        ",".join([str(int(l))] + [repr(float(v)) for v in row])
        for row, l in zip(features, labels)
    ]
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture
def toy_csv(tmp_path):
    path = tmp_path / "toy.csv"
    write_toy_csv(path)
    return path


def toy_args(toy_csv, **extra):
    args = [
        "--data", str(toy_csv),
        "--data-format", "simple",
        "--subsample-size", "0",
        "--test-fraction", "0.25",
        "--seed", "5",
        "--sa-sweeps", "300",
        "--sa-restarts", "4",
    ]
    for key, value in extra.items():
        flag = "--" + key.replace("_", "-")
        if value is None:
            args.append(flag)
        else:
            args.extend([flag, str(value)])
    return args


class TestKta:
    def test_grid_rows_sorted(self, toy_csv, tmp_path, capsys):
        out = tmp_path / "kta.json"
        code = main(["kta"] + toy_args(
            toy_csv, qubits="2", feature_map="z,su2rr", reps="1,2", output=out,
        ))
        assert code == 0
        report = json.loads(out.read_text())
        rows = report["rows"]
        assert len(rows) == 4
        ktas = [r["kta"] for r in rows]
        assert ktas == sorted(ktas, reverse=True)
        maps = {(r["kernel"]["feature_map"], r["kernel"]["repetitions"]) for r in rows}
        assert maps == {("z", 1), ("z", 2), ("su2rr", 1), ("su2rr", 2)}

    def test_label_aligned_data_scores_near_one(self, tmp_path):
        # features that are essentially the labels themselves make the linear
        # kernel proportional to the ideal y*y^T kernel
        rng = np.random.default_rng(0)
        labels = rng.permutation(np.array([1] * 15 + [-1] * 15))
        features = np.column_stack([labels, labels]).astype(float)
        features += rng.normal(scale=0.01, size=features.shape)
        path = tmp_path / "aligned.csv"
        path.write_text("\n".join(
            ",".join([str(int(l))] + [repr(float(v)) for v in row])
            for row, l in zip(features, labels)
        ) + "\n")
        out = tmp_path / "kta.json"
        code = main(["kta"] + toy_args(path, kernel="linear", output=out))
        assert code == 0
        rows = json.loads(out.read_text())["rows"]
        assert rows[0]["kta"] > 0.95

    def test_missing_data_file_is_usage_error(self, tmp_path, capsys):
        code = main(["kta", "--data", str(tmp_path / "nope.csv")])
        assert code == 2
        assert "nope.csv" in capsys.readouterr().err

    def test_export_kernel_csv(self, toy_csv, tmp_path):
        kernel_path = tmp_path / "kernel.csv"
        out = tmp_path / "kta.json"
        code = main(["kta"] + toy_args(
            toy_csv, qubits="2", export_kernel=kernel_path, output=out,
        ))
        assert code == 0
        rows = kernel_path.read_text().strip().splitlines()
        K = np.array([[float(v) for v in line.split(",")] for line in rows])
        assert K.shape == (20, 20)  # 28 points, 25% split: round(3.5)=4 held out per class
        assert np.allclose(K, K.T)
        assert np.allclose(np.diag(K), 1.0)


class TestTrain:
    def test_writes_model_and_report(self, toy_csv, tmp_path):
        model_path = tmp_path / "model.json"
        report_path = tmp_path / "report.json"
        code = main(["train"] + toy_args(
            toy_csv, kernel="linear", c_value="7",
            model=model_path, output=report_path,
        ))
        assert code == 0
        assert model_path.exists()
        report = json.loads(report_path.read_text())
        assert report["qubo"]["num_vars"] == report["qubo"]["n"] * report["qubo"]["bits"]
        assert "energy" in report["solver"]
        assert 0.0 <= report["macro_f1"] <= 1.0
        assert report["train_metrics"]["confusion"]["tp"] >= 0

    def test_export_qubo_flag(self, toy_csv, tmp_path):
        qubo_path = tmp_path / "qubo.txt"
        code = main(["train"] + toy_args(
            toy_csv, kernel="linear", c_value="7",
            model=tmp_path / "m.json", output=tmp_path / "r.json",
            export_qubo=qubo_path,
        ))
        assert code == 0
        text = qubo_path.read_text()
        assert text.startswith("# qubo coordinate list")

    def test_report_energy_matches_recomputation(self, toy_csv, tmp_path):
        from qksvm.cli import StageTimer, config_from_args, build_parser, prepare_splits
        from qksvm.kernel import classical_kernel
        from qksvm.qubo import build_qubo, encode, energy
        from qksvm.svm import load_model

        model_path = tmp_path / "model.json"
        report_path = tmp_path / "report.json"
        argv = ["train"] + toy_args(
            toy_csv, kernel="linear", c_value="7",
            model=model_path, output=report_path,
        )
        assert main(argv) == 0
        report = json.loads(report_path.read_text())
        model = load_model(model_path)
        # rebuild the same training kernel and QUBO independently
        cfg = config_from_args(build_parser().parse_args(argv))
        _, train_ds, _, _ = prepare_splits(cfg, StageTimer())
        feats = model.preprocessing.apply(train_ds.features)
        K = classical_kernel("linear", feats)
        problem = build_qubo(K, train_ds.labels, model.c_value, model.penalty)
        bits = encode(problem, model.alphas)
        assert energy(problem, bits) == pytest.approx(report["solver"]["energy"], abs=1e-9)
        assert float(np.sum(model.alphas * train_ds.labels)) == report["solver"]["constraint_residual"]

    def test_quantum_train_smoke(self, toy_csv, tmp_path):
        code = main(["train"] + toy_args(
            toy_csv, qubits="2", feature_map="zz", reps="1", c_value="7",
            model=tmp_path / "m.json", output=tmp_path / "r.json",
        ))
        assert code == 0
        report = json.loads((tmp_path / "r.json").read_text())
        assert 0.0 < report["kta"] <= 1.0

    def test_no_bias_drops_bias_and_penalty(self, toy_csv, tmp_path):
        from qksvm.svm import load_model

        model_path = tmp_path / "m.json"
        code = main(["train"] + toy_args(
            toy_csv, kernel="linear", c_value="7", no_bias=None,
            model=model_path, output=tmp_path / "r.json",
        ))
        assert code == 0
        model = load_model(model_path)
        assert model.bias == 0.0
        assert model.use_bias is False


class TestEvaluate:
    def test_on_own_training_set(self, toy_csv, tmp_path):
        model_path = tmp_path / "model.json"
        assert main(["train"] + toy_args(
            toy_csv, kernel="linear", c_value="7",
            model=model_path, output=tmp_path / "r.json",
        )) == 0
        out = tmp_path / "eval.json"
        code = main(["evaluate"] + toy_args(
            toy_csv, kernel="linear", model=model_path, on="train", output=out,
        ))
        assert code == 0
        report = json.loads(out.read_text())
        conf = report["metrics"]["confusion"]
        assert conf["tp"] + conf["fp"] + conf["fn"] + conf["tn"] == report["size"]
        for key in ("positive", "negative", "macro_f1", "accuracy"):
            assert key in report["metrics"] or key in report["metrics"]["positive"]

    def test_perfect_toy_model(self, toy_csv, tmp_path):
        model_path = tmp_path / "model.json"
        assert main(["train"] + toy_args(
            toy_csv, kernel="linear", c_value="7",
            model=model_path, output=tmp_path / "r.json",
        )) == 0
        out = tmp_path / "eval.json"
        code = main(["evaluate"] + toy_args(
            toy_csv, kernel="linear", model=model_path, on="all", output=out,
        ))
        assert code == 0
        assert json.loads(out.read_text())["macro_f1"] == 1.0

    def test_version_mismatch_model(self, toy_csv, tmp_path, capsys):
        bad_model = tmp_path / "bad.json"
        bad_model.write_text('{"version": 99}\n')
        code = main(["evaluate"] + toy_args(toy_csv, model=bad_model))
        assert code == 1
        assert "version" in capsys.readouterr().err


class TestPredict:
    def test_predict_rows(self, toy_csv, tmp_path):
        model_path = tmp_path / "model.json"
        assert main(["train"] + toy_args(
            toy_csv, kernel="linear", c_value="7",
            model=model_path, output=tmp_path / "r.json",
        )) == 0
        out = tmp_path / "pred.json"
        code = main([
            "predict", "--data", str(toy_csv), "--data-format", "simple",
            "--model", str(model_path), "--output", str(out),
        ])
        assert code == 0
        rows = json.loads(out.read_text())["rows"]
        assert len(rows) == 28
        assert all(r["predicted"] in (-1, 1) for r in rows)


class TestGrid:
    def test_cell_count_and_ordering(self, toy_csv, tmp_path):
        out = tmp_path / "grid.json"
        code = main(["grid"] + toy_args(
            toy_csv, qubits="2", feature_map="z,su2hr", reps="1",
            c_value="3,7", sa_sweeps="150", output=out,
        ))
        assert code == 0
        rows = json.loads(out.read_text())["rows"]
        assert len(rows) == 4
        ok = [r for r in rows if r["status"] == "ok"]
        f1s = [r["macro_f1"] for r in ok]
        assert f1s == sorted(f1s, reverse=True)

    def test_resource_cell_fails_soft(self, toy_csv, tmp_path):
        out = tmp_path / "grid.json"
        code = main(["grid"] + toy_args(
            toy_csv, qubits="2,30", feature_map="z", reps="1",
            c_value="3", sa_sweeps="100", output=out,
        ))
        assert code == 0
        rows = json.loads(out.read_text())["rows"]
        assert len(rows) == 2
        statuses = {r["config"]["qubits"]: r["status"] for r in rows}
        assert statuses[2] == "ok"
        assert statuses[30].startswith(("skipped: resource", "failed"))

    def test_csv_output(self, toy_csv, tmp_path):
        out = tmp_path / "grid.csv"
        code = main(["grid"] + toy_args(
            toy_csv, qubits="2", feature_map="z", reps="1",
            c_value="3", sa_sweeps="100", output=out,
        ))
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("status,kernel")
        assert len(lines) == 2


class TestExportQubo:
    def test_subcommand(self, toy_csv, tmp_path):
        out = tmp_path / "exported.txt"
        code = main(["export-qubo"] + toy_args(
            toy_csv, kernel="linear", c_value="3", output=out,
        ))
        assert code == 0
        from qksvm.anneal import import_qubo

        problem = import_qubo(out)
        assert problem.encoding.c_value == 3
        assert problem.num_vars == problem.encoding.n * 2


class TestExitCodes:
    def test_bad_c_value(self, toy_csv, capsys):
        code = main(["train"] + toy_args(toy_csv, c_value="6"))
        assert code == 2
        assert "power of two" in capsys.readouterr().err

    def test_bad_fraction(self, toy_csv):
        assert main(["train"] + toy_args(toy_csv, test_fraction="1.5")) == 2

    def test_qubit_cap_without_allow_large(self, toy_csv):
        assert main(["train"] + toy_args(toy_csv, qubits="30")) == 2

    def test_runtime_failure_names_stage(self, tmp_path, capsys):
        # a file that parses as simple but has a single class fails in split
        path = tmp_path / "oneclass.csv"
        path.write_text("1,0.0,0.0\n1,1.0,1.0\n1,2.0,2.0\n")
        code = main(["train"] + toy_args(path))
        assert code == 1
        assert "stage 'split'" in capsys.readouterr().err


class TestDeterminism:
    def test_byte_identical_reports(self, toy_csv, tmp_path):
        args = ["train"] + toy_args(
            toy_csv, kernel="linear", c_value="7",
            model=tmp_path / "m.json", output=tmp_path / "r.json",
            no_timestamp=None,
        )
        assert main(args) == 0
        first = (tmp_path / "r.json").read_bytes()
        assert main(args) == 0
        assert (tmp_path / "r.json").read_bytes() == first

    def test_timestamp_present_by_default(self, toy_csv, tmp_path):
        out = tmp_path / "r.json"
        assert main(["kta"] + toy_args(toy_csv, qubits="2", output=out)) == 0
        assert "timestamp" in json.loads(out.read_text())
