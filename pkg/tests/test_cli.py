import json
import shutil

import pytest

from orthocirc.cli import main
from _builders import GOLDEN_DIR


@pytest.fixture
def circuit_file(tmp_path):
    path = tmp_path / "c.json"
    rc = main(
        [
            "gen",
            "--vars", "4",
            "--domain", "2",
            "--shape", "balanced",
            "--k", "2",
            "--params", "unitary",
            "--seed", "1",
            "-o", str(path),
        ]
    )
    assert rc == 0
    return path


def run_json(capsys, argv):
    rc = main(argv)
    out = capsys.readouterr().out
    return rc, json.loads(out)


def test_gen_then_partition_oracle(circuit_file, capsys):
    capsys.readouterr()
    rc, record = run_json(capsys, ["partition", str(circuit_file), "--method", "oracle"])
    assert rc == 0
    assert abs(record["partition_function"] - 1.0) <= 1e-9


def test_partition_methods_agree(circuit_file, capsys):
    capsys.readouterr()
    values = {}
    for method in ("oracle", "naive", "orthonormalize"):
        _, record = run_json(capsys, ["partition", str(circuit_file), "--method", method])
        values[method] = record["partition_function"]
    assert abs(values["oracle"] - values["naive"]) <= 1e-9
    assert abs(values["oracle"] - values["orthonormalize"]) <= 1e-9


def test_validate_record(circuit_file, capsys):
    capsys.readouterr()
    rc, record = run_json(capsys, ["validate", str(circuit_file)])
    assert rc == 0
    assert record["structured_decomposable"] is True
    assert record["orthonormal"] is True
    assert record["violations"] == []


def test_marginalize_fast_matches_oracle(circuit_file, capsys):
    capsys.readouterr()
    _, fast = run_json(
        capsys,
        ["marginalize", str(circuit_file), "--keep", "X1=0,X2=1", "--marg", "X3,X4", "--method", "fast"],
    )
    _, oracle = run_json(
        capsys,
        ["marginalize", str(circuit_file), "--keep", "X1=0,X2=1", "--marg", "X3,X4", "--method", "oracle"],
    )
    assert abs(fast["value"] - oracle["value"]) <= 1e-9
    assert fast["cost"]["squared_width_layers"] == fast["cost"]["phi_yz"]


def test_eval_golden_file(capsys, tmp_path):
    golden = tmp_path / "minimal.json"
    shutil.copy(GOLDEN_DIR / "minimal.json", golden)
    capsys.readouterr()
    rc, record = run_json(capsys, ["eval", str(golden), "--assign", "X1=0"])
    assert rc == 0
    re, im = record["value"]
    assert abs(re - 0.7071067811865476) <= 1e-15 and im == 0.0


def test_square_writes_circuit(circuit_file, tmp_path, capsys):
    out = tmp_path / "sq.json"
    rc = main(["square", str(circuit_file), "-o", str(out)])
    assert rc == 0 and out.exists()
    capsys.readouterr()
    rc, record = run_json(capsys, ["validate", str(out)])
    assert rc == 0
    assert record["structured_decomposable"] is True
    assert record["orthonormal"] is False  # squared bases are not a family
    # pointwise: the squared circuit evaluates to |c(x)|^2
    capsys.readouterr()
    _, sq_val = run_json(capsys, ["eval", str(out), "--assign", "X1=0,X2=0,X3=1,X4=1"])
    capsys.readouterr()
    _, val = run_json(capsys, ["eval", str(circuit_file), "--assign", "X1=0,X2=0,X3=1,X4=1"])
    want = val["value"][0] ** 2 + val["value"][1] ** 2
    assert abs(sq_val["value"][0] - want) <= 1e-12 and abs(sq_val["value"][1]) <= 1e-12


def test_orthonormalize_writes_normalized_circuit(tmp_path, capsys):
    raw = tmp_path / "g.json"
    main(["gen", "--vars", "4", "--domain", "2", "--k", "2", "--params", "generic", "--seed", "5", "-o", str(raw)])
    out = tmp_path / "ortho.json"
    capsys.readouterr()
    rc, record = run_json(capsys, ["orthonormalize", str(raw), "-o", str(out)])
    assert rc == 0
    assert record["beta"] > 0
    capsys.readouterr()
    rc, check = run_json(capsys, ["validate", str(out)])
    assert check["orthonormal"] is True
    capsys.readouterr()
    rc, z = run_json(capsys, ["partition", str(out), "--method", "oracle"])
    assert abs(z["partition_function"] - 1.0) <= 1e-9


def test_bench_emits_csv_and_figure(circuit_file, tmp_path, capsys):
    png = tmp_path / "bench.png"
    rc = main(["bench", str(circuit_file), "--marg", "X3,X4", "--repeat", "2", "--plot", str(png)])
    assert rc == 0
    out = capsys.readouterr().out
    lines = [line for line in out.strip().splitlines() if line]
    header = lines[0].split(",")
    assert header[0] == "method" and "total_macs" in header
    rows = {line.split(",")[0]: line.split(",") for line in lines[1:]}
    fast_macs = int(rows["fast"][header.index("total_macs")])
    naive_macs = int(rows["naive"][header.index("total_macs")])
    assert 0 < fast_macs <= naive_macs
    assert png.exists() and png.stat().st_size > 0


def test_unknown_flag_exits_one(circuit_file, capsys):
    assert main(["marginalize", str(circuit_file), "--bogus"]) == 1


def test_missing_file_exits_one(capsys):
    assert main(["validate", "/nonexistent/path.json"]) == 1


def test_bad_assignment_exits_one(circuit_file, capsys):
    assert main(["eval", str(circuit_file), "--assign", "X1=maybe"]) == 1


def test_overlapping_keep_and_marg_exits_one(circuit_file, capsys):
    rc = main(["marginalize", str(circuit_file), "--keep", "X1=0,X2=0,X3=0", "--marg", "X3,X4"])
    assert rc == 1


def test_singular_circuit_exits_two(tmp_path, capsys):
    # rank-deficient sum weights make orthonormalization fail numerically
    doc = {
        "format_version": "1",
        "variables": [{"id": 0, "domain": {"kind": "finite", "size": 2}}],
        "layers": [
            {"id": 0, "kind": "input", "var": 0, "basis": {"name": "indicator", "size": 2}, "width": 2},
            {"id": 1, "kind": "sum", "input": 0, "rows": 2, "cols": 2,
             "weights": [[1.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]},
            {"id": 2, "kind": "sum", "input": 1, "rows": 1, "cols": 2, "weights": [[1.0, 0.0], [1.0, 0.0]]},
        ],
        "root": 2,
    }
    path = tmp_path / "singular.json"
    path.write_text(json.dumps(doc))
    assert main(["orthonormalize", str(path), "-o", str(tmp_path / "out.json")]) == 2


def test_non_orthonormal_fast_marginal_exits_one(tmp_path, capsys):
    raw = tmp_path / "g.json"
    main(["gen", "--vars", "3", "--domain", "2", "--params", "generic", "--seed", "2", "-o", str(raw)])
    rc = main(["marginalize", str(raw), "--keep", "X1=0", "--marg", "X2,X3", "--method", "fast"])
    assert rc == 1


def test_raw_zero_based_ids_accepted(circuit_file, capsys):
    capsys.readouterr()
    _, by_name = run_json(
        capsys, ["marginalize", str(circuit_file), "--keep", "X1=0,X2=1", "--marg", "X3,X4"]
    )
    _, by_id = run_json(
        capsys, ["marginalize", str(circuit_file), "--keep", "0=0,1=1", "--marg", "2,3"]
    )
    assert by_name["value"] == by_id["value"]


def test_bench_ratio_grows_with_chain_length(tmp_path, capsys):
    ratios = []
    for d in (8, 16, 32):
        path = tmp_path / f"chain{d}.json"
        main(["gen", "--vars", str(d), "--domain", "4", "--shape", "chain", "--k", "4",
              "--kind", "hadamard", "--params", "unitary", "--seed", "1", "-o", str(path)])
        marg = ",".join(f"X{i + 1}" for i in range(d // 2, d))
        capsys.readouterr()
        rc = main(["bench", str(path), "--marg", marg, "--repeat", "1"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        header = lines[0].split(",")
        rows = {line.split(",")[0]: line.split(",") for line in lines[1:]}
        idx = header.index("total_macs")
        ratios.append(int(rows["naive"][idx]) / int(rows["fast"][idx]))
    assert 1.0 < ratios[0] < ratios[1] < ratios[2]


def test_gen_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["gen", "--vars", "5", "--domain", "3", "--shape", "random", "--k", "3",
            "--kind", "mixed", "--params", "unitary", "--seed", "9"]
    main(argv + ["-o", str(a)])
    main(argv + ["-o", str(b)])
    assert a.read_text() == b.read_text()
