import csv
import io
import shlex
from fractions import Fraction

import pytest

from cliquepart import cli, workflows
from cliquepart.core import WeightedInstance
from cliquepart.instances import gen_sparse, gen_structured, write_instance


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def tri_file(tmp_path, triangle):
    path = tmp_path / "tri.cpp"
    write_instance(triangle, path)
    return path


def test_gen_writes_count_files(tmp_path, capsys):
    code, out, err = run(capsys, "gen", "random", 30, "--count", 10, "--seed", 5, "--out", tmp_path)
    assert code == 0
    names = [line.split("/")[-1] for line in out.split()]
    assert names == [f"random_n30_s{s}.cpp" for s in range(5, 15)]
    assert err.startswith("# config: cliquepart gen random 30 ")
    before = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    run(capsys, "gen", "random", 30, "--count", 10, "--seed", 5, "--out", tmp_path)
    assert {p.name: p.read_bytes() for p in tmp_path.iterdir()} == before


def test_gen_structured_divisibility(tmp_path, capsys):
    assert run(capsys, "gen", "structured", 30, "--clusters", 5, "--out", tmp_path)[0] == 0
    code, _, err = run(capsys, "gen", "structured", 30, "--clusters", 7, "--out", tmp_path)
    assert code == 2 and "k_clusters" in err


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["gen", "nosuchfamily", "5"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["count", "x.cpp", "--kinds", "ABC"])
    assert exc.value.code == 2
    assert run(capsys, "count", "/nonexistent.cpp")[0] == 2


def test_count_columns(tmp_path, capsys):
    run(capsys, "gen", "random", 30, "--out", tmp_path)
    f = tmp_path / "random_n30_s0.cpp"
    code, out, _ = run(capsys, "count", f, "--kinds", "P,MRP,PCP,PFRP", "--expected")
    row = csv_rows(out)[0]
    assert code == 0 and row["P"] == "12180"
    assert row["expected_MRP"] == "9135" and row["expected_PFRP"] == "3045"
    for kind, mean in (("MRP", 9135), ("PCP", 6090), ("PFRP", 3045)):
        assert abs(int(row[kind]) - mean) < 0.25 * mean
    _, out, _ = run(capsys, "count", f, "--kinds", "all")
    header = out.split("\n")[0].split(",")
    assert header[4:] == ["P", "RP", "MRP", "CP", "PCP", "FRP", "PFRP", "XFRP"]


def test_count_sparse_mrp(tmp_path, capsys):
    f = tmp_path / "s.cpp"
    write_instance(gen_sparse(30, 2), f)
    row = csv_rows(run(capsys, "count", f, "--expected", "--kinds", "MRP")[1])[0]
    assert abs(int(row["MRP"]) - 6767) < 0.15 * 6767
    assert row["expected_MRP"] == "20300/3"


def test_solve_triangle_oracle(tri_file, capsys):
    code, out, _ = run(capsys, "solve", tri_file, "--kind", "P", "--engine", "oracle")
    assert code == 0 and "value: 1\n" in out


def test_solve_vectors_reports_raw_and_repaired(tri_file, capsys):
    code, out, _ = run(capsys, "solve", tri_file, "--kind", "MRP", "--engine", "vectors", "--all")
    assert code == 0
    assert "repaired=1" in out and "status: optimal" in out


def test_solve_structured_bnb(tmp_path, capsys):
    f = tmp_path / "x.cpp"
    write_instance(gen_structured(30, 5, Fraction(1), 0), f)
    code, out, _ = run(capsys, "solve", f, "--kind", "PFRP", "--engine", "bnb")
    assert code == 0 and "value: 75\n" in out


def test_solve_oversized_vectors(tmp_path, capsys):
    f = tmp_path / "x.cpp"
    write_instance(gen_sparse(12, 0), f)
    code, _, err = run(capsys, "solve", f, "--engine", "vectors")
    assert code == 2 and "n <= 7" in err


def test_solve_json_and_experimental(tri_file, capsys):
    import json

    code, out, _ = run(capsys, "solve", tri_file, "--kind", "XFRP", "--engine", "vectors", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["value"] == 1 and "experimental" in data["note"]


def test_verify_fuzz(capsys):
    code, out, _ = run(capsys, "verify", "--fuzz", "random", 5, 200, 42)
    assert code == 0 and out.strip().endswith("200/200 pass")
    code, out, _ = run(capsys, "verify", "--fuzz", "modularity", 6, 50, 7)
    assert code == 0 and out.strip().endswith("50/50 pass")


def test_verify_files_and_experimental(tri_file, capsys):
    code, out, _ = run(capsys, "verify", tri_file, "--experimental")
    assert code == 0 and "1/1 pass" in out


def test_verify_failure_exit_code(capsys, monkeypatch):
    def broken(inst, name="", experimental=False):
        res = workflows.VerifyResult(name)
        res.failures.append("forced")
        return res

    monkeypatch.setattr(workflows, "verify_instance", broken)
    code, out, _ = run(capsys, "verify", "--fuzz", "sparse", 4, 3, 0)
    assert code == 1 and "FAIL" in out and "0/3 pass" in out


def test_conjecture_counterexample_is_not_a_failure(capsys, monkeypatch):
    def flagged(inst, name="", experimental=False):
        res = workflows.VerifyResult(name)
        if experimental:
            res.conjecture_counterexample = "made up"
        return res

    monkeypatch.setattr(workflows, "verify_instance", flagged)
    code, out, _ = run(capsys, "verify", "--fuzz", "sparse", 4, 2, 0, "--experimental")
    assert code == 0 and out.count("CONJECTURE COUNTEREXAMPLE") == 2


def test_verify_usage(capsys):
    assert run(capsys, "verify")[0] == 2
    assert run(capsys, "verify", "--fuzz", "random", 9, 1, 0)[0] == 2
    assert run(capsys, "verify", "--fuzz", "random", "x", 1, 0)[0] == 2


def test_verify_jobs_same_output(capsys):
    one = run(capsys, "verify", "--fuzz", "sparse", 5, 6, 3, "--jobs", 1)[1]
    two = run(capsys, "verify", "--fuzz", "sparse", 5, 6, 3, "--jobs", 2)[1]
    assert one == two


def test_jobs_env_default(monkeypatch):
    monkeypatch.setenv("CLIQUEPART_JOBS", "3")
    args = cli.build_parser().parse_args(["verify", "--fuzz", "random", "4", "1", "0"])
    assert args.jobs == 3


def test_export(tri_file, tmp_path, capsys):
    out_dir = tmp_path / "lp"
    code, out, _ = run(capsys, "export", tri_file, "--kinds", "PFRP,P", "--out", out_dir)
    assert code == 0
    pf = (out_dir / "tri__PFRP.lp").read_text()
    assert pf.count("\n t_") == 1
    first = (out_dir / "tri__P.lp").read_bytes()
    run(capsys, "export", tri_file, "--kinds", "P", "--out", out_dir)
    assert (out_dir / "tri__P.lp").read_bytes() == first


def test_export_full_n30(tmp_path, capsys):
    run(capsys, "gen", "random", 30, "--out", tmp_path)
    run(capsys, "export", tmp_path / "random_n30_s0.cpp", "--kinds", "P", "--out", tmp_path)
    text = (tmp_path / "random_n30_s0__P.lp").read_text()
    assert text.count("\n t_") == 12180


def test_bench_structured(tmp_path, capsys):
    _, manifest, _ = run(capsys, "gen", "structured", 12, "--clusters", 3, "--count", 10, "--out", tmp_path)
    mf = tmp_path / "manifest.txt"
    mf.write_text(manifest)
    code, out, _ = run(capsys, "bench", mf, "--kinds", "MRP,PCP,PFRP", "--engine", "bnb")
    rows = csv_rows(out)
    assert code == 0 and len(rows) == 30
    assert all(r["status"] == "optimal" for r in rows)
    by_instance = {}
    for r in rows:
        by_instance.setdefault(r["instance"], set()).add(r["value"])
    assert all(len(v) == 1 for v in by_instance.values())
    files = manifest.split()
    counts = csv_rows(run(capsys, "count", *files, "--kinds", "MRP,PCP,PFRP")[1])
    for c in counts:
        for kind in ("MRP", "PCP", "PFRP"):
            match = [r for r in rows if r["instance"] == c["instance"] and r["kind"] == kind]
            assert match[0]["count"] == c[kind]


def test_bench_empty_manifest(tmp_path, capsys):
    mf = tmp_path / "empty.txt"
    mf.write_text("")
    code, out, _ = run(capsys, "bench", mf)
    assert code == 0 and out == "instance,family,n,seed,kind,count,solver,status,value,elapsed\n"
    code, out, _ = run(capsys, "bench", mf, "--format", "markdown")
    assert out.startswith("| instance |")


def test_bench_relative_manifest_and_engine_cap(tmp_path, capsys):
    write_instance(gen_sparse(9, 0), tmp_path / "a.cpp")
    mf = tmp_path / "m.txt"
    mf.write_text("# comment\na.cpp\n")
    code, out, _ = run(capsys, "bench", mf, "--engine", "oracle", "--kinds", "P")
    assert code == 0 and len(csv_rows(out)) == 1
    assert run(capsys, "bench", mf, "--engine", "vectors")[0] == 2


def test_echo_reproduces_outputs(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, err = run(capsys, "gen", "sparse", 7, "--count", 2, "--out", "g")
    line = err.split("# config: ")[1].strip()
    files = {p.name: p.read_bytes() for p in (tmp_path / "g").iterdir()}
    for p in (tmp_path / "g").iterdir():
        p.unlink()
    code2, out2, _ = run(capsys, *shlex.split(line)[1:])
    assert (code2, out2) == (code, out)
    assert {p.name: p.read_bytes() for p in (tmp_path / "g").iterdir()} == files
