from pathlib import Path

import orjson
import pytest

from app.files import read_monad, write_monad, write_pair
from core.canonical import MatrixPairE, default_points
from core.exact import CoxPolynomial, RationalMatrix
from core.monad import MonadData
from core.variety import VarietyTag
from main import run

EXAMPLES = Path(__file__).parent.parent / "example_configs"
PULLBACK = str(EXAMPLES / "p2_pullback_monad.json")


def run_json(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, orjson.loads(out)


def test_strata(capsys):
    code, report = run_json(capsys, "strata", "--r", "2", "--n", "3", "--n-f", "2")
    assert code == 0
    assert report["format"] == 1
    assert report["command"] == "strata"
    assert report["dims"]["moduli_dim"] == 9
    assert [row["n_f"] for row in report["rows"]] == [0, 1, 2, 3]
    assert report["bvectors"] == [[1, 2], [2, 1]]
    assert report["generic_split"] == "O(-1)^2"


def test_strata_table(capsys):
    assert run(["--table", "strata", "--r", "2", "--n", "2"]) == 0
    out = capsys.readouterr().out
    assert "n_f" in out and "dim_bound" in out
    assert not out.lstrip().startswith("{")


def test_threshold(capsys):
    code, report = run_json(
        capsys, "threshold", "--variety", "p2bundle:0,1", "--r", "2", "--n", "2"
    )
    assert code == 0
    assert report["c_f"] == "4"
    assert report["usual_slope_threshold"] == "2"
    assert report["bounds"]["fiber_slope_gap"] == "1"


def test_threshold_with_c1_omits_c_f(capsys):
    code, report = run_json(
        capsys, "threshold", "--variety", "hirzebruch:1", "--r", "2", "--n", "3", "--c1", "1,0"
    )
    assert code == 0
    assert report["c_f"] is None
    assert "usual_slope_threshold" not in report


def test_cohom(capsys):
    code, report = run_json(capsys, "cohom", "--variety", "hirzebruch:1", "--deg", "2,3")
    assert code == 0
    assert report["h"] == [15, 0, 0]
    assert report["chi"] == "15"
    assert report["chi_from_h"] == 15


def test_chern_family(capsys):
    code, report = run_json(
        capsys, "chern", "--variety", "p2bundle:1,1", "--family", "iz", "--n", "3"
    )
    assert code == 0
    assert report["family"] == "iz"
    assert report["c2"] == "2*u2"
    assert report["asserted_c2"] == "3*u2"


def test_chern_of_monad(capsys):
    code, report = run_json(
        capsys, "chern", "--variety", "p2bundle:0,1", "--r", "2", "--n", "2"
    )
    assert code == 0
    assert report["c2"] == "2*u2"
    assert report["dimensions"]["m"] == 13
    assert len(report["direct_images"]) == 2


def test_chern_from_terms(capsys):
    code, report = run_json(
        capsys,
        "chern",
        "--variety",
        "hirzebruch:1",
        "--term=+:0,0:2",
        "--term=-:0,-1",
    )
    assert code == 0
    assert report["rank"] == 1


def test_grr(capsys):
    code, report = run_json(capsys, "grr", "--variety", "hirzebruch:2", "--r", "3", "--n", "4")
    assert code == 0
    assert (report["rank"], report["degree"]) == (3, "-4")


def test_monad_check(capsys):
    code, report = run_json(capsys, "monad", "check", PULLBACK, "--samples", "20", "--lines", "3")
    assert code == 0
    assert report["ok"] is True
    assert report["compose_ok"] is True
    assert report["lambda"]["trivial_on_lambda"] is True
    assert report["lines"]["lines_checked"] == 3


def test_monad_complete_then_check(capsys, tmp_path):
    out = tmp_path / "completed.json"
    code, report = run_json(capsys, "--seed", "5", "monad", "complete", PULLBACK, "--out", str(out))
    assert code == 0
    assert report["basis_size"] == 6
    assert report["compose_ok"] is True
    completed = read_monad(str(out))
    assert completed.middle_rank == 4
    code, report = run_json(capsys, "monad", "check", str(out), "--samples", "5")
    assert report["compose_ok"] is True


def test_monad_restrict(capsys, tmp_path):
    out = tmp_path / "fiber.json"
    code, report = run_json(capsys, "monad", "restrict", PULLBACK, "--x", "1,1", "--out", str(out))
    assert code == 0
    assert report["compose_ok"] is True
    assert read_monad(str(out)).variety == VarietyTag.p2()
    code, report = run_json(capsys, "monad", "restrict", PULLBACK, "--lambda")
    assert code == 0
    assert report["lambda"]["a_const"] == [["1"], ["0"], ["0"], ["0"]]


def test_monad_check_failure(capsys, tmp_path):
    v = VarietyTag.p2_bundle(1, 1)
    z = [CoxPolynomial.variable(v, f"z{i}") for i in range(3)]
    w0, w1 = CoxPolynomial.variable(v, "w0"), CoxPolynomial.variable(v, "w1")
    zero = CoxPolynomial.zero(v)
    a_matrix = ((z[0],), (w0 * z[1],), (w1 * z[1],), (w0 * z[2],))
    path = tmp_path / "bad.json"
    write_monad(str(path), MonadData(v, 2, 1, a_matrix, ((zero,) * 4,)))
    code, report = run_json(capsys, "monad", "check", str(path), "--samples", "5")
    assert code == 1
    assert report["ok"] is False
    assert report["pointwise"]["a_injective"] is False


def test_canon_round_trip(capsys, tmp_path):
    pair = tmp_path / "pair.json"
    reduced = tmp_path / "reduced.json"
    code, _ = run_json(capsys, "--seed", "7", "canon", "sample", "--r", "2", "--n", "3", "--out", str(pair))
    assert code == 0
    code, report = run_json(capsys, "canon", "reduce", str(pair), "--out", str(reduced))
    assert code == 0
    assert (report["r1"], report["r2"]) == (1, 1)
    code, report = run_json(capsys, "canon", "stabilizer", str(reduced))
    assert code == 0
    assert report["trivial"] is True
    code, report = run_json(capsys, "canon", "treduce", str(pair))
    assert code == 0
    assert report["result"]["c"] == "1"


def test_canon_slice(capsys):
    code, report = run_json(capsys, "canon", "slice", "--r", "3", "--n", "7")
    assert code == 0
    assert report["slice"]["codim"] == 15
    assert report["consistent"] is True


def test_genericity_failure_exits_with_one(capsys, tmp_path):
    left = RationalMatrix.from_rows([[1, 2, 3], [1, 0, 5]])
    path = tmp_path / "pair.json"
    write_pair(str(path), MatrixPairE(default_points(3), 2, left, left))
    code, report = run_json(capsys, "canon", "reduce", str(path))
    assert code == 1
    assert report["error"] == "GenericityFailure"


def test_rank_out_of_range_exits_with_one(capsys):
    code, report = run_json(capsys, "strata", "--r", "3", "--n", "2")
    assert code == 1
    assert report["error"] == "RankOutOfRange"


@pytest.mark.parametrize(
    "argv",
    [
        ["cohom", "--variety", "p3", "--deg", "1"],
        ["strata", "--r", "two", "--n", "3"],
        ["threshold", "--variety", "hirzebruch:1"],
        ["nonsense"],
        [],
    ],
)
def test_usage_errors(argv):
    assert run(argv) == 2


def test_unreadable_files(capsys, tmp_path):
    code, report = run_json(capsys, "monad", "check", str(tmp_path / "missing.json"))
    assert code == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    code, report = run_json(capsys, "monad", "check", str(broken))
    assert code == 2
    assert report["error"] == "FormatError"


@pytest.mark.parametrize(
    "change", [{"r": "abc"}, {"variety": {"a": "x", "b": 1}}, {"n": 1.5}]
)
def test_malformed_monad_file_exits_with_two(capsys, tmp_path, change):
    doc = orjson.loads(Path(PULLBACK).read_bytes())
    doc.update(change)
    path = tmp_path / "bad.json"
    path.write_bytes(orjson.dumps(doc))
    code, report = run_json(capsys, "monad", "check", str(path))
    assert code == 2
    assert report["error"] == "FormatError"


def test_config_file(capsys, tmp_path):
    conf = tmp_path / "conf.yaml"
    conf.write_text("sweep:\n  seed: 3\noutput:\n  indent: false\n")
    code = run(["--config", str(conf), "sweep", "--suite", "strata"])
    out = capsys.readouterr().out
    assert code == 0
    assert "\n" not in out.strip()
    assert orjson.loads(out)["seed"] == 3


def test_bad_config_file(capsys, tmp_path):
    conf = tmp_path / "conf.yaml"
    conf.write_text("sweep:\n  no_such_key: 1\n")
    assert run(["--config", str(conf), "strata", "--r", "2", "--n", "2"]) == 2
