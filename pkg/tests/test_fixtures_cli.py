import json
import subprocess
import sys

import pytest

from capkernel.cli import main, run_command
from capkernel.errors import ParseError, ValidationError
from capkernel.fixtures import (BuildOptions, build_covering, bundled_fixture,
                                bundled_fixture_names, parse_file, parse_text, serialize)

from conftest import FIXTURES


def fixture_text(name):
    return bundled_fixture(name).read_text()


def write(tmp_path, text, name="f.fix"):
    p = tmp_path / name
    p.write_text(text)
    return p


# -- parsing -------------------------------------------------------------------------

def test_bundled_fixtures_present():
    assert set(FIXTURES) <= set(bundled_fixture_names())


@pytest.mark.parametrize("name", FIXTURES)
def test_round_trip(name):
    fx = parse_file(bundled_fixture(name))
    text = serialize(fx)
    assert parse_text(text) == fx
    assert serialize(parse_text(text)) == text


@pytest.mark.parametrize("text,line,col", [
    ("format_version = 1\nbogus = 3\n", 2, 1),
    ("format_version = 1\n[field F]\npolynomial = 1 x 1\n", 3, 16),
    ("format_version = 1\n[classgroup F]\nrelation = 1 : 1/0\n", 3, 16),
    ("format_version = 1\n[nonsense]\n", 2, 1),
    ("format_version = 1\n[field F]\nshape = 2\n", 3, 1),
    ("format_version = 1\n[sigma]\nF = 2 1\n", 3, 5),
])
def test_parse_errors_carry_location(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_text(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_missing_version_rejected():
    with pytest.raises(ParseError):
        parse_text("name = x\n")


def test_comments_and_blank_lines_ignored():
    text = fixture_text("q_to_qi")
    noisy = "\n# leading comment\n\n" + text.replace("\n[", "\n\n# note\n[")
    assert parse_text(noisy) == parse_text(text)


# -- validation ----------------------------------------------------------------------

def test_fixture_a_certificates():
    cov = build_covering(parse_file(bundled_fixture("fixture_a")))
    assert cov.class_F.group.order == 2
    assert cov.units_K.w == 4 and cov.units_K.rank == 1


def test_wrong_unit_named():
    # 1 + sqrt5 = 2 theta^2 + 4 inside fixture A's K; its norm to Q(sqrt5) is -4
    text = fixture_text("fixture_a").replace("free = 1 0 1 0", "free = 4 0 2 0")
    with pytest.raises(ValidationError) as info:
        build_covering(parse_text(text))
    assert any("NotAUnit" in f and "[4 0 2 0]" in f for f in info.value.failures)


def test_wrong_embedding_rejected():
    fx = parse_file(bundled_fixture("fixture_a"))
    fx.embedding = [1, 1, 0, 0]
    with pytest.raises(ValidationError):
        build_covering(fx)


def test_unramified_claim_rejected():
    # without 2 in Sigma the ramified prime above 2 in Q(i) is not allowed
    fx = parse_file(bundled_fixture("q_to_qi"))
    fx.sigma.F, fx.sigma.K = [], []
    with pytest.raises(ValidationError):
        build_covering(fx)


def test_validate_exit_codes(tmp_path):
    good = bundled_fixture("fixture_a")
    code, out, err = run_command("validate", good, BuildOptions())
    assert code == 0 and err == ""
    bad = write(tmp_path, fixture_text("fixture_a").replace("relation = 1 0 0 : 1 2 0 1",
                                                             "relation = 1 0 0 : 1 2 0 2"))
    code, out, err = run_command("validate", bad, BuildOptions())
    assert code == 1 and err.startswith("validation failed")
    garbled = write(tmp_path, "format_version = 1\n[field F\n", "g.fix")
    code, out, err = run_command("validate", garbled, BuildOptions())
    assert code == 1 and "line 2" in err


def test_expectation_mismatch_exit_two(tmp_path):
    p = write(tmp_path, fixture_text("fixture_a").replace("kernel = 2", "kernel = 4"))
    code, out, err = run_command("verify-sequence", p, BuildOptions(), "structured")
    assert code == 2 and "expectation kernel" in err
    data = json.loads(out)
    assert data["computation"]["expectations"]["kernel"]["ok"] is False


def test_tiny_precision_ceiling_exit_three():
    code, out, err = run_command("units", bundled_fixture("fixture_b"),
                                 BuildOptions(precision_ceiling=8))
    assert code == 3 and err.startswith("resource ceiling")


# -- commands and reports ------------------------------------------------------------

def test_gaussian_sequence_exit_zero():
    code, out, _ = run_command("verify-sequence", bundled_fixture("q_to_qi"), BuildOptions(),
                               "structured")
    data = json.loads(out)
    assert code == 0
    terms = [data["computation"]["terms"][f"term{i}"]["invariants"] for i in range(1, 6)]
    assert terms == [[2], [2], [], [], [2]]


def test_fixture_a_structured_report():
    code, out, _ = run_command("verify-sequence", bundled_fixture("fixture_a"), BuildOptions(),
                               "structured")
    assert code == 0
    assert b'"kernel_invariants": [2]' in out
    data = json.loads(out)
    terms = [data["computation"]["terms"][f"term{i}"]["invariants"] for i in range(1, 6)]
    assert terms == [[2], [2], [2], [2, 2], [2]]
    assert set(data) >= {"validation", "computation", "provenance"}
    assert data["provenance"]["seed"] == 1


def test_text_and_structured_agree():
    opts = BuildOptions()
    _, text, _ = run_command("verify-sequence", bundled_fixture("fixture_a"), opts, "text")
    _, structured, _ = run_command("verify-sequence", bundled_fixture("fixture_a"), opts,
                                   "structured")
    text = text.decode()
    assert text.splitlines()[0] == "0 → Z/2 → Z/2 → Z/2 → Z/2 x Z/2 → Z/2"
    assert "--snake-->" in text and "--transgression-->" in text
    data = json.loads(structured)
    assert f"  kernel_invariants: {data['computation']['kernel_invariants']}" in text.splitlines()


def test_trivial_rendering():
    _, out, _ = run_command("verify-sequence", bundled_fixture("q_to_cubic7"), BuildOptions())
    assert out.decode().splitlines()[0] == "0 → 0 → 0 → 0 → 0 → 0"


@pytest.mark.parametrize("cmd", ["classgroup", "units", "capitulation", "cohomology"])
def test_other_commands(cmd):
    code, out, _ = run_command(cmd, bundled_fixture("fixture_a"), BuildOptions(), "structured")
    assert code == 0
    comp = json.loads(out)["computation"]
    assert comp["n"] == 2
    if cmd == "capitulation":
        assert comp["kernel_invariants"] == [2] and comp["killed_by_n"]
        assert len(comp["witnesses"]) == 1
    if cmd == "classgroup":
        assert comp["F"]["group"]["invariants"] == [2]


def test_structured_output_deterministic():
    for name in FIXTURES:
        runs = [run_command("verify-sequence", bundled_fixture(name), BuildOptions(seed=5),
                            "structured") for _ in range(2)]
        assert runs[0] == runs[1]


def test_seed_is_recorded():
    _, out, _ = run_command("verify-sequence", bundled_fixture("q_to_qi"), BuildOptions(seed=42),
                            "structured")
    assert json.loads(out)["provenance"]["seed"] == 42


def test_main_requires_batch_for_several(capsys):
    assert main(["validate", "q_to_qi", "fixture_a"]) == 1
    assert "--batch" in capsys.readouterr().err


def test_batch_returns_worst_code(tmp_path, capsys):
    bad = write(tmp_path, fixture_text("fixture_a").replace("kernel = 2", "kernel = 4"))
    assert main(["verify-sequence", "--batch", "q_to_qi", str(bad)]) == 2


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "capkernel.cli", "validate", "q_to_qi"],
                         capture_output=True)
    assert res.returncode == 0
