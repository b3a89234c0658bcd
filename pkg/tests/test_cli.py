"""Command-line surface: subcommands, exit codes, JSON output."""

import json

import pytest

from lmtk.cli import run_command
from lmtk.minsky import render_machine

from conftest import (
    BRANCHING_MACHINE,
    DUPLICATING,
    ROOT_OVERLAP,
    ROOT_OVERLAP_TRUNCATED,
    TINY_MACHINE,
    UNARY_CHAIN,
)


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


def run(capsys, *argv):
    code = run_command(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCheck:
    def test_pass_exit_zero(self, write, capsys):
        path = write("chain.trs", UNARY_CHAIN)
        code, out, _ = run(capsys, "check", path)
        assert code == 0
        assert "LM-system: PASS (collapse bounded at depth 5)" in out

    def test_fail_exit_one_cites_equation(self, write, capsys):
        path = write("dup.trs", DUPLICATING)
        code, out, _ = run(capsys, "check", path)
        assert code == 1
        assert "f(x,x) = f(x1,x1)" in out

    def test_json_structure(self, write, capsys):
        path = write("chain.trs", UNARY_CHAIN)
        code, out, _ = run(capsys, "check", path, "--json")
        payload = json.loads(out)
        assert payload["verdict"] == "pass"
        names = [c["name"] for c in payload["conditions"]]
        assert names == ["terminating", "confluent", "right-reduced",
                         "almost-left-reduced", "non-subterm-collapsing",
                         "forward-closed", "rhs quasi-deterministic"]
        assert payload["consequences"]

    def test_unknown_exit_two_without_precedence(self, write, capsys):
        # encoded machines have too many symbols for precedence search
        from lmtk.minsky import encode
        from lmtk.trs_format import render_trs
        inst = encode(TINY_MACHINE, 0, 0)
        path = write("enc.trs", render_trs(inst.theory))
        code, out, _ = run(capsys, "check", path)
        assert code == 2

    def test_precedence_flag(self, write, capsys):
        from lmtk.minsky import encode, encoding_precedence
        from lmtk.trs_format import render_trs
        inst = encode(TINY_MACHINE, 0, 0)
        path = write("enc.trs", render_trs(inst.theory))
        code, out, _ = run(capsys, "check", path, "--precedence",
                           ",".join(encoding_precedence(TINY_MACHINE)))
        assert code == 0

    def test_missing_file_exit_three(self, capsys):
        code, _, err = run(capsys, "check", "/nonexistent.trs")
        assert code == 3
        assert "error" in err


class TestNormalize:
    def test_trace_rendering(self, write, capsys):
        # first matching rule in file order wins, so the trace goes via r1
        path = write("full.trs", ROOT_OVERLAP)
        code, out, _ = run(capsys, "normalize", path, "f(b,i(b))")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "[r1] at e: f(b,i(b)) -> g(b)"
        assert lines[1] == "[r2] at e: g(b) -> c"
        assert lines[-1] == "c"

    def test_parse_error_exit_three(self, write, capsys):
        path = write("full.trs", ROOT_OVERLAP)
        code, _, err = run(capsys, "normalize", path, "f(b,")
        assert code == 3


class TestReduce:
    def test_emits_reparsable_system(self, write, capsys):
        from lmtk.trs_format import parse_trs
        path = write("nrr.trs", """
sig: f/1 g/1 a/0 b/0
vars: x
rules:
  f(x) -> g(a)
  g(a) -> b
  f(x) -> b
""")
        code, out, _ = run(capsys, "reduce", path)
        assert code == 0
        reduced = parse_trs("\n".join(
            l for l in out.splitlines() if not l.startswith("#")))
        assert all("g(a)" != str(r.rhs) for r in reduced.rules)

    def test_idempotent_on_own_output(self, write, capsys):
        path = write("full.trs", ROOT_OVERLAP)
        code, out, _ = run(capsys, "reduce", path)
        body = "\n".join(l for l in out.splitlines() if not l.startswith("#"))
        path2 = write("reduced.trs", body)
        code2, out2, _ = run(capsys, "reduce", path2)
        body2 = "\n".join(l for l in out2.splitlines() if not l.startswith("#"))
        assert body == body2


class TestFc:
    def test_truncated_lists_new_rule(self, write, capsys):
        path = write("trunc.trs", ROOT_OVERLAP_TRUNCATED)
        code, out, _ = run(capsys, "fc", path)
        assert code == 0
        assert "f(b,i(b)) -> c" in out
        assert "fixpoint at generation 1" in out

    def test_fc_check_witness(self, write, capsys):
        path = write("trunc.trs", ROOT_OVERLAP_TRUNCATED)
        code, out, _ = run(capsys, "fc-check", path)
        assert code == 1
        assert "f(b,i(b))" in out
        assert "innermost one-step: no" in out

    def test_fc_check_passes_on_closed_system(self, write, capsys):
        path = write("full.trs", ROOT_OVERLAP)
        code, out, _ = run(capsys, "fc-check", path, "--fc-depth", "3")
        assert code == 0
        assert "forward-closed: yes" in out
        assert "innermost one-step: yes" in out


class TestSmallCommands:
    def test_rhs(self, write, capsys):
        path = write("dup.trs", DUPLICATING)
        code, out, _ = run(capsys, "rhs", path)
        assert code == 0
        assert "f(x,x) = f(x1,x1)" in out

    def test_cps(self, write, capsys):
        path = write("full.trs", ROOT_OVERLAP)
        code, out, _ = run(capsys, "cps", path)
        assert code == 0
        assert "g(b)" in out

    def test_nosup(self, write, capsys):
        path = write("nested.trs",
                     "sig: f/1 g/1 a/0 b/0 c/0\nvars: x\nrules:\n"
                     "  f(g(x)) -> a\n  g(b) -> c\n")
        code, out, _ = run(capsys, "nosup", path)
        assert code == 0
        assert "f(g(b))" in out

    def test_collapse_found_exit_one(self, write, capsys):
        path = write("dup.trs", DUPLICATING)
        code, out, _ = run(capsys, "collapse", path)
        assert code == 1
        assert "collapsing" in out

    def test_collapse_none_exit_zero(self, write, capsys):
        path = write("chain.trs", UNARY_CHAIN)
        code, out, _ = run(capsys, "collapse", path)
        assert code == 0


class TestMinskyCommands:
    def test_validate(self, write, capsys):
        path = write("m.mm", render_machine(TINY_MACHINE))
        code, out, _ = run(capsys, "minsky", "validate", path)
        assert code == 0 and "valid" in out

    def test_simulate(self, write, capsys):
        path = write("m.mm", render_machine(BRANCHING_MACHINE))
        code, out, _ = run(capsys, "minsky", "simulate", path, "--k", "1")
        assert code == 0
        assert "(qL, 0, 0) at step 3" in out

    def test_encode_emits_system_and_instance(self, write, capsys):
        path = write("m.mm", render_machine(TINY_MACHINE))
        code, out, _ = run(capsys, "minsky", "encode", path)
        assert code == 0
        assert "# knowledge: c(q0,0,0,0)" in out
        assert "# goal: c(e,0,0,0)" in out

    def test_cap_pipeline(self, write, capsys):
        path = write("m.mm", render_machine(TINY_MACHINE))
        code, out, _ = run(capsys, "minsky", "cap", path, "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["found"]
        assert payload["cap"] == "gp(g(gp(f_qL(f_q1(f_q0(hole1))))))"

    def test_cap_subcommand_on_system_file(self, write, capsys):
        from lmtk.minsky import encode
        from lmtk.trs_format import render_trs
        inst = encode(TINY_MACHINE, 0, 0)
        path = write("enc.trs", render_trs(inst.theory))
        code, out, _ = run(capsys, "cap", path,
                           "--knowledge", "c(q0,0,0,0)",
                           "--goal", "c(e,0,0,0)")
        assert code == 0
        assert "cap:" in out


class TestFuelOverride:
    def test_env_variable_bounds_rewriting(self, write, capsys, monkeypatch):
        loop = "sig: a/0 b/0\nrules:\n  a -> b\n  b -> a\n"
        path = write("loop.trs", loop)
        monkeypatch.setenv("LMTK_FUEL", "5")
        code, _, err = run(capsys, "normalize", path, "a")
        assert code == 2
        assert "fuel exhausted" in err

    def test_flag_overrides(self, write, capsys):
        path = write("full.trs", ROOT_OVERLAP)
        code, out, _ = run(capsys, "normalize", path, "f(b,i(b))",
                           "--fuel", "50")
        assert code == 0


class TestUsage:
    def test_no_command(self, capsys):
        assert run_command([]) == 3

    def test_unknown_command(self, capsys):
        assert run_command(["bogus"]) == 3
