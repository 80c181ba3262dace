from pathlib import Path

import pytest

from superll.cli import run
from superll.generate import random_proof
from superll.native import native_system, read_native
from superll.presets import broken_derivation, make_preset
from superll.proof import check_proof, read_proof, write_proof
from superll.syntax import parse_sequent, sequent_perm_eq

BROKEN_INST = str(Path(__file__).resolve().parent.parent / "instances" / "broken.inst")


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text + "\n")
    return str(path)


def test_verify_axioms_broken_instance(capsys):
    assert run(["verify-axioms", "--instance", BROKEN_INST, "--table", "cut"]) == 1
    out = capsys.readouterr().out
    assert "counterexample: ce2 k=1 e1=e' e=e n=2" in out.splitlines()
    assert "ce2: fail" in out and "verdict: fail" in out


def test_verify_axioms_pass(capsys):
    assert run(["verify-axioms", "--instance", "preset:ll-full", "--table", "all"]) == 0
    assert capsys.readouterr().out.startswith("instance: ll-full\n")


def test_verify_axioms_report_file(tmp_path, capsys):
    out = tmp_path / "r.txt"
    assert run(["verify-axioms", "--instance", "preset:lll", "--table", "girardization", "-o", str(out)]) == 1
    assert out.read_text() == capsys.readouterr().out


def test_check_valid_ell(tmp_path, capsys):
    path = write(tmp_path, "p.sp", write_proof(random_proof(make_preset("ell"), 3)))
    assert run(["check", "--instance", "preset:ell", path]) == 0
    out = capsys.readouterr().out
    assert "result: valid" in out and "cut-free: yes" in out


def test_cut_elim_then_check(tmp_path, capsys):
    inst = make_preset("ll-full")
    p = random_proof(inst, 11, with_cut=True)
    assert not p.cut_free
    src = write(tmp_path, "pi.sp", write_proof(p))
    dst = str(tmp_path / "out.sp")
    assert run(["cut-elim", "--instance", "preset:ll-full", src, "-o", dst]) == 0
    report = capsys.readouterr().out
    assert "cut-free: yes" in report and f"output: {dst}" in report
    assert run(["check", "--instance", "preset:ll-full", dst]) == 0
    assert "cut-free: yes" in capsys.readouterr().out
    q = read_proof(Path(dst).read_text())
    assert q.cut_free and check_proof(inst, q).ok and sequent_perm_eq(q.conclusion, p.conclusion)


def test_proof_to_stdout_report_to_stderr(tmp_path, capsys):
    src = write(tmp_path, "p.sp", write_proof(random_proof(make_preset("ll-full"), 5, with_cut=True)))
    assert run(["cut-elim", "--instance", "preset:ll-full", src]) == 0
    cap = capsys.readouterr()
    assert read_proof(cap.out).cut_free
    assert cap.err.startswith("transform: cut-elim\n")


def test_cut_elim_refused_on_broken(tmp_path, capsys):
    src = write(tmp_path, "b.sp", write_proof(broken_derivation()))
    assert run(["check", "--instance", BROKEN_INST, src]) == 0
    capsys.readouterr()
    assert run(["cut-elim", "--instance", BROKEN_INST, src]) == 1
    assert "cut axioms fail" in capsys.readouterr().err


def test_invalid_proof_reports_node_path(tmp_path, capsys):
    src = write(tmp_path, "bad.sp", '(tensor 0 0 (ax "X") (de b 0 (ax "X")))')
    assert run(["check", "--instance", "preset:ell", src]) == 1
    assert capsys.readouterr().err == f"failure: {src}:root.1: (de) side condition de(b) fails\n"


def test_strict_mode(tmp_path, capsys):
    src = write(tmp_path, "p.sp", '(ax "X" :concl "|- X^, X")')
    assert run(["check", "--instance", "preset:ll-full", src]) == 0
    assert run(["check", "--strict", "--instance", "preset:ll-full", src]) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["frob"],
        ["check", "missing.sp"],
        ["check", "--instance", "preset:nope", "x.sp"],
        ["check", "--instance", "preset:ell", "/nonexistent/p.sp"],
        ["search", "--instance", "preset:ell", "--goal", "|- X ^^"],
        ["search", "--instance", "preset:ell", "--goal", "|- 1", "--depth", "0"],
        ["verify-axioms", "--instance", "preset:ell", "--bounds", "6"],
        ["translate", "encode", "nope", "x.sp"],
    ],
)
def test_usage_errors(argv, capsys):
    assert run(argv) == 2


def test_unparsable_proof_is_usage_error(tmp_path, capsys):
    src = write(tmp_path, "bad.sp", '(cut "X" 0 0 (ax "X") (ax "X"))')
    assert run(["check", "--instance", "preset:ll-full", src]) == 2
    assert capsys.readouterr().err.startswith(f"error: {src}: root (cut)")


def test_search_exit_codes(capsys):
    assert run(["search", "--instance", "preset:ell", "--goal", "|- X^ | X"]) == 0
    cap = capsys.readouterr()
    assert "result: found" in cap.err and read_proof(cap.out).cut_free
    argv = ["search", "--instance", BROKEN_INST, "--goal", "|- !e' X^, ?e (X * X), ?e X^", "--depth", "12"]
    assert run(argv + ["--nodes", "100000"]) == 1
    assert "result: not-provable-within-budget" in capsys.readouterr().out
    assert run(argv + ["--nodes", "3"]) == 1
    assert "result: exhausted" in capsys.readouterr().out


@pytest.mark.parametrize("cmd, preset", [("girardize", "sell"), ("desubsume", "lll"), ("expand", "ell"), ("forget", "sll")])
def test_transform_commands(cmd, preset, tmp_path, capsys):
    inst = make_preset(preset)
    p = random_proof(inst, 2)
    src = write(tmp_path, "p.sp", write_proof(p))
    dst = str(tmp_path / "o.sp")
    assert run([cmd, "--instance", f"preset:{preset}", src, "-o", dst]) == 0
    assert f"transform: {cmd}" in capsys.readouterr().out
    q = read_proof(Path(dst).read_text())
    target = make_preset("ll-full") if cmd == "forget" else inst
    assert check_proof(target, q).ok


def test_translate_round_trip(tmp_path, capsys):
    system = native_system("sll")
    inst = system.instance()
    p = random_proof(inst, 8)
    src = write(tmp_path, "p.sp", write_proof(p))
    nat = str(tmp_path / "n.sp")
    back = str(tmp_path / "b.sp")
    assert run(["translate", "decode", "sll", src, "-o", nat, "--instance", "preset:sll"]) == 0
    assert run(["translate", "encode", "sll", nat, "-o", back]) == 0
    out = capsys.readouterr().out
    assert "translate: encode" in out and "system: sll" in out
    n = read_native(Path(nat).read_text())
    e = read_proof(Path(back).read_text())
    assert check_proof(inst, e).ok and e.cut_free == n.cut_free == p.cut_free


def test_export_latex(tmp_path, capsys):
    src = write(tmp_path, "p.sp", write_proof(broken_derivation()))
    assert run(["export-latex", "--instance", BROKEN_INST, src]) == 0
    tex = capsys.readouterr().out
    assert "\\begin{prooftree}" in tex and "\\BinaryInfC" in tex


def test_measure_flag(tmp_path, capsys):
    src = write(tmp_path, "p.sp", '(ex [1 0] (ax "X"))')
    run(["check", "--instance", "preset:ll-full", src, "--measure", "raw"])
    raw = capsys.readouterr().out
    run(["check", "--instance", "preset:ll-full", src])
    free = capsys.readouterr().out
    assert "size: 2" in raw and "size: 1" in free


def test_deterministic_output(tmp_path, capsys):
    src = write(tmp_path, "p.sp", write_proof(random_proof(make_preset("sell"), 21, with_cut=True)))
    outs = []
    for _ in range(2):
        assert run(["cut-elim", "--instance", "preset:sell", src]) == 0
        cap = capsys.readouterr()
        outs.append((cap.out, cap.err))
    assert outs[0] == outs[1]


def test_goal_parses_like_library():
    assert parse_sequent("|- !e' X^, ?e (X * X), ?e X^") == broken_derivation().conclusion
