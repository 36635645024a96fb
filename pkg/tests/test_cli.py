import json

import pytest

from qirvm.cli import (
    EX_CANTCREAT,
    EX_CONFIG,
    EX_DATAERR,
    EX_NOINPUT,
    EX_OK,
    EX_SOFTWARE,
    EX_USAGE,
    main,
)

from conftest import TELEPORT_LL, make_program


@pytest.fixture
def teleport_file(tmp_path):
    path = tmp_path / "teleport.ll"
    path.write_text(TELEPORT_LL)
    return str(path)


def write(tmp_path, source, name="prog.ll"):
    path = tmp_path / name
    path.write_text(source)
    return str(path)


def test_run_defaults(teleport_file, capsys):
    assert main(["run", teleport_file, "--shots", "32"]) == EX_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["schema"] == "qirvm-result/1"
    assert doc["shots"] == 32
    assert doc["seed"] == 0
    assert doc["backend"] == "statevector"
    assert all(len(k) == 3 for k in doc["histogram"])


def test_default_shots_is_1024(teleport_file, capsys):
    assert main(["run", teleport_file]) == EX_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["shots"] == 1024
    assert sum(doc["histogram"].values()) == 1024


def test_output_file(teleport_file, tmp_path, capsys):
    out = tmp_path / "result.json"
    assert main(["run", teleport_file, "--shots", "8", "--output", str(out)]) == EX_OK
    assert capsys.readouterr().out == ""  # nothing but JSON goes to the target
    assert json.loads(out.read_text())["shots"] == 8


def test_json_determinism_across_invocations(teleport_file, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["run", teleport_file, "--shots", "64", "--seed", "5", "--output", str(a)])
    main(["run", teleport_file, "--shots", "64", "--seed", "5", "--output", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_validate_only(teleport_file, capsys):
    assert main(["run", teleport_file, "--validate-only"]) == EX_OK
    out = capsys.readouterr()
    assert out.out == ""
    assert out.err == ""


def test_usage_errors(teleport_file):
    assert main(["run"]) == EX_USAGE
    assert main(["run", teleport_file, "--wat"]) == EX_USAGE
    assert main(["run", teleport_file, "--shots", "0"]) == EX_USAGE
    assert main([]) == EX_USAGE


def test_missing_file():
    assert main(["run", "/nonexistent/prog.ll"]) == EX_NOINPUT


def test_parse_error_names_construct_and_line(tmp_path, capsys):
    src = make_program("entry:\n  %0 = phi i1 [ true, %entry ]\n  ret void")
    path = write(tmp_path, src)
    assert main(["run", path]) == EX_DATAERR
    err = capsys.readouterr().err
    assert "phi" in err
    assert "line 8" in err


def test_validation_error_exit_code(tmp_path, capsys):
    src = make_program(
        "entry:\n  call void @__quantum__qis__foo__body(%Qubit* null)\n  ret void",
        declarations="declare void @__quantum__qis__foo__body(%Qubit*)",
    )
    path = write(tmp_path, src)
    assert main(["run", path]) == EX_CONFIG
    assert "foo" in capsys.readouterr().err


def test_runtime_fault_exit_code(tmp_path):
    src = make_program(
        "entry:\n"
        "  %0 = call i1 @__quantum__qis__read_result__body(%Result* null)\n"
        "  br i1 %0, label %a, label %a\n"
        "a:\n  ret void",
        declarations="declare i1 @__quantum__qis__read_result__body(%Result*)",
        attrs='"entry_point" "num_required_qubits"="1" "num_required_results"="1"',
    )
    assert main(["run", write(tmp_path, src)]) == EX_SOFTWARE


def test_unknown_backend(teleport_file, capsys):
    assert main(["run", teleport_file, "--backend", "xacc"]) == EX_USAGE
    assert "statevector" in capsys.readouterr().err


def test_unwritable_output(teleport_file):
    code = main(["run", teleport_file, "--shots", "1",
                 "--output", "/nonexistent-dir/out.json"])
    assert code == EX_CANTCREAT


def test_entry_override(tmp_path, capsys):
    src = make_program("entry:\n  ret void", attrs='"other"')
    path = write(tmp_path, src)
    assert main(["run", path]) == EX_CONFIG  # no entry attribute
    capsys.readouterr()
    assert main(["run", path, "--entry", "main", "--shots", "2"]) == EX_OK


def test_per_shot_flag(teleport_file, capsys):
    assert main(["run", teleport_file, "--shots", "4", "--per-shot"]) == EX_OK
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["per_shot"]) == 4


def test_trace_backend_selectable(tmp_path, capsys):
    src = make_program("entry:\n  ret void")
    assert main(["run", write(tmp_path, src), "--shots", "2", "--backend", "trace"]) == EX_OK
    assert json.loads(capsys.readouterr().out)["backend"] == "trace"
