import pytest

from votesim.cli import build_parser, main
from votesim.simnet import ElectionConfig, run_election

# frozen output of the tiny reference sweep (deterministic per seed)
GOLDEN_SWEEP = (
    "n,p_fail,k,min_consistency,t,trials,seeds,accuracy,mode\n"
    "10,0.2,3,2,3,50,2,0.49,symbolic\n"
    "20,0.2,3,2,4,50,2,0.39,symbolic\n"
)
GOLDEN_SWEEP_ARGS = ["sweep", "--n", "10,20", "--p-fail", "0.2", "--k", "3",
                     "--trials", "50", "--seeds", "1,2"]


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analytic_single_point(capsys):
    code, out, err = run_cli(capsys, ["analytic", "--n", "50", "--m", "5", "--t", "25"])
    assert code == 0
    assert abs(float(out.strip()) - 0.025) < 0.001
    assert err.startswith("config ")


def test_analytic_range_emits_csv(capsys):
    code, out, _ = run_cli(capsys, ["analytic", "--n", "50", "--m", "0:5", "--t", "25"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "n,m,t,reliability,reliability_with_replacement"
    assert len(lines) == 7


def test_analytic_domain_error_is_config_error(capsys):
    code, _, err = run_cli(capsys, ["analytic", "--n", "5", "--m", "9", "--t", "2"])
    assert code == 3
    assert "error config" in err


def test_hev_run_fixed_votes(capsys):
    code, out, _ = run_cli(capsys, ["hev-run", "--n", "3", "--votes", "1,0,1", "--seed", "7"])
    assert code == 0
    assert out == "tally 2\n"


def test_hevs_run_honest_decision_matches_true_sum(capsys):
    code, out, _ = run_cli(capsys, ["hevs-run", "--n", "10", "--k", "6",
                                    "--p-fail", "0", "--seed", "1"])
    assert code == 0
    decision = int(out.strip().split("\n")[1].split()[1])
    reference = run_election(ElectionConfig(protocol="hevs", n=10, k=6, seed=1))
    assert decision == reference.true_tally


def test_cli_output_is_byte_identical_across_runs(capsys):
    invocations = [
        ["hevs-run", "--n", "8", "--k", "4", "--p-fail", "0.3", "--seed", "5"],
        ["hev-run", "--n", "4", "--seed", "9"],
        ["analytic", "--n", "50", "--m", "5", "--t", "25"],
        GOLDEN_SWEEP_ARGS,
        ["bsv-run", "--n", "3", "--seed", "2", "--rsa-bits", "256"],
    ]
    for argv in invocations:
        first = run_cli(capsys, argv)
        second = run_cli(capsys, argv)
        assert first == second, argv


def test_sweep_golden_output(capsys):
    code, out, _ = run_cli(capsys, GOLDEN_SWEEP_ARGS)
    assert code == 0
    assert out == GOLDEN_SWEEP


def test_sweep_reads_config_file(tmp_path, capsys):
    config = tmp_path / "sweep.cfg"
    config.write_text(
        "# reference sweep\n"
        "n = 10,20\n"
        "p-fail = 0.2\n"
        "k = 3\n"
        "trials = 50\n"
        "seeds = 1,2\n"
    )
    code, out, _ = run_cli(capsys, ["sweep", "--config", str(config)])
    assert code == 0
    assert out == GOLDEN_SWEEP


def test_flags_override_config_file(tmp_path, capsys):
    config = tmp_path / "sweep.cfg"
    config.write_text("n = 10,20\np-fail = 0.2\nk = 3\ntrials = 50\nseeds = 1,2\n")
    code, out, _ = run_cli(capsys, ["sweep", "--config", str(config), "--n", "10"])
    assert code == 0
    assert out.count("\n") == 2  # header plus a single row
    assert out.startswith("n,p_fail,")
    assert "\n10,0.2,3," in out


def test_bad_config_file_key(tmp_path, capsys):
    config = tmp_path / "sweep.cfg"
    config.write_text("banana = 7\n")
    code, _, err = run_cli(capsys, ["sweep", "--config", str(config)])
    assert code == 3
    assert "banana" in err


def test_malformed_config_line(tmp_path, capsys):
    config = tmp_path / "sweep.cfg"
    config.write_text("just some words\n")
    code, _, err = run_cli(capsys, ["sweep", "--config", str(config)])
    assert code == 3


def test_missing_config_file(capsys):
    code, _, err = run_cli(capsys, ["sweep", "--config", "/nonexistent/file.cfg"])
    assert code == 3
    assert "error io" in err


def test_usage_error_exit_code(capsys):
    assert main(["sweep", "--bogus-flag", "1"]) == 2
    assert main(["not-a-command"]) == 2
    assert main([]) == 2


def test_protocol_failure_exit_code(capsys):
    code, _, err = run_cli(capsys, ["hevs-run", "--n", "4", "--k", "4",
                                    "--p-fail", "1", "--seed", "5"])
    assert code == 4
    assert "no_consistent_result" in err


def test_invalid_election_config_exit_code(capsys):
    code, _, err = run_cli(capsys, ["hev-run", "--n", "0"])
    assert code == 3


def test_help_lists_defaults(capsys):
    for command in ("hev-run", "hevs-run", "bsv-run", "sweep", "analytic"):
        with pytest.raises(SystemExit) as excinfo:
            build_parser().parse_args([command, "--help"])
        assert excinfo.value.code == 0
        text = capsys.readouterr().out
        assert "default" in text
        assert "--seed" in text


def test_out_writes_file_and_keeps_stdout_clean(tmp_path, capsys):
    out_path = tmp_path / "table.csv"
    code, out, _ = run_cli(capsys, GOLDEN_SWEEP_ARGS + ["--out", str(out_path)])
    assert code == 0
    assert out == ""
    assert out_path.read_text() == GOLDEN_SWEEP


def test_transcript_roundtrip_via_files(tmp_path, capsys):
    transcript = tmp_path / "run.transcript"
    code, out_first, _ = run_cli(capsys, ["hevs-run", "--n", "5", "--k", "3", "--seed", "4",
                                          "--p-fail", "0.3", "--transcript-out", str(transcript)])
    assert code == 0
    code, out, _ = run_cli(capsys, ["replay", str(transcript)])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("replay ok records=")
    assert lines[1:] == out_first.strip().split("\n")


def test_replay_detects_corruption(tmp_path, capsys):
    transcript = tmp_path / "run.transcript"
    run_cli(capsys, ["hev-run", "--n", "3", "--seed", "4", "--transcript-out", str(transcript)])
    lines = transcript.read_text().splitlines()
    transcript.write_text("\n".join(lines[:-1]) + "\n")
    code, _, err = run_cli(capsys, ["replay", str(transcript)])
    assert code == 4
    assert "error protocol" in err


def test_bsv_run_ledger_dump(tmp_path, capsys):
    dump = tmp_path / "ledger.txt"
    code, out, _ = run_cli(capsys, ["bsv-run", "--n", "4", "--seed", "2", "--rsa-bits", "256",
                                    "--votes", "a,b,a,a", "--candidates", "a,b",
                                    "--ledger-out", str(dump)])
    assert code == 0
    assert "tally a 3\n" in out and "tally b 1\n" in out
    lines = dump.read_text().splitlines()
    assert len(lines) == 4
    assert all(len(line.split("\t")) == 4 for line in lines)
