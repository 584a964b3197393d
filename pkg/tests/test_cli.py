import json
import subprocess

from gad.cli import (
    EXIT_ERROR,
    EXIT_OK,
    EXIT_VERIFICATION_FAILED,
    build_parser,
    main,
)


def synth_args(out, period=40, n=800, noise="0.0", seed="0"):
    return [
        "synth", "--period", str(period), "--n", str(n), "--seed", seed,
        "--noise", noise, "--waveform", "sawtooth", "--out", str(out),
    ]


class TestSynth:
    def test_writes_trace(self, tmp_path):
        out = tmp_path / "t.csv"
        assert main(synth_args(out)) == EXIT_OK
        assert out.exists()
        assert len(out.read_text().splitlines()) == 800

    def test_byte_identical_re_run(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        main(synth_args(a))
        main(synth_args(b))
        assert a.read_bytes() == b.read_bytes()

    def test_invalid_spec_exits_error(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        code = main(synth_args(out, period=40, n=100))
        assert code == EXIT_ERROR
        assert "gad: error:" in capsys.readouterr().err
        assert not out.exists()


class TestRun:
    def run_session(self, tmp_path, name="events.jsonl", n=800):
        trace = tmp_path / "t.csv"
        main(synth_args(trace, n=n))
        events = tmp_path / name
        code = main(["run", "--input", str(trace), "--out", str(events)])
        return code, events

    def test_full_session_events(self, tmp_path):
        code, events = self.run_session(tmp_path)
        assert code == EXIT_OK
        records = [json.loads(line) for line in events.read_text().splitlines()]
        kinds = [r["kind"] for r in records]
        assert kinds[:3] == ["segment_captured", "model_ready",
                             "verification_passed"]
        assert records[0]["detail"]["L"] == 40
        assert records[0]["stream_index"] == 321
        assert records[2]["stream_index"] == 401

    def test_replay_is_byte_identical(self, tmp_path):
        _, a = self.run_session(tmp_path, "a.jsonl")
        _, b = self.run_session(tmp_path, "b.jsonl")
        assert a.read_bytes() == b.read_bytes()

    def test_missing_input_no_partial_output(self, tmp_path, capsys):
        events = tmp_path / "events.jsonl"
        code = main(
            ["run", "--input", str(tmp_path / "absent.csv"),
             "--out", str(events)]
        )
        assert code == EXIT_ERROR
        assert not events.exists()
        assert "gad: error:" in capsys.readouterr().err

    def test_trace_too_short_exits_2(self, tmp_path):
        code, events = self.run_session(tmp_path, n=400)
        assert code == EXIT_VERIFICATION_FAILED
        assert events.exists()  # whatever was observed is still recorded

    def test_uniform_mode_flag(self, tmp_path):
        trace = tmp_path / "t.csv"
        main(synth_args(trace, period=46))
        events = tmp_path / "events.jsonl"
        code = main(
            ["run", "--mode", "uniform", "--input", str(trace),
             "--out", str(events)]
        )
        assert code == EXIT_OK
        first = json.loads(events.read_text().splitlines()[0])
        assert first["detail"]["L"] == 46
        assert first["detail"]["T_end"] == first["detail"]["T_start"] + 46


class TestEval:
    def make_cohort(self, tmp_path, periods=(40, 57, 70)):
        cohort = tmp_path / "cohort"
        cohort.mkdir()
        for p in periods:
            main(synth_args(cohort / f"s{p}.csv", period=p, n=900))
        return cohort

    def test_report_files(self, tmp_path):
        cohort = self.make_cohort(tmp_path)
        out = tmp_path / "report"
        code = main(
            ["eval", "--cohort-dir", str(cohort), "--out", str(out),
             "--max-impostor-samples", "400"]
        )
        assert code == EXIT_OK
        verification = (out / "verification.tsv").read_text().splitlines()
        assert "# passed\t3" in verification
        pairs = (out / "pairs.tsv").read_text().splitlines()
        assert "# pairs\t6" in pairs
        header_rows = [l for l in pairs if not l.startswith("#")]
        assert header_rows[0] == "genuine_id\timpostor_id\tdetected\tlatency"
        assert (out / "latency.tsv").exists()

    def test_single_subject_rejected(self, tmp_path, capsys):
        cohort = tmp_path / "cohort"
        cohort.mkdir()
        main(synth_args(cohort / "only.csv"))
        code = main(
            ["eval", "--cohort-dir", str(cohort), "--out", str(tmp_path / "r")]
        )
        assert code == EXIT_ERROR
        assert "fewer than 2" in capsys.readouterr().err


class TestEnvOverrides:
    def test_env_defaults(self, monkeypatch, tmp_path):
        monkeypatch.setenv("GAD_MODE", "uniform")
        monkeypatch.setenv("GAD_F", "3")
        monkeypatch.setenv("GAD_INPUT", str(tmp_path / "in.csv"))
        monkeypatch.setenv("GAD_OUT", str(tmp_path / "out.jsonl"))
        args = build_parser().parse_args(["run"])
        assert args.mode == "uniform"
        assert args.F == 3
        assert args.input == str(tmp_path / "in.csv")

    def test_flag_beats_env(self, monkeypatch, tmp_path):
        monkeypatch.setenv("GAD_MODE", "uniform")
        args = build_parser().parse_args(
            ["run", "--mode", "personalized", "--input", "i", "--out", "o"]
        )
        assert args.mode == "personalized"


class TestEntryPoint:
    def test_console_script_help(self):
        proc = subprocess.run(
            ["gad", "--help"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        assert "run" in proc.stdout and "synth" in proc.stdout
