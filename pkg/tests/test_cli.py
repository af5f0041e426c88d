import math

import pytest

from cli.entropy_cli import build_parser, run


@pytest.fixture
def h_file(data_dir, two_shift):
    path = data_dir / "h.mat"
    path.write_text(two_shift.to_text())
    return path


def test_sft_entropy_of_two_shift(h_file, capsys):
    assert run(["sft-entropy", str(h_file)]) == 0
    out = capsys.readouterr().out
    assert "order 2" in out
    assert f"entropy {math.log(2):.12g}" in out


def test_identity_has_zero_entropy(data_dir, capsys):
    path = data_dir / "id.mat"
    path.write_text("1\n1\n")
    assert run(["sft-entropy", str(path)]) == 0
    line = next(l for l in capsys.readouterr().out.splitlines() if l.startswith("entropy "))
    assert abs(float(line.split()[1])) < 1e-12


def test_extend_then_measure(h_file, data_dir, capsys):
    extended = data_dir / "a_mu.mat"
    assert run(["extend", "--H", str(h_file), "--n1", "2", "--n2", "2", "--out", str(extended)]) == 0
    assert "0 structure violations" in capsys.readouterr().out
    assert run(["sft-entropy", str(extended)]) == 0
    line = next(l for l in capsys.readouterr().out.splitlines() if l.startswith("entropy "))
    assert float(line.split()[1]) > math.log(2)


def test_snake_bound(capsys):
    assert run(["snake", "--lambda", "3", "--tau", "1", "--eps", "0"]) == 0
    assert capsys.readouterr().out.strip() == "1.09861228867"


def test_verdict(capsys):
    assert run(["verdict", "--pieces", "0.6931471805599453,1.0986122886681098", "--index", "1"]) == 0
    assert capsys.readouterr().out.strip() == "VARIES"


def test_chain_writes_csv(h_file, data_dir, capsys):
    out = data_dir / "chain.csv"
    assert run(["chain", "--H", str(h_file), "--n1", "1", "--n2", "2", "--out", str(out)]) == 0
    assert "entropy increases: True" in capsys.readouterr().out
    assert out.read_text().splitlines()[0] == "step,radius,strict"


def test_orbit_is_reproducible(data_dir):
    first, second = data_dir / "a.csv", data_dir / "b.csv"
    assert run(["orbit", "--n", "5", "--seed", "7", "--out", str(first)]) == 0
    assert run(["orbit", "--n", "5", "--seed", "7", "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text().splitlines()[0] == "step,x,y"


def test_orbit_point_dimension(capsys):
    assert run(["orbit", "--family", "ball3", "--point", "0.1,0.5"]) == 2


def test_sweep_gap_writes_report(h_file, data_dir, capsys):
    out = data_dir / "gap.csv"
    assert run(["sweep-gap", "--H", str(h_file), "--diagonal", "--out", str(out)]) == 0
    assert "sweep-gap: 3 rows" in capsys.readouterr().out
    assert len(out.read_text().splitlines()) == 4
    assert out.with_suffix(".meta").is_file()


class TestExitCodes:
    def test_missing_matrix_file(self, data_dir):
        assert run(["sft-entropy", str(data_dir / "missing.mat")]) == 2

    def test_invalid_spec(self, h_file):
        assert run(["extend", "--H", str(h_file), "--n1", "0", "--n2", "1"]) == 4

    def test_sweep_without_matrix(self):
        assert run(["sweep-gap"]) == 2

    def test_not_a_saddle(self):
        assert run(["snake", "--lambda", "0.5"]) == 9

    def test_grid_too_coarse(self):
        assert run(["estimate", "--resolution", "1", "--n", "4", "--epsilon", "0.01"]) == 7

    def test_reducible_base_is_an_invalid_spec(self, data_dir):
        path = data_dir / "reducible.mat"
        path.write_text("2\n1 1\n0 1\n")
        assert run(["chain", "--H", str(path), "--n1", "1", "--n2", "1"]) == 4

    def test_unknown_config_key(self, data_dir):
        path = data_dir / "bad.env"
        path.write_text("lambda_p=3\nsharpness=2\n")
        assert run(["snake", "--config", str(path)]) == 2


class TestConfigFile:
    def test_file_sets_values(self, data_dir, capsys):
        path = data_dir / "snake.env"
        path.write_text("lambda_p=4\ntau=2\n")
        assert run(["snake", "--config", str(path)]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(math.log(4) / 2)

    def test_flags_override_file(self, data_dir, capsys):
        path = data_dir / "snake.env"
        path.write_text("lambda_p=4\ntau=2\n")
        assert run(["snake", "--config", str(path), "--tau", "1"]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(math.log(4))

    def test_boolean_flag_from_file(self, h_file, data_dir, capsys):
        path = data_dir / "gap.env"
        path.write_text(f"H={h_file}\ndiagonal=true\nn1_values=1,2\nn2_values=1,2\n")
        assert run(["sweep-gap", "--config", str(path)]) == 0
        assert "sweep-gap: 2 rows" in capsys.readouterr().out


    def test_relative_paths_resolve_next_to_the_file(self, two_shift, tmp_path, monkeypatch, capsys):
        scenario = tmp_path / "scenarios"
        scenario.mkdir()
        (scenario / "h.mat").write_text(two_shift.to_text())
        (scenario / "gap.env").write_text("H=h.mat\nout=gap.csv\ndiagonal=true\n")
        elsewhere = tmp_path / "elsewhere"
        elsewhere.mkdir()
        monkeypatch.chdir(elsewhere)
        assert run(["sweep-gap", "--config", str(scenario / "gap.env")]) == 0
        assert (scenario / "gap.csv").is_file()
        assert not (elsewhere / "gap.csv").exists()

    def test_absolute_paths_are_kept(self, h_file, data_dir, tmp_path, monkeypatch):
        scenario = tmp_path / "scenarios"
        scenario.mkdir()
        out = data_dir / "gap.csv"
        (scenario / "gap.env").write_text(f"H={h_file}\nout={out}\n")
        assert run(["sweep-gap", "--config", str(scenario / "gap.env")]) == 0
        assert out.is_file()


class TestHelp:
    @pytest.mark.parametrize("command", sorted(build_parser().subcommands))
    def test_every_option_shows_its_default(self, command, capsys):
        subparser = build_parser().subcommands[command]
        with pytest.raises(SystemExit) as exit_info:
            run([command, "--help"])
        assert exit_info.value.code == 0
        text = capsys.readouterr().out
        for action in subparser._actions:
            for flag in action.option_strings:
                assert flag in text
            if action.option_strings and action.help and action.default is not None and action.dest != "help":
                assert "(default:" in text

    def test_snake_defaults(self, capsys):
        with pytest.raises(SystemExit):
            run(["snake", "--help"])
        text = capsys.readouterr().out
        assert "(default: 3.0)" in text
        assert "(default: 1)" in text
