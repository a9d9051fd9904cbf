import pytest

from tandem_polling import InvalidConfig, InvalidParams, parse_config
from tandem_polling.cli import main
from tandem_polling.config import format_config, parse_n_list
from tandem_polling.tables import read_csv

BASE = """\
# downstream bottleneck
lambda1 = 1
lambda2 = 1
mu11 = 4      # station 1
mu21 = 4
mu12 = 2.5
mu22 = 2.5
mus1 = 5
mus2 = 5
"""


@pytest.fixture
def config_file(tmp_path):
    def write(extra="n_list = 3, 6\nstrategy = sp\n", base=BASE):
        path = tmp_path / "exp.cfg"
        path.write_text(base + extra)
        return str(path)

    return write


class TestConfig:
    def test_parse(self):
        cfg = parse_config(BASE + "n_list = 3, 4:6\nstrategy = both\nmode = both\nreps = 4\n")
        assert cfg.params.mu12 == 2.5
        assert cfg.buffer_sweep == ((3, 3), (4, 6))
        assert [s.value for s in cfg.strategies] == ["SP", "OP"]
        assert cfg.mode == "both" and cfg.replications == 4

    def test_single_point_from_buffers(self):
        cfg = parse_config(BASE + "n1 = 2\nn2 = 5\n")
        assert cfg.buffer_sweep == ((2, 5),)

    def test_round_trip(self):
        cfg = parse_config(BASE + "n_list = 3, 4:6\nstrategy = op\nseed = 9\n")
        assert parse_config(format_config(cfg)) == cfg

    @pytest.mark.parametrize(
        "extra,field",
        [
            ("n_list = 3\nbogus = 1\n", "bogus"),
            ("n_list = 0\n", "n_list"),
            ("n_list = ,\n", "n_list"),
            ("n_list = 3\nmode = fast\n", "mode"),
            ("n_list = 3\nstrategy = ip\n", "strategy"),
            ("n_list = 3\nreps = x\n", "reps"),
            ("", "n1"),
        ],
    )
    def test_errors_name_field(self, extra, field):
        with pytest.raises(InvalidConfig) as info:
            parse_config(BASE + extra)
        assert info.value.field == field

    def test_negative_rate(self):
        with pytest.raises(InvalidParams) as info:
            parse_config(BASE.replace("mu21 = 4", "mu21 = -4") + "n_list = 3\n")
        assert info.value.field == "mu21"

    def test_missing_rate_and_bad_line(self):
        with pytest.raises(InvalidConfig, match="mus2"):
            parse_config(BASE.replace("mus2 = 5", "") + "n_list = 3\n")
        with pytest.raises(InvalidConfig, match="line"):
            parse_config(BASE + "n_list 3\n")
        with pytest.raises(InvalidConfig, match="duplicate"):
            parse_config(BASE + "n_list = 3\nmu11 = 2\n")

    def test_n_list_pairs(self):
        assert parse_n_list("2:3, 4") == ((2, 3), (4, 4))


class TestCommands:
    def test_solve_table(self, tmp_path):
        out = tmp_path / "t2.csv"
        assert main(["solve", "--table", "2", "--out", str(out)]) == 0
        rows = read_csv(out.read_text())
        assert len(rows) == 10
        assert round(rows[0]["th12"], 2) == 0.70

    def test_solve_strategy_filter(self, tmp_path):
        out = tmp_path / "t.csv"
        assert main(["solve", "--table", "3", "--panel", "bottom", "--strategy", "op", "--out", str(out)]) == 0
        rows = read_csv(out.read_text())
        assert {r["strategy"] for r in rows} == {"OP"} and len(rows) == 5

    def test_negative_rate_exit_2(self, config_file, capsys):
        path = config_file(base=BASE.replace("mu11 = 4", "mu11 = -4"))
        assert main(["solve", "--config", path]) == 2
        assert "mu11" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["solve", "--config", str(tmp_path / "nope.cfg")]) == 2
        assert main(["solve"]) == 2

    def test_argparse_errors_exit_2(self):
        with pytest.raises(SystemExit) as info:
            main(["solve", "--table", "7"])
        assert info.value.code == 2

    def test_solver_failure_exit_3(self, monkeypatch, capsys):
        monkeypatch.setenv("POLLING_MAX_STATES", "50")
        assert main(["solve", "--table", "2"]) == 3
        assert "solver failure" in capsys.readouterr().err

    def test_validate_strict(self, capsys):
        assert main(["validate", "--table", "2", "--strict", "--tol", "0.02"]) == 0
        out = capsys.readouterr().out
        assert "MISMATCH" not in out
        assert main(["validate", "--table", "2", "--panel", "top", "--strict", "--tol", "0.001"]) == 4

    def test_validate_flags_typo(self, capsys):
        assert main(["validate", "--table", "4", "--strict"]) == 0
        captured = capsys.readouterr()
        assert ",typo" in captured.out
        assert "0.40" in captured.err  # header ratio note

    def test_sweep_reports_saturation(self, config_file, tmp_path, capsys):
        path = config_file("n_list = 3, 6, 9, 12, 15\nstrategy = sp\n")
        out = tmp_path / "s.csv"
        assert main(["sweep", "--config", path, "--out", str(out)]) == 0
        assert "saturation: SP product 1" in capsys.readouterr().out
        assert len(read_csv(out.read_text())) == 5

    def test_sweep_single_point(self, config_file, capsys):
        assert main(["sweep", "--config", config_file("n_list = 3\n")]) == 0
        assert "too short" in capsys.readouterr().err

    def test_simulate_and_run(self, config_file, tmp_path):
        path = config_file("n_list = 3\nstrategy = op\nmode = both\nhorizon = 2000\nreps = 3\n")
        out = tmp_path / "sim.csv"
        assert main(["simulate", "--config", path, "--out", str(out), "--seed", "4"]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "strategy,n1,n2,measure,mean,half_width"
        assert main(["run", "--config", path, "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0].endswith("analytic,inside")

    def test_validate_simulation_strict(self, config_file, tmp_path):
        path = config_file("n_list = 3\nstrategy = sp\nhorizon = 20000\nreps = 5\n")
        out = str(tmp_path / "v.csv")
        assert main(["validate", "--config", path, "--out", out, "--strict", "--tol", "0.5"]) == 0

    def test_dump_generator(self, config_file, capsys):
        assert main(["dump-generator", "--config", config_file("n_list = 1\n"), "--strategy", "op"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert all(len(line.split("\t")) == 3 for line in lines)
        assert main(["dump-generator", "--config", config_file("n_list = 1\n"), "--strategy", "both"]) == 2
        assert main(["dump-generator", "--config", config_file("n_list = 1\n"), "--strategy", "sp", "--full"]) == 0
