from fractions import Fraction

import orjson

from backend.tools.data_tools import tool_import_graph_sum
from frontend.main import EXIT_FAILED_CHECK, EXIT_GUARD, EXIT_USAGE, app


def records(stdout):
    return [orjson.loads(line) for line in stdout.splitlines() if line.strip()]


# g x^2 y / 2 with unit propagators; strict, so only declared vertices may appear.
TWO_SPECIES = """
name = "xxy"
variables = ["g"]
strict = true

[propagators]
"1" = "1"
"2" = "1"

[[couplings]]
legs = [1, 1, 2]
value = "g"
"""


class TestEnum:
    def test_json(self, runner):
        result = runner.invoke(app, ["enum", "--loops", "1", "--vertices", "2"])
        assert result.exit_code == 0, result.output
        lines = records(result.stdout)
        assert lines[-1] == {"summary": {"terms": 2, "total_weight": "3/4"}}
        assert sorted(line["weight"] for line in lines[:-1]) == ["1/2", "1/4"]
        assert all(line["symmetry_factor"] * Fraction(line["weight"]) == 1 for line in lines[:-1])

    def test_ordered(self, runner):
        result = runner.invoke(app, ["enum", "--loops", "1", "--vertices", "2", "--ordered"])
        lines = records(result.stdout)
        assert lines[-1]["summary"]["terms"] == 3
        assert "symmetry_factor" not in lines[0]

    def test_table(self, runner):
        result = runner.invoke(app, ["enum", "--loops", "0", "--vertices", "2", "--legs", "1", "--format", "table"])
        assert result.exit_code == 0
        assert "v=2 E[1-2] L[1:x1]" in result.stdout

    def test_dot(self, runner):
        result = runner.invoke(app, ["enum", "--loops", "0", "--vertices", "1", "--legs", "2", "--format", "dot"])
        assert result.stdout.startswith("graph G1 {")

    def test_output_is_deterministic(self, runner):
        args = ["enum", "--loops", "2", "--vertices", "2", "--legs", "1"]
        assert runner.invoke(app, args).stdout == runner.invoke(app, args).stdout

    def test_workers_flag(self, runner):
        args = ["enum", "--loops", "1", "--vertices", "3", "--legs", "1"]
        parallel = runner.invoke(app, ["--workers", "2", *args])
        assert parallel.exit_code == 0, parallel.output
        assert parallel.stdout == runner.invoke(app, args).stdout


class TestEval:
    def test_free_line(self, runner):
        result = runner.invoke(app, ["eval", "--model", "phi3", "--legs", "2", "--max-order", "0"])
        assert result.exit_code == 0, result.output
        assert result.stdout.splitlines() == ["g^0: 1"]

    def test_phi4_vertex(self, runner):
        result = runner.invoke(app, ["eval", "--model", "phi4", "--legs", "4", "--max-order", "1"])
        assert result.stdout.splitlines() == ["g^1: 1"]

    def test_methods_agree(self, runner):
        outputs = {
            method: runner.invoke(
                app, ["eval", "--model", "phi3", "--legs", "2", "--max-order", "2", "--method", method]
            ).stdout
            for method in ("graphs", "recursion", "oracle")
        }
        assert outputs["graphs"].splitlines() == ["g^0: 1", "g^2: 1"]
        assert outputs["graphs"] == outputs["recursion"] == outputs["oracle"]

    def test_drop_one_point(self, runner):
        result = runner.invoke(
            app, ["eval", "--model", "phi3", "--legs", "2", "--max-order", "2", "--one-point", "drop"]
        )
        assert result.stdout.splitlines() == ["g^0: 1", "g^2: 1/2"]

    def test_per_loop(self, runner):
        result = runner.invoke(app, ["eval", "--model", "phi3", "--legs", "2", "--max-order", "2", "--per-loop"])
        assert result.exit_code == 0
        assert "g^2: 1" in result.stdout

    def test_per_loop_with_oracle(self, runner):
        result = runner.invoke(
            app, ["eval", "--model", "phi3", "--legs", "2", "--max-order", "2", "--per-loop", "--method", "oracle"]
        )
        assert result.exit_code == EXIT_USAGE

    def test_two_species_model(self, runner, tmp_path):
        path = tmp_path / "xxy.toml"
        path.write_text(TWO_SPECIES)
        result = runner.invoke(app, ["eval", "--model", str(path), "--legs", "2", "--max-order", "2"])
        assert result.exit_code == 0, result.output
        # mixed-species bubble (weight 1) plus the species-1 tadpole (weight 1/2)
        assert result.stdout.splitlines() == ["g^0: 1", "g^2: 3/2"]

    def test_missing_model(self, runner, tmp_path):
        result = runner.invoke(app, ["eval", "--model", str(tmp_path / "none.toml"), "--legs", "2", "--max-order", "1"])
        assert result.exit_code == EXIT_USAGE
        assert "model file not found" in result.stderr


class TestCheck:
    def test_passing_suite(self, runner):
        result = runner.invoke(app, ["check", "--suite", "weights", "--max-edges", "2"])
        assert result.exit_code == 0, result.output
        assert orjson.loads(result.stdout)["ok"] is True

    def test_completeness_with_legs(self, runner):
        result = runner.invoke(app, ["check", "--suite", "completeness", "--max-edges", "2", "--max-legs", "1"])
        assert result.exit_code == 0

    def test_failing_suite_exits_one(self, runner, monkeypatch):
        monkeypatch.setattr("backend.checks.symmetry_factor", lambda g: 1)
        result = runner.invoke(app, ["check", "--suite", "weights", "--max-edges", "1"])
        assert result.exit_code == EXIT_FAILED_CHECK
        assert orjson.loads(result.stdout)["counterexample"]["problem"] == "weight"


class TestTrees:
    def test_weights_are_one(self, runner):
        result = runner.invoke(app, ["trees", "--vertices", "2", "--legs", "4", "--format", "json"])
        assert result.exit_code == 0
        lines = records(result.stdout)
        assert lines[-1]["summary"] == {"terms": 7, "total_weight": "7"}

    def test_modified(self, runner):
        result = runner.invoke(app, ["trees", "--vertices", "2", "--legs", "4", "--modified", "--format", "json"])
        assert records(result.stdout)[-1]["summary"]["terms"] == 3


class TestExport:
    def test_json_round_trip(self, runner, tmp_path, gen):
        out = tmp_path / "sum.json"
        result = runner.invoke(
            app, ["export", "--loops", "1", "--vertices", "2", "--legs", "2", "--output", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert orjson.loads(result.stdout)["ok"] is True
        assert tool_import_graph_sum(str(out)) == gen.enumerate_connected(1, 2, [1, 2])

    def test_dot(self, runner, tmp_path):
        out = tmp_path / "sum.dot"
        runner.invoke(app, ["export", "--loops", "0", "--vertices", "2", "--format", "dot", "--output", str(out)])
        assert out.read_text().startswith("graph G1 {")


class TestGuardsAndSettings:
    def test_edge_cap_from_environment(self, runner):
        result = runner.invoke(app, ["enum", "--loops", "2", "--vertices", "1"], env={"OMEGA_MAX_EDGES": "1"})
        assert result.exit_code == EXIT_GUARD
        assert "edge cap" in result.stderr

    def test_edge_cap_from_config_file(self, runner, tmp_path):
        config = tmp_path / "omega.toml"
        config.write_text("max_edges = 1\n")
        result = runner.invoke(app, ["--config", str(config), "enum", "--loops", "1", "--vertices", "2"])
        assert result.exit_code == EXIT_GUARD

    def test_bad_log_level(self, runner):
        result = runner.invoke(app, ["--log-level", "LOUD", "enum", "--loops", "0", "--vertices", "1"])
        assert result.exit_code == EXIT_USAGE

    def test_lowercase_log_level(self, runner):
        result = runner.invoke(app, ["--log-level", "debug", "enum", "--loops", "0", "--vertices", "1"])
        assert result.exit_code == 0

    def test_vertex_count_below_one(self, runner):
        result = runner.invoke(app, ["enum", "--loops", "0", "--vertices", "0"])
        assert result.exit_code == EXIT_USAGE
