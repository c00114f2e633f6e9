import json

import pytest

from cli import cli, run_command
from cutpoint.config.settings import get_settings
from cutpoint.models.schemas import Report

RABIN = ["--spec", "pfa rabin"]


def json_leaves(value):
    if isinstance(value, dict):
        for item in value.values():
            yield from json_leaves(item)
    elif isinstance(value, list):
        for item in value:
            yield from json_leaves(item)
    else:
        yield value


@pytest.mark.integration
class TestProbCommands:
    def test_prob(self, runner):
        result = runner.invoke(cli, ["prob", *RABIN, "--word", "110"])
        assert result.exit_code == 0
        assert "command: prob" in result.output
        assert "input.word: 110" in result.output
        assert "probability: 3/8" in result.output

    def test_prob_from_spec_file(self, runner, tmp_path):
        spec_file = tmp_path / "rabin.spec"
        spec_file.write_text("pfa custom symbols=01 initial=1 accept=2\n2\n1 1/2\n0 1/2\n1/2 0\n1/2 1\n")
        result = runner.invoke(cli, ["prob", "--spec-file", str(spec_file), "--word", "011"])
        assert result.exit_code == 0
        assert "probability: 3/4" in result.output

    def test_member(self, runner):
        result = runner.invoke(cli, ["member", *RABIN, "--cutpoint", "1/2", "--word", "11"])
        assert result.exit_code == 0
        assert "member: true" in result.output
        assert "verdicts: true" in result.output

    def test_member_tie_exits_with_certification_failure(self, runner):
        result = runner.invoke(cli, ["member", *RABIN, "--cutpoint", "1/2", "--word", "1"])
        assert result.exit_code == 1
        assert "Error: probability equals cutpoint" in result.output

    def test_table(self, runner):
        result = runner.invoke(cli, ["table", *RABIN, "--max-length", "2", "--cutpoint", "5/8"])
        assert result.exit_code == 0
        assert "probability.(empty): 0" in result.output
        assert "probability.11: 3/4" in result.output
        assert "members: 11" in result.output

    def test_json_format(self, runner):
        result = runner.invoke(cli, ["--format", "json", "prob", *RABIN, "--word", "110"])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["command"] == "prob"
        assert report["outputs"]["probability"] == "3/8"
        assert report["inputs"]["word"] == "110"

    def test_output_is_deterministic(self, runner):
        args = ["separate", "pfa-cutpoints", "--lambda1", "5/8", "--lambda2", "3/4"]
        first = runner.invoke(cli, args)
        second = runner.invoke(cli, args)
        assert first.exit_code == 0
        assert first.output == second.output

    def test_json_reports_replay_without_timing(self, runner):
        args = ["--format", "json", "separate", "pfa-cutpoints", "--lambda1", "5/8", "--lambda2", "3/4"]
        first = Report.model_validate(json.loads(runner.invoke(cli, args).output))
        second = Report.model_validate(json.loads(runner.invoke(cli, args).output))
        assert first.timing_seconds is not None
        assert first.replayable() == second.replayable()
        assert "timing_seconds" not in first.replayable()

    @pytest.mark.parametrize(
        "args",
        [
            ["verify", "--quick", "--claim", "rabin-identity"],
            ["separate", "qfa", "--alpha", "sqrt(2)/8", "--beta", "sqrt(3)/8"],
            ["table", *RABIN, "--max-length", "2", "--cutpoint", "5/8"],
        ],
    )
    def test_json_numbers_are_strings(self, runner, args):
        result = runner.invoke(cli, ["--format", "json", *args])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert isinstance(report["timing_seconds"], str)
        for leaf in json_leaves(report):
            assert leaf is None or isinstance(leaf, (str, bool)), leaf


@pytest.mark.integration
class TestOracleCommands:
    def test_bin_reverse(self, runner):
        result = runner.invoke(cli, ["oracle", "bin-reverse", "--word", "110"])
        assert "value: 3/8" in result.output

    def test_cos2(self, runner):
        result = runner.invoke(cli, ["oracle", "cos2", "--alpha", "fixed", "--j", "2"])
        assert result.exit_code == 0
        assert "value: 49/625" in result.output

    def test_cos2_symbolic_prints_an_enclosure(self, runner):
        result = runner.invoke(cli, ["--precision-bits", "64", "oracle", "cos2", "--alpha", "sqrt(2)/8", "--j", "1"])
        assert result.exit_code == 0
        assert "]@64" in result.output

    def test_eigenform(self, runner):
        result = runner.invoke(cli, ["oracle", "eigenform", "--x", "1/4", "--m", "2"])
        assert result.exit_code == 0
        assert "eigen_form: 1" in result.output
        assert "lambda: 4/7" in result.output

    def test_primed_range(self, runner):
        result = runner.invoke(cli, ["oracle", "primed", "--x", "1/10", "--m", "1"])
        assert result.exit_code == 2
        assert "Error: x out of range" in result.output


@pytest.mark.integration
class TestSeparateCommands:
    def test_pfa_cutpoints(self, runner):
        result = runner.invoke(cli, ["separate", "pfa-cutpoints", "--lambda1", "5/8", "--lambda2", "3/4"])
        assert result.exit_code == 0
        assert "certificate.0.word: 1101" in result.output
        assert "verdicts: true, false" in result.output

    def test_pfa_binary(self, runner):
        result = runner.invoke(cli, ["separate", "pfa-binary", "--lambda", "1/4", "--alpha1", "1/3", "--alpha2", "2/3"])
        assert result.exit_code == 0
        assert "certificate.0.word: 1" in result.output

    def test_qfa(self, runner):
        result = runner.invoke(cli, ["separate", "qfa", "--alpha", "sqrt(2)/8", "--beta", "sqrt(3)/8"])
        assert result.exit_code == 0
        assert "certificate.0.unary_length: 2" in result.output
        assert "certificate.0.quadrant.j: 4" in result.output

    def test_qfa_density(self, runner):
        result = runner.invoke(cli, ["separate", "qfa-density", "--alpha", "fixed", "--lambda1", "1/4", "--lambda2", "1/2"])
        assert result.exit_code == 0
        assert "j: 1" in result.output
        assert "probability: 9/25" in result.output

    def test_pfa_unary(self, runner):
        result = runner.invoke(cli, ["separate", "pfa-unary", "--x1", "1/4", "--x2", "1/2"])
        assert result.exit_code == 0
        assert "certificate.0.unary_length:" in result.output
        assert "certificate.0.bracket_m:" in result.output


@pytest.mark.integration
class TestVerifyCommand:
    def test_single_claim(self, runner):
        result = runner.invoke(cli, ["verify", "--quick", "--claim", "rabin-identity"])
        assert result.exit_code == 0
        assert "claim rabin-identity: PASS (511 checked)" in result.output

    def test_unknown_claim(self, runner):
        result = runner.invoke(cli, ["verify", "--claim", "nonsense"])
        assert result.exit_code == 2


@pytest.mark.integration
class TestUsageErrors:
    def test_missing_spec(self, runner):
        result = runner.invoke(cli, ["prob", "--word", "1"])
        assert result.exit_code == 2
        assert "give exactly one of --spec and --spec-file" in result.output

    def test_spec_syntax_error(self, runner):
        result = runner.invoke(cli, ["prob", "--spec", "pfa foo"])
        assert result.exit_code == 2
        assert "Error: spec 1:5: unknown family 'foo'" in result.output

    def test_word_outside_alphabet(self, runner):
        result = runner.invoke(cli, ["prob", *RABIN, "--word", "012"])
        assert result.exit_code == 2

    def test_missing_required_option(self, runner):
        result = runner.invoke(cli, ["oracle", "bin-reverse"])
        assert result.exit_code == 2

    def test_invalid_global_option(self, runner):
        result = runner.invoke(cli, ["--max-bits", "8", "prob", *RABIN])
        assert result.exit_code == 2
        assert "Error: invalid option value" in result.output

    def test_global_options_reach_settings(self, runner):
        result = runner.invoke(cli, ["--max-bits", "512", "--scan-cap", "99", "prob", *RABIN])
        assert result.exit_code == 0
        assert get_settings().MAX_BITS == 512
        assert get_settings().SCAN_CAP == 99


@pytest.mark.integration
class TestRunCommand:
    def test_success(self, capsys):
        assert run_command(["oracle", "bin-reverse", "--word", "110"]) == 0
        assert "value: 3/8" in capsys.readouterr().out

    def test_certification_failure(self, capsys):
        assert run_command(["member", *RABIN, "--cutpoint", "1/2", "--word", "1"]) == 1
        assert "probability equals cutpoint" in capsys.readouterr().out

    def test_usage_errors(self, capsys):
        assert run_command(["prob"]) == 2
        assert run_command(["no-such-command"]) == 2
        assert "Error:" in capsys.readouterr().out
