"""Tests for the command-line interface."""

import json

import pytest
from click.testing import CliRunner
from tropsev.cli import main

SEVERI_B_EQUALS_T = """\
# node conditions at 1 and b = t for n = 4
1,1,1,1,1
0,1,2,3,4
1,t,t^2,t^3,t^4
0,1,2*t,3*t^2,4*t^3
"""


class TestClassifyCommand:
    """Test the classify command."""

    def setup_method(self):
        """Set up test fixtures."""
        self.runner = CliRunner()

    def test_member(self):
        """Test that a member exits with status 0."""
        result = self.runner.invoke(main, ["classify", "--w", "2,1,0,0,0,1"])

        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["member"] is True
        assert data["certificates"][0]["type"] == "I"

    def test_non_member(self):
        """Test that a refused weight exits with status 1 and still prints JSON."""
        result = self.runner.invoke(main, ["classify", "--w", "0,1,3,6,10"])

        assert result.exit_code == 1
        assert json.loads(result.output)["member"] is False

    def test_degree_mismatch(self):
        """Test that --n must match the weight length."""
        result = self.runner.invoke(main, ["classify", "--n", "4", "--w", "2,1,0,0,0,1"])

        assert result.exit_code == 2
        assert "expected 5" in result.output

    def test_invalid_weight(self):
        """Test a malformed weight vector."""
        result = self.runner.invoke(main, ["classify", "--w", "2,x,0,0,0"])

        assert result.exit_code == 2
        assert "Invalid rational number" in result.output


class TestWitnessCommands:
    """Test witness construction and verification."""

    def setup_method(self):
        """Set up test fixtures."""
        self.runner = CliRunner()

    def test_witness_then_verify(self, tmp_path):
        """Test that a written witness document verifies."""
        result = self.runner.invoke(main, ["witness", "--w", "2,0,0,1,0,0"])
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["verification"]["passed"] is True
        assert data["witness"]["kind"] == "II"

        document = tmp_path / "witness.json"
        document.write_text(result.output)
        verified = self.runner.invoke(main, ["verify", str(document)])
        assert verified.exit_code == 0
        assert json.loads(verified.output)["verification"]["passed"] is True

    def test_refused_weight(self):
        """Test that a non-member gives a JSON error payload."""
        result = self.runner.invoke(main, ["witness", "--w", "2,0,1,0,2,0"])

        assert result.exit_code == 1
        data = json.loads(result.output)
        assert data["type"] == "NonGenericWeight"

    def test_bad_trunc(self):
        """Test that --trunc must be positive."""
        result = self.runner.invoke(main, ["witness", "--w", "2,1,0,0,0,1", "--trunc", "0"])

        assert result.exit_code == 2

    def test_verify_not_json(self, tmp_path):
        """Test a document that is not JSON."""
        document = tmp_path / "witness.json"
        document.write_text("not json")

        result = self.runner.invoke(main, ["verify", str(document)])

        assert result.exit_code == 2
        assert "not a JSON document" in result.output

    def test_verify_tampered_certificate(self, tmp_path):
        """Test that a certificate index beyond n is a bad document."""
        data = json.loads(self.runner.invoke(main, ["witness", "--w", "2,1,0,0,0,1"]).output)
        data["witness"]["certificate"]["cells"] = [[0, 1, 2], [3, 4, 9]]
        document = tmp_path / "witness.json"
        document.write_text(json.dumps(data))

        result = self.runner.invoke(main, ["verify", str(document)])

        assert result.exit_code == 2
        assert "outside 0..5" in result.output


class TestMinorsCommand:
    """Test the minors command."""

    def test_first_minor(self):
        """Test D_{0,1,2,3}."""
        result = CliRunner().invoke(main, ["minors", "--J", "0,1,2,3"])

        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["poly"] == "x^5-4x^4+6x^3-4x^2+x"
        assert data["degree"] == 5
        assert data["order"] == 1
        assert data["palindromic"] is True
        assert data["exceptional"] == {"base": [0, 1, 2, 3], "s": 1, "r": 0}

    def test_repeated_index(self):
        """Test that repeated indices are rejected."""
        result = CliRunner().invoke(main, ["minors", "--J", "0,1,1,2"])

        assert result.exit_code == 2


class TestConesCommand:
    """Test the cones command."""

    def setup_method(self):
        """Set up test fixtures."""
        self.runner = CliRunner()

    def test_json(self):
        """Test the cone list with sampled interior points."""
        result = self.runner.invoke(main, ["cones", "--n", "4", "--sample", "--seed", "3"])

        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["count"] == 3
        assert all(len(cone["sample"]) == 5 for cone in data["cones"])

    def test_table(self):
        """Test the table view."""
        result = self.runner.invoke(main, ["cones", "--n", "4", "--format", "table"])

        assert result.exit_code == 0
        assert "III" in result.output
        assert "{0,2,4}" in result.output

    def test_budget(self):
        """Test that an unsupported degree gives a JSON error payload."""
        result = self.runner.invoke(main, ["cones", "--n", "13"])

        assert result.exit_code == 1
        assert json.loads(result.output)["type"] == "BudgetExceeded"


class TestTropKernelCommand:
    """Test the tropkernel command."""

    def setup_method(self):
        """Set up test fixtures."""
        self.runner = CliRunner()

    @pytest.fixture
    def matrix_file(self, tmp_path):
        """Write the node-condition matrix for b = t."""
        path = tmp_path / "severi.csv"
        path.write_text(SEVERI_B_EQUALS_T)
        return path

    def test_member(self, matrix_file):
        """Test the valuation vector of (x - 1)^2 (x - t)^2."""
        result = self.runner.invoke(main, ["tropkernel", str(matrix_file), "--w", "2,1,0,0,0"])

        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["member"] is True
        assert data["circuits_agree"] is True

    def test_non_member(self, matrix_file):
        """Test that the zero weight is refused with a violating set."""
        result = self.runner.invoke(
            main, ["tropkernel", str(matrix_file), "--w", "0,0,0,0,0", "--threads", "2"]
        )

        assert result.exit_code == 1
        data = json.loads(result.output)
        assert data["member"] is False
        assert len(data["violating_J"]) == 3

    def test_missing_file(self, tmp_path):
        """Test a matrix file that does not exist."""
        result = self.runner.invoke(
            main, ["tropkernel", str(tmp_path / "missing.csv"), "--w", "0,0,0,0,0"]
        )

        assert result.exit_code == 2


class TestDiagramCommand:
    """Test the diagram command."""

    def test_default_name_numbered(self):
        """Test that the default file name is numbered when taken."""
        runner = CliRunner()
        with runner.isolated_filesystem():
            first = runner.invoke(main, ["diagram", "--w", "2,1,0,0,0,1"])
            second = runner.invoke(main, ["diagram", "--w", "2,1,0,0,0,1"])

            assert first.exit_code == 0
            assert "newton_diagram.svg" in first.output
            assert "newton_diagram_1.svg" in second.output

    def test_explicit_output(self, tmp_path):
        """Test writing to a chosen path."""
        target = tmp_path / "tie.svg"
        result = CliRunner().invoke(main, ["diagram", "--w", "2,0,1,0,1,0", "-o", str(target)])

        assert result.exit_code == 0
        assert f"Successfully wrote {target}" in result.output
        assert target.exists()


class TestCrossvalCommand:
    """Test the crossval command."""

    def test_short_run(self):
        """Test a short seeded run."""
        result = CliRunner().invoke(main, ["crossval", "--n", "5", "--samples", "6", "--seed", "1"])

        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["samples"] == 6
        assert data["failures"] == []

    def test_degree_range(self):
        """Test that the degree must lie in 4..10."""
        result = CliRunner().invoke(main, ["crossval", "--n", "11"])

        assert result.exit_code == 2

    def test_max_trunc_from_environment(self):
        """Test that an invalid cap in the environment is rejected."""
        result = CliRunner().invoke(
            main, ["crossval", "--n", "4", "--samples", "1"], env={"TROPSEV_MAX_TRUNC": "zero"}
        )

        assert result.exit_code == 2
