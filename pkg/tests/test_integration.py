"""
Integration Tests for the roughforge Command Layer

Tests the commands end to end on documents:
- tree enumeration and BCH tables
- lifts from CSV files
- action, solve and BCFP translations on path documents
- error dictionaries
"""

import io
import json
import math

import numpy as np
import pytest

from roughforge.config.settings import RunConfig
from roughforge.core.action import constant_character
from roughforge.core.construct import SampledPath, build_isotropic, forest_algebra
from roughforge.core.dual import DualElement
from roughforge.protocol.messages import DualElementDocument, GroupPathDocument
from roughforge.protocol.transport import dumps, write_sampled_path
from roughforge.tools.commands import RoughForgeTools, describe_rows

DEPTH = 3


def _document(func, with_zero=False):
    sampled = SampledPath.from_function(func, DEPTH)
    path = build_isotropic(sampled, "3/10", with_zero=with_zero)
    return json.loads(dumps(GroupPathDocument.from_path(path).to_dict()))


def _write_csv(target, func, depth=DEPTH):
    sampled = SampledPath.from_function(func, depth)
    buffer = io.StringIO()
    write_sampled_path(buffer, sampled, [f"a{i + 1}" for i in range(sampled.channels)])
    target.write_text(buffer.getvalue())
    return str(target)


@pytest.mark.integration
class TestEnumerationCommands:
    """Test cases for trees, bch and psi"""

    def setup_method(self):
        """Setup test fixtures"""
        self.tools = RoughForgeTools()

    def test_trees(self):
        """Test the four trees with at most three nodes over one decoration"""
        result = self.tools.trees(3, 1)
        assert result["success"] is True
        assert result["count"] == 4
        assert "[1[1]]" in result["trees"]

    def test_trees_with_zero(self):
        """Test decoration 0 joins the alphabet"""
        result = self.tools.trees(1, 1, with_zero=True)
        assert sorted(result["trees"]) == ["[0]", "[1]"]

    def test_bch_table(self):
        """Test the order-2 rows"""
        result = self.tools.bch(2)
        assert result["success"] is True
        assert len(result["rows"]) == 2
        assert "coefficient" in describe_rows(result["rows"])

    def test_bch_evaluation(self):
        """Test BCH of two infinitesimal characters given as documents"""
        algebra = forest_algebra(2, (1,))
        alpha = DualElementDocument.from_element(DualElement.from_mapping(algebra, {"[1]": "1"})).to_dict()
        beta = DualElementDocument.from_element(DualElement.from_mapping(algebra, {"[1]": "2"})).to_dict()
        result = self.tools.bch(2, alpha, beta)
        assert result["success"] is True
        value = DualElementDocument.from_dict(result["bch"]).to_element()
        assert value["[1]"] == 3

    def test_bch_needs_both_inputs(self):
        """Test a single functional is refused"""
        algebra = forest_algebra(2, (1,))
        alpha = DualElementDocument.from_element(DualElement.zero(algebra)).to_dict()
        result = self.tools.bch(2, alpha)
        assert result["success"] is False
        assert result["precondition"] == "bch_inputs"

    def test_bch_order_cap(self):
        """Test orders above the cap fail with a resource error"""
        result = self.tools.bch(7)
        assert result["success"] is False
        assert result["error_type"] == "ResourceLimitError"

    def test_psi(self):
        """Test both methods give the same expansion"""
        recursive = self.tools.psi("[1[2]]")
        partition = self.tools.psi("[1[2]]", method="partition")
        assert recursive["pretty"] == "[1[2]] + [2].[1]"
        assert partition["terms"] == recursive["terms"]

    def test_psi_errors(self):
        """Test parse errors and unknown methods"""
        assert self.tools.psi("[1[2]")["error_type"] == "ParseError"
        assert self.tools.psi("[1]", method="guess")["precondition"] == "psi_method"


@pytest.mark.integration
class TestLiftCommand:
    """Test cases for lift"""

    def setup_method(self):
        """Setup test fixtures"""
        self.tools = RoughForgeTools()

    def test_isotropic_lift(self, tmp_path):
        """Test a two-channel lift with its traces and Hölder report"""
        source = _write_csv(tmp_path / "path.csv", lambda t: (t, t * t))
        result = self.tools.lift(RunConfig(gamma="2/5", input_path=source))
        assert result["success"] is True
        assert result["channels"] == ["a1", "a2"]
        assert result["rp"]["depth"] == DEPTH
        assert result["rp"]["level"] == 2
        assert [t["level"] for t in result["traces"]] == [2]
        assert result["rp"]["holder"]["finite"] is True

    def test_exact_lift(self, tmp_path):
        """Test exact lifts write rational strings"""
        source = _write_csv(tmp_path / "path.csv", lambda t: (t,), depth=2)
        result = self.tools.lift(RunConfig(gamma="2/5", input_path=source, scalar_mode="exact"))
        assert result["rp"]["scalar_mode"] == "exact"
        assert result["rp"]["states"]["[1[1]]"][-1] == "1/2"

    def test_anisotropic_lift(self, tmp_path):
        """Test per-channel exponents"""
        source = _write_csv(tmp_path / "path.csv", lambda t: (t, math.sin(t)))
        run = RunConfig(gamma="2/5", algebra="aniso", gammas="2/5,7/20", input_path=source)
        result = self.tools.lift(run)
        assert result["success"] is True
        assert result["rp"]["algebra"] == "aniso"

    def test_anisotropic_exponent_count(self, tmp_path):
        """Test the exponent list must match the channels"""
        source = _write_csv(tmp_path / "path.csv", lambda t: (t, t))
        run = RunConfig(gamma="2/5", algebra="aniso", gammas="2/5", input_path=source)
        assert self.tools.lift(run)["precondition"] == "exponents"

    def test_signature_lift(self, tmp_path):
        """Test breakpoint files lift through the branched signature"""
        source = tmp_path / "breaks.csv"
        source.write_text("t,a\n0,0\n1/3,1\n1,0\n")
        run = RunConfig(gamma="2/5", depth=2, input_path=str(source))
        result = self.tools.lift(run, signature=True)
        assert result["success"] is True
        assert result["channels"] == 1
        assert result["rp"]["depth"] == 2

    @pytest.mark.parametrize(
        "run,precondition",
        [
            (RunConfig(gamma="1/2"), "gamma_inverse"),
            (RunConfig(gamma="3/2"), "gamma_range"),
            (RunConfig(gamma="2/5"), "input"),
        ],
    )
    def test_preconditions(self, run, precondition):
        """Test invalid runs fail before reading anything"""
        result = self.tools.lift(run)
        assert result["success"] is False
        assert result["precondition"] == precondition

    def test_missing_file(self, tmp_path):
        """Test a missing CSV becomes an error dictionary"""
        result = self.tools.lift(RunConfig(input_path=str(tmp_path / "absent.csv")))
        assert result["success"] is False


@pytest.mark.integration
class TestPathCommands:
    """Test cases for act, solve, bcfp and verify on documents"""

    def setup_method(self):
        """Setup test fixtures"""
        self.tools = RoughForgeTools()
        self.rp = _document(lambda t: (math.sin(2 * t), t * t))
        self.rp2 = _document(lambda t: (math.cos(t) - 1.0, t**3))

    def test_verify(self):
        """Test a constructed path passes every check"""
        result = self.tools.verify(self.rp)
        assert result["success"] is True
        assert result["passed"] is True
        assert set(result["checks"]) >= {"chen", "character", "holder_finite"}

    def test_verify_rejects_bad_document(self):
        """Test schema failures carry the schema precondition"""
        result = self.tools.verify({"depth": 1})
        assert result["success"] is False
        assert result["precondition"] == "schema"

    def test_solve_then_act(self):
        """Test act(solve(X, X'), X) reproduces X'"""
        solved = self.tools.solve(self.rp, self.rp2)
        assert solved["success"] is True
        assert solved["round_trip_error"] <= 1e-8
        moved = self.tools.act(self.rp, solved["g"])
        assert moved["success"] is True
        for key, values in self.rp2["states"].items():
            assert np.allclose(moved["rp"]["states"][key], values, atol=1e-8)

    def test_act_with_zero_family(self):
        """Test the zero family leaves the path alone"""
        family = {"depth": DEPTH, "values": {"[1]": [0.0] * (2**DEPTH + 1)}}
        moved = self.tools.act(self.rp, family)
        assert np.allclose(moved["rp"]["states"]["[1[2]]"], self.rp["states"]["[1[2]]"])

    def test_act_depth_mismatch(self):
        """Test families on another grid are refused"""
        family = {"depth": 1, "values": {"[1]": [0.0, 0.0, 0.0]}}
        result = self.tools.act(self.rp, family)
        assert result["success"] is False
        assert result["error_type"] == "DepthMismatchError"

    def test_bcfp(self):
        """Test M_v with its family and the cross-check against solve"""
        rp = _document(lambda t: (t, math.sin(3 * t)), with_zero=True)
        algebra = GroupPathDocument.from_dict(rp).to_path().algebra
        v = DualElementDocument.from_element(constant_character(algebra, {"[1]": 0.5})).to_dict()
        result = self.tools.bcfp(rp, v)
        assert result["success"] is True
        assert result["cross_check_error"] <= 1e-8
        assert result["chen_residual"] <= 1e-10
        assert result["bound"]["label"] == "bcfp_bound"
        expected = np.array(rp["states"]["[1]"]) + 0.5 * np.array(rp["states"]["[0]"])
        assert np.allclose(result["rp"]["states"]["[1]"], expected)

    def test_bcfp_needs_zero_decoration(self):
        """Test paths without decoration 0 are refused"""
        algebra = GroupPathDocument.from_dict(self.rp).to_path().algebra
        v = DualElementDocument.from_element(constant_character(algebra, {"[1]": 0.5})).to_dict()
        result = self.tools.bcfp(self.rp, v)
        assert result["success"] is False

    def test_config_and_descriptions(self):
        """Test the configuration dump and command list"""
        assert self.tools.show_config()["success"] is True
        descriptions = self.tools.get_command_descriptions()
        assert {"trees", "bch", "lift", "psi", "act", "solve", "bcfp", "verify"} <= set(descriptions)
