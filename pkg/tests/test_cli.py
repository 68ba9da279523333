import json
import math
import os

import numpy as np
import pytest

from payoff_forge.cli import main
from payoff_forge.formats import (
    dumps,
    read_curve_csv,
    read_profile_csv,
    write_curve_csv,
    write_profile_csv,
)
from payoff_forge.fixtures import write_fixture_files
from payoff_forge.market import Mesh


@pytest.fixture
def product_2bucket(tmp_path):
    """Two-bucket product with growth-optimal payoff [2, 2/3]."""
    path = tmp_path / "product.json"
    path.write_text(
        dumps(
            {
                "mesh": [0.0, 1.0, 2.0],
                "market": [0.25, 0.75],
                "belief": [0.5, 0.5],
                "metadata": {"name": "two bucket"},
            }
        )
    )
    return str(path)


@pytest.fixture
def product_maxloss(tmp_path):
    """Product whose growth-optimal payoff bottoms out at 0.4."""
    path = tmp_path / "maxloss.json"
    path.write_text(
        dumps(
            {
                "mesh": [0.0, 1.0, 2.0],
                "market": [0.5, 0.5],
                "belief": [0.8, 0.2],
            }
        )
    )
    return str(path)


class TestImplyMarket:
    def test_prices_csv(self, tmp_path, capsys):
        prices = tmp_path / "prices.csv"
        write_curve_csv(str(prices), Mesh([0.0, 1.0, 2.0, 3.0]), [0.4, 0.6, 1.0])
        assert main(["imply-market", str(prices)]) == 0
        out = capsys.readouterr().out.strip()
        _, values = read_curve_csv(out)
        np.testing.assert_allclose(values, [0.2, 0.3, 0.5])

    def test_malformed_row_is_usage_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("x_left,x_right,value\n0,1,0.4\n1,2,oops\n")
        assert main(["imply-market", str(bad)]) == 64
        assert "bad.csv:3" in capsys.readouterr().err

    def test_negative_price_names_bucket(self, tmp_path, capsys):
        bad = tmp_path / "neg.csv"
        write_curve_csv(str(bad), Mesh([0.0, 1.0, 2.0]), [0.5, 0.5])
        text = bad.read_text().replace("0.5\n", "-0.5\n", 1)
        bad.write_text(text)
        assert main(["imply-market", str(bad)]) == 3
        assert "bucket 0" in capsys.readouterr().err


class TestSolve:
    def test_log_family_payoff_equals_growth_optimal(self, tmp_path, product_2bucket):
        out = tmp_path / "out"
        assert main(["solve", product_2bucket, "--family", "log", "-o", str(out)]) == 0
        _, payoff = read_curve_csv(str(out / "product.payoff.csv"))
        _, reference = read_curve_csv(str(out / "product.growth_optimal.csv"))
        # log-return round trips cost the solver a few ulps, nothing more
        np.testing.assert_allclose(payoff, reference, rtol=1e-14)

    def test_dial_two(self, tmp_path, product_2bucket):
        out = tmp_path / "out"
        assert main(["solve", product_2bucket, "--a", "2", "-o", str(out)]) == 0
        _, values = read_curve_csv(str(out / "product.payoff.csv"))
        np.testing.assert_allclose(values, [1.5, 5.0 / 6.0], atol=1e-15)

    def test_max_loss_records_calibrated_strength(self, tmp_path, product_maxloss):
        out = tmp_path / "out"
        assert main(["solve", product_maxloss, "--max-loss", "0.7", "-o", str(out)]) == 0
        manifest = json.loads((out / "maxloss.manifest.json").read_text())
        assert manifest["calibrated_strength"] == pytest.approx(2.0, abs=1e-14)
        assert manifest["method"] == "one_param_max_loss"

    def test_outputs_byte_identical_across_runs(self, tmp_path, product_2bucket):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        for out in (out_a, out_b):
            assert (
                main(
                    [
                        "solve",
                        product_2bucket,
                        "--family",
                        "constant_relative:2",
                        "-o",
                        str(out),
                    ]
                )
                == 0
            )
        for name in (
            "product.payoff.csv",
            "product.growth_optimal.csv",
            "product.implied_r.csv",
            "product.manifest.json",
        ):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_manifest_round_trips(self, tmp_path, product_2bucket):
        out = tmp_path / "out"
        assert main(["solve", product_2bucket, "--family", "log", "-o", str(out)]) == 0
        manifest = json.loads((out / "product.manifest.json").read_text())
        assert manifest["residuals"]["budget"] <= 1e-10
        assert manifest["settings"]["convergence_tol"] == 1e-10

    def test_exactly_one_risk_specification(self, tmp_path, product_2bucket, capsys):
        out = tmp_path / "out"
        code = main(
            ["solve", product_2bucket, "--family", "log", "--a", "2", "-o", str(out)]
        )
        assert code == 3
        assert "exactly one" in capsys.readouterr().err

    def test_profile_solve_and_imply_round_trip(self, tmp_path, capsys):
        product = tmp_path / "wide.json"
        market = [0.2, 0.2, 0.2, 0.2, 0.2]
        belief = [0.3, 0.15, 0.25, 0.1, 0.2]
        product.write_text(
            dumps({"mesh": [0, 1, 2, 3, 4, 5], "market": market, "belief": belief})
        )
        profile_path = tmp_path / "profile.csv"
        write_profile_csv(str(profile_path), [1.0, 2.0, 3.0, 4.0], [0.8, 2.0, math.inf, 1.3])
        out = tmp_path / "out"
        assert (
            main(["solve", str(product), "--profile", str(profile_path), "-o", str(out)])
            == 0
        )
        _, implied = read_profile_csv(str(out / "wide.implied_r.csv"))
        np.testing.assert_allclose(implied[[0, 1, 3]], [0.8, 2.0, 1.3], atol=1e-10)
        assert math.isinf(implied[2])

    def test_risk_loving_profile_is_solver_error(self, tmp_path, capsys):
        product = tmp_path / "p.json"
        product.write_text(
            dumps({"mesh": [0, 1, 2, 3], "market": [0.3, 0.4, 0.3], "belief": [0.2, 0.4, 0.4]})
        )
        profile_path = tmp_path / "neg.csv"
        write_profile_csv(str(profile_path), [1.0, 2.0], [-1.0, 2.0])
        assert main(["solve", str(product), "--profile", str(profile_path)]) == 2
        assert "risk-loving" in capsys.readouterr().err

    def test_settings_override(self, tmp_path, product_2bucket):
        settings = tmp_path / "settings.json"
        settings.write_text(json.dumps({"shooting_tol": 1e-13, "max_iterations": 500}))
        out = tmp_path / "out"
        assert (
            main(
                [
                    "solve",
                    product_2bucket,
                    "--family",
                    "constant_relative:2",
                    "--settings",
                    str(settings),
                    "-o",
                    str(out),
                ]
            )
            == 0
        )
        manifest = json.loads((out / "product.manifest.json").read_text())
        assert manifest["settings"]["shooting_tol"] == 1e-13
        assert manifest["settings"]["max_iterations"] == 500


class TestImplyR:
    def test_growth_optimal_implies_unit(self, tmp_path, product_2bucket, capsys):
        out = tmp_path / "out"
        main(["solve", product_2bucket, "--family", "log", "-o", str(out)])
        capsys.readouterr()
        implied_out = tmp_path / "implied.csv"
        assert (
            main(
                [
                    "imply-r",
                    str(out / "product.payoff.csv"),
                    product_2bucket,
                    "-o",
                    str(implied_out),
                ]
            )
            == 0
        )
        _, values = read_profile_csv(str(implied_out))
        np.testing.assert_allclose(values, 1.0)

    def test_bond_implies_inf(self, tmp_path, product_2bucket):
        bond = tmp_path / "bond.csv"
        write_curve_csv(str(bond), Mesh([0.0, 1.0, 2.0]), [1.0, 1.0])
        implied_out = tmp_path / "implied.csv"
        assert main(["imply-r", str(bond), product_2bucket, "-o", str(implied_out)]) == 0
        assert "inf" in implied_out.read_text()


class TestValidate:
    def test_overlay_recovers_scale(self, tmp_path, product_2bucket, capsys):
        overlay = tmp_path / "overlay.csv"
        # (f - 1) / 2 with f = [2, 2/3]
        write_curve_csv(str(overlay), Mesh([0.0, 1.0, 2.0]), [0.5, -1.0 / 6.0])
        code = main(["validate", str(overlay), product_2bucket, "--overlay"])
        out = capsys.readouterr().out
        assert code == 0
        assert "consistent-risk-averse" in out
        assert "recovered risk scale" in out

    def test_blended_fixture_fails_validation(self, tmp_path, capsys):
        paths = write_fixture_files(str(tmp_path))
        half_skew = next(p for p in paths if "half_skew" in p)
        payoff = next(p for p in paths if p.endswith(".csv"))
        report_path = tmp_path / "report.json"
        code = main(["validate", payoff, half_skew, "--report", str(report_path)])
        out = capsys.readouterr().out
        assert code == 3
        assert "irrational-oscillation" in out
        report = json.loads(report_path.read_text())
        assert report["classification"] == "irrational-oscillation"

    def test_bond_passes_with_note(self, tmp_path, product_2bucket, capsys):
        bond = tmp_path / "bond.csv"
        write_curve_csv(str(bond), Mesh([0.0, 1.0, 2.0]), [1.0, 1.0])
        assert main(["validate", str(bond), product_2bucket]) == 0
        assert "bond" in capsys.readouterr().out


class TestOracle:
    def test_cross_check_lines(self, tmp_path, capsys):
        product = tmp_path / "p.json"
        product.write_text(
            dumps({"mesh": [0, 1, 2, 3], "market": [0.25, 0.4, 0.35], "belief": [0.3, 0.45, 0.25]})
        )
        assert main(["oracle", str(product), "--family", "constant_relative:2"]) == 0
        out = capsys.readouterr().out
        lines = {line.split(":")[0]: float(line.split(":")[1]) for line in out.splitlines() if ":" in line and "grid" not in line}
        assert lines["oracle-vs-fixed-point allocation max diff"] <= 1e-6
        assert lines["fixed-point-vs-elasticity payoff max diff"] <= 1e-8
        assert lines["elasticity budget residual"] <= 1e-10


class TestPlotData:
    def test_tidy_output(self, tmp_path, product_2bucket, capsys):
        out = tmp_path / "out"
        main(["solve", product_2bucket, "--a", "2", "-o", str(out)])
        capsys.readouterr()
        plot = tmp_path / "plot.csv"
        code = main(
            [
                "plot-data",
                f"F={out / 'product.payoff.csv'}",
                f"f={out / 'product.growth_optimal.csv'}",
                f"R={out / 'product.implied_r.csv'}",
                "-o",
                str(plot),
            ]
        )
        assert code == 0
        lines = plot.read_text().splitlines()
        assert lines[0] == "series,x,value"
        series = {line.split(",")[0] for line in lines[1:]}
        assert series == {"F", "f", "R"}

    def test_missing_series_file(self, tmp_path, capsys):
        assert main(["plot-data", "F=/nonexistent.csv", "-o", str(tmp_path / "o.csv")]) == 64

    def test_inf_serialized_literally(self, tmp_path, product_2bucket, capsys):
        bond = tmp_path / "bond.csv"
        write_curve_csv(str(bond), Mesh([0.0, 1.0, 2.0]), [1.0, 1.0])
        implied_out = tmp_path / "implied.csv"
        main(["imply-r", str(bond), product_2bucket, "-o", str(implied_out)])
        capsys.readouterr()
        plot = tmp_path / "plot.csv"
        assert main(["plot-data", f"R={implied_out}", "-o", str(plot)]) == 0
        assert ",inf" in plot.read_text()


class TestUsage:
    def test_unknown_command(self, capsys):
        assert main(["frobnicate"]) == 64

    def test_missing_required_argument(self, capsys):
        assert main(["solve"]) == 64

    def test_bad_family_spec(self, tmp_path, product_2bucket, capsys):
        assert main(["solve", product_2bucket, "--family", "nope:1"]) == 3
