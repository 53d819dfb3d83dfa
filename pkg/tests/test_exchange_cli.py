import json
import math

import numpy as np
import pytest

from mixspec import (
    DiscreteFunction,
    assemble_fractional_stiffness,
    assemble_mass,
    build_mesh,
)
from mixspec.cli import main
from mixspec.exchange import (
    FormatError,
    read_couple,
    read_matrix,
    read_vector,
    write_couple,
    write_matrix,
    write_vector,
)


class TestMatrixFormat:
    def test_round_trip_exact(self, tmp_path):
        mesh = build_mesh(0.0, 1.0, 5)
        matrix = assemble_fractional_stiffness(mesh, 0.37)
        path = tmp_path / "frac.txt"
        write_matrix(path, matrix)
        block = read_matrix(path)
        assert block.kind == "FractionalStiffness"
        assert block.s == 0.37
        np.testing.assert_array_equal(block.data, matrix.data)

    def test_header_content(self, tmp_path):
        mesh = build_mesh(0.0, 1.0, 3)
        path = tmp_path / "mass.txt"
        write_matrix(path, assemble_mass(mesh))
        first = path.read_text().splitlines()[0]
        assert first == "# 3 3 Mass NA"

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("nonsense\n1 2\n")
        with pytest.raises(FormatError):
            read_matrix(path)

    def test_wrong_row_length(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("# 2 2 Gram NA\n1 0\n0\n")
        with pytest.raises(FormatError):
            read_matrix(path)

    def test_truncated_block(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("# 3 3 Gram NA\n1 0 0\n0 1 0\n")
        with pytest.raises(FormatError):
            read_matrix(path)

    def test_trailing_content(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("# 1 1 Gram NA\n1\nextra\n")
        with pytest.raises(FormatError):
            read_matrix(path)


class TestVectorFormat:
    def test_round_trip(self, tmp_path):
        mesh = build_mesh(-1.0, 2.0, 4)
        func = DiscreteFunction(mesh, np.array([0.1, -2.0, 3.5, 1e-17]))
        path = tmp_path / "vec.txt"
        write_vector(path, func)
        back = read_vector(path)
        assert back.mesh.matches(mesh)
        np.testing.assert_array_equal(back.coeffs, func.coeffs)

    def test_count_mismatch(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("# 3 0 1\n1.0\n2.0\n")
        with pytest.raises(FormatError):
            read_vector(path)


class TestCoupleFormat:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((3, 3))
        g_x = a @ a.T + np.eye(3)
        g_y = np.diag([1.0, 2.0, 3.0])
        path = tmp_path / "couple.txt"
        write_couple(path, g_x, g_y)
        rx, ry = read_couple(path)
        np.testing.assert_array_equal(rx, g_x)
        np.testing.assert_array_equal(ry, g_y)

    def test_missing_tag(self, tmp_path):
        path = tmp_path / "couple.txt"
        path.write_text("# 1 1 Gram NA\n1\n")
        with pytest.raises(FormatError):
            read_couple(path)


class TestCliAssemble:
    def test_writes_three_files_deterministically(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        args = ["assemble", "--domain", "0", "1", "--n", "8", "--s", "0.5"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        for name in ("mass.txt", "local_stiffness.txt", "fractional_stiffness.txt"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_parameter_error_exit_2(self, tmp_path):
        assert main(["assemble", "--s", "1.5", "--out", str(tmp_path)]) == 2
        assert main(["assemble", "--domain", "1", "0", "--out", str(tmp_path)]) == 2

    def test_usage_exit_64(self):
        with pytest.raises(SystemExit) as info:
            main(["assemble", "--no-such-flag"])
        assert info.value.code == 64
        with pytest.raises(SystemExit) as info:
            main(["frobnicate"])
        assert info.value.code == 64


class TestCliSpectrum:
    def test_baseline_lambda(self, tmp_path):
        code = main(["spectrum", "--n", "127", "--s", "0.5", "--alpha", "0",
                     "--k", "3", "--out", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "spectrum.csv").read_text().splitlines()
        assert rows[0] == "k,lambda,residual,cluster"
        lam1 = float(rows[1].split(",")[1])
        assert abs(lam1 - math.pi**2) / math.pi**2 < 1e-3
        report = json.loads((tmp_path / "spectrum_report.json").read_text())
        assert report["variational"]["holds"]

    def test_strongly_negative_alpha(self, tmp_path):
        code = main(["spectrum", "--n", "31", "--s", "0.5", "--alpha", "-1000",
                     "--k", "2", "--out", str(tmp_path)])
        assert code == 0
        report = json.loads((tmp_path / "spectrum_report.json").read_text())
        assert report["gamma"] > 0.0

    def test_missing_alpha(self, tmp_path):
        assert main(["spectrum", "--n", "7", "--out", str(tmp_path)]) == 2

    def test_json_format(self, tmp_path):
        code = main(["spectrum", "--n", "15", "--s", "0.5", "--alpha", "0", "--k", "2",
                     "--format", "json", "--out", str(tmp_path)])
        assert code == 0
        rows = json.loads((tmp_path / "spectrum.json").read_text())
        assert rows[0]["k"] == 1 and rows[0]["lambda"] > 0
        code = main(["sweep", "--n", "15", "--s", "0.5", "--alpha", "1", "--k", "1",
                     "--format", "json", "--out", str(tmp_path)])
        assert code == 0
        rows = json.loads((tmp_path / "sweep.json").read_text())
        assert rows[0]["sign_lambda_1"] == 1

    def test_eigenvector_files(self, tmp_path):
        code = main(["spectrum", "--n", "15", "--s", "0.5", "--alpha", "0",
                     "--k", "2", "--vectors", "--out", str(tmp_path)])
        assert code == 0
        func = read_vector(tmp_path / "eigenvector_1.txt")
        assert func.coeffs.size == 15


class TestCliSweep:
    def test_threshold_report(self, tmp_path):
        code = main(["sweep", "--n", "31", "--s", "0.5", "--alpha-range", "-2", "1", "5",
                     "--k", "2", "--out", str(tmp_path)])
        assert code == 0
        report = json.loads((tmp_path / "sweep_report.json").read_text())
        assert report["threshold_holds"] and report["monotone_in_alpha"]
        c_inv = -report["minus_inv_c"]
        assert abs(report["alpha_star"] + c_inv) <= 1e-8 * c_inv

    def test_single_point_grid(self, tmp_path):
        code = main(["sweep", "--n", "15", "--s", "0.5", "--alpha", "0.5",
                     "--k", "2", "--out", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "sweep.csv").read_text().splitlines()
        assert len(rows) == 2 and rows[0].startswith("alpha,gamma,lambda_1")

    def test_empty_grid(self, tmp_path):
        assert main(["sweep", "--n", "15", "--s", "0.5", "--alpha-range",
                     "-1", "1", "0", "--out", str(tmp_path)]) == 2


class TestCliKfunc:
    def test_builtin_couple_report(self, tmp_path):
        code = main(["kfunc", "--couple", "l2-h1", "--n", "31", "--s", "0.5",
                     "--p", "2", "--x", "1", "--seed", "5", "--out", str(tmp_path)])
        assert code == 0
        report = json.loads((tmp_path / "kfunc_report.json").read_text())
        assert report["norms"][0]["closed_form_rel_error"] <= 1e-5
        assert all(r["holds"] for r in report["symmetry"])
        # the x = 1 row of the curve equals the sum norm K(1, f)
        rows = (tmp_path / "kcurve.csv").read_text().splitlines()[1:]
        row1 = next(r for r in rows if float(r.split(",")[0]) == 1.0)
        assert float(row1.split(",")[1]) == pytest.approx(report["k_at_1"], rel=1e-12)

    def test_zero_element_curve(self, tmp_path):
        mesh = build_mesh(0.0, 1.0, 7)
        vec_path = tmp_path / "zero.txt"
        write_vector(vec_path, DiscreteFunction(mesh, np.zeros(7)))
        code = main(["kfunc", "--couple", "l2-h1", "--n", "7", "--s", "0.5",
                     "--p", "2", "--f", str(vec_path), "--out", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "kcurve.csv").read_text().splitlines()[1:]
        assert all(float(r.split(",")[1]) == 0.0 for r in rows)

    def test_couple_file_source(self, tmp_path):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((4, 4))
        write_couple(tmp_path / "cp.txt", a @ a.T + 4 * np.eye(4), np.diag([1.0, 2, 3, 4]))
        code = main(["kfunc", "--couple", str(tmp_path / "cp.txt"), "--s", "0.25,0.75",
                     "--p", "1,2,inf", "--seed", "2", "--out", str(tmp_path)])
        assert code == 0
        report = json.loads((tmp_path / "kfunc_report.json").read_text())
        assert len(report["norms"]) == 6

    def test_non_spd_couple_file(self, tmp_path):
        write_couple(tmp_path / "bad.txt", np.diag([1.0, -1.0]), np.eye(2))
        assert main(["kfunc", "--couple", str(tmp_path / "bad.txt"),
                     "--out", str(tmp_path)]) == 2


class TestCliVerify:
    def test_subset_deterministic(self, tmp_path):
        out1, out2 = tmp_path / "v1", tmp_path / "v2"
        args = ["verify", "--seed", "7", "--suites", "lebesgue,gamma_shift"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert (out1 / "verify_report.json").read_bytes() == (out2 / "verify_report.json").read_bytes()

    def test_corrupted_matrix_counterexample(self, tmp_path):
        mesh = build_mesh(0.0, 1.0, 6)
        good = tmp_path / "frac.txt"
        write_matrix(good, assemble_fractional_stiffness(mesh, 0.5))
        assert main(["verify", "--suites", "lebesgue", "--matrix", str(good),
                     "--out", str(tmp_path / "ok")]) == 0
        lines = good.read_text().splitlines()
        parts = lines[2].split()
        parts[4] = "3.14"
        bad = tmp_path / "corrupted.txt"
        bad.write_text("\n".join(lines[:2] + [" ".join(parts)] + lines[3:]) + "\n")
        assert main(["verify", "--suites", "lebesgue", "--matrix", str(bad),
                     "--out", str(tmp_path / "bad")]) == 1
        report = json.loads((tmp_path / "bad" / "verify_report.json").read_text())
        failed = [s for s in report["suites"] if not s["passed"]]
        assert len(failed) == 1 and failed[0]["counterexample"] is not None

    def test_unknown_suite(self, tmp_path):
        assert main(["verify", "--suites", "nope", "--out", str(tmp_path)]) == 2


class TestConfigFile:
    def test_precedence(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("n = 9\ns = 0.5\nout = {0}\ndomain = 0 2\n".format(tmp_path / "cfg_out"))
        # flag --n overrides the config value, config supplies the rest
        assert main(["assemble", "--config", str(config), "--n", "4"]) == 0
        block = read_matrix(tmp_path / "cfg_out" / "mass.txt")
        assert block.data.shape == (4, 4)
        # without the flag the config n wins
        assert main(["assemble", "--config", str(config)]) == 0
        block = read_matrix(tmp_path / "cfg_out" / "mass.txt")
        assert block.data.shape == (9, 9)

    def test_bad_key(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("bogus = 1\n")
        assert main(["assemble", "--config", str(config)]) == 2

    def test_comments_and_blanks(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("# a comment\n\nn = 5  # trailing\n")
        assert main(["assemble", "--config", str(config), "--out",
                     str(tmp_path / "o"), "--s", "0.5"]) == 0
        assert read_matrix(tmp_path / "o" / "mass.txt").data.shape == (5, 5)
