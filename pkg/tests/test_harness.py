"""Ensembles, serialization round trips and the command-line interface."""
import json

import numpy as np
import pytest

from specnest import cli, ensembles, serialize
from specnest.decompose import decompose
from specnest.detbrown import brown_density_grid, brown_measure_exact
from specnest.hsnest import build_nest, default_curve
from specnest.majorize import weyl_check
from specnest.matrices import singular_value_function


class TestEnsembles:
    def test_seed_determinism(self):
        spec = ensembles.EnsembleSpec(ensembles.Ginibre(6), seed=3, count=4)
        a = ensembles.generate(spec)
        b = ensembles.generate(spec)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))

    def test_distinct_members(self):
        spec = ensembles.EnsembleSpec(ensembles.Ginibre(6), seed=3, count=2)
        a, b = ensembles.generate(spec)
        assert not np.array_equal(a, b)

    def test_jordan_block_structure(self):
        [J] = ensembles.generate(ensembles.EnsembleSpec(ensembles.Jordan(2.0 + 1.0j, 4)))
        assert np.allclose(np.diag(J), 2.0 + 1.0j)
        assert np.allclose(np.diag(J, 1), 1.0)
        assert np.linalg.norm(np.tril(J, -1)) == 0.0

    def test_upper_triangular_structure(self):
        spec = ensembles.EnsembleSpec(ensembles.UpperTriangularRandom(5), seed=1)
        [T] = ensembles.generate(spec)
        assert np.linalg.norm(np.tril(T, -1)) == 0.0
        assert np.all(np.abs(np.diag(T)) <= 1.0 + 1e-12)

    def test_gaussian_diagonal_law(self):
        spec = ensembles.EnsembleSpec(
            ensembles.UpperTriangularRandom(5, diagonal_law="gaussian"), seed=1
        )
        [T] = ensembles.generate(spec)
        assert np.linalg.norm(np.tril(T, -1)) == 0.0

    def test_from_file_roundtrip(self, tmp_path):
        T = np.array([[1, 2j], [0, 3]], dtype=complex)
        path = tmp_path / "m.json"
        serialize.write_matrix(str(path), T)
        spec = ensembles.EnsembleSpec(ensembles.FromFile(str(path)))
        [back] = ensembles.generate(spec)
        assert np.array_equal(back, T)

    def test_count_validation(self):
        with pytest.raises(ValueError):
            ensembles.EnsembleSpec(ensembles.Ginibre(4), count=0)


class TestSerialize:
    def test_matrix_roundtrip(self):
        T = np.array([[1 + 2j, -0.5], [0.25j, 3]], dtype=complex)
        back = serialize.matrix_from_dict(serialize.matrix_to_dict(T))
        assert np.array_equal(back, T)

    def test_matrix_dict_shape(self):
        d = serialize.matrix_to_dict(np.eye(2))
        assert d["dim"] == 2
        assert len(d["entries"]) == 4
        assert d["entries"][0] == [1.0, 0.0]

    def test_entry_count_validated(self):
        with pytest.raises(ValueError):
            serialize.matrix_from_dict({"dim": 2, "entries": [[1.0, 0.0]]})

    def test_nest_roundtrip(self):
        rng = np.random.default_rng(2)
        T = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / 3
        nest = build_nest(T, default_curve(T))
        back = serialize.nest_from_dict(serialize.nest_to_dict(nest))
        assert np.array_equal(back.basis, nest.basis)
        assert back.jumps == nest.jumps

    def test_step_function_csv(self):
        sf = singular_value_function(np.diag([2.0, 1.0]))
        text = serialize.step_function_csv(sf)
        lines = text.strip().split("\n")
        assert lines[0] == "t,value"
        assert len(lines) == 3

    def test_measure_json(self):
        m = brown_measure_exact(np.diag([1.0, 2.0]))
        rows = json.loads(serialize.measure_to_json(m))
        assert rows == [{"re": 1.0, "im": 0.0, "w": 0.5}, {"re": 2.0, "im": 0.0, "w": 0.5}]

    def test_density_grid_csv_header_and_size(self):
        grid = brown_density_grid(np.diag([0.5, -0.5]), bounds=(-1, 1, -1, 1),
                                  resolution=32, eps=1e-4)
        text = serialize.density_grid_csv(grid)
        lines = text.strip().split("\n")
        assert lines[0].startswith("# bounds=")
        assert "resolution=32x32" in lines[0]
        assert lines[1] == "x,y,mass"
        assert len(lines) == 2 + 32 * 32

    def test_decomposition_dict_schema(self):
        rng = np.random.default_rng(4)
        T = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / 3
        data = serialize.decomposition_to_dict(decompose(T))
        assert data["schemaVersion"] == 1
        assert set(data) == {"schemaVersion", "N", "Q", "nest", "ordering", "diagnostics"}

    def test_report_csv_covers_both_row_kinds(self):
        rng = np.random.default_rng(5)
        T = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / 3
        text = serialize.report_rows_csv(weyl_check(T).rows)
        lines = text.strip().split("\n")
        assert lines[0] == "# schemaVersion=1"
        assert all(line.count(",") == 5 for line in lines[1:])

    def test_atomic_write_replaces(self, tmp_path):
        path = tmp_path / "out.txt"
        serialize.write_text(str(path), "one\n")
        serialize.write_text(str(path), "two\n")
        assert path.read_text() == "two\n"
        assert not (tmp_path / "out.txt.tmp").exists()


class TestCli:
    def run(self, *argv):
        return cli.main(list(argv))

    def test_gen_and_decompose_pipeline(self, tmp_path):
        assert self.run("gen", "--kind", "ginibre", "--n", "6", "--seed", "5",
                        "--out", str(tmp_path)) == 0
        matrix_path = tmp_path / "ginibre_6_5_0000.json"
        assert matrix_path.exists()
        out = tmp_path / "dec.json"
        report = tmp_path / "dec_report.csv"
        assert self.run("decompose", "--in", str(matrix_path), "--out", str(out),
                        "--report", str(report)) == 0
        data = json.loads(out.read_text())
        assert data["schemaVersion"] == 1
        assert report.read_text().startswith("# schemaVersion=1")

    def test_brown_command(self, tmp_path):
        matrix_path = tmp_path / "m.json"
        serialize.write_matrix(str(matrix_path), np.diag([0.5, -0.5]).astype(complex))
        out = tmp_path / "grid.csv"
        assert self.run("brown", "--in", str(matrix_path), "--grid", "48",
                        "--eps", "1e-6", "--out", str(out)) == 0
        assert out.read_text().startswith("# bounds=")

    def test_hs_command(self, tmp_path):
        matrix_path = tmp_path / "m.json"
        serialize.write_matrix(str(matrix_path), np.array([[1, 1], [0, 2]], dtype=complex))
        out = tmp_path / "p.json"
        assert self.run("hs", "--in", str(matrix_path), "--ball", "2", "0", "0.5",
                        "--out", str(out)) == 0
        p = serialize.matrix_from_dict(json.loads(out.read_text()))
        assert np.allclose(p, 0.5 * np.ones((2, 2)), atol=1e-10)

    def test_check_weyl_command(self, tmp_path):
        matrix_path = tmp_path / "m.json"
        serialize.write_matrix(str(matrix_path), np.array([[1, 1], [0, 2]], dtype=complex))
        out = tmp_path / "weyl.csv"
        assert self.run("check", "weyl", "--in", str(matrix_path),
                        "--gauges", "pow:1,logshift:2", "--out", str(out)) == 0
        assert out.exists()

    def test_check_lemmas_command(self, tmp_path):
        matrix_path = tmp_path / "m.json"
        rng = np.random.default_rng(6)
        T = (rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))) / 4
        serialize.write_matrix(str(matrix_path), T)
        assert self.run("check", "lemmas", "--in", str(matrix_path), "--n-max", "6") == 0

    def test_missing_file_is_usage_error(self, tmp_path, capsys):
        code = self.run("decompose", "--in", str(tmp_path / "nope.json"),
                        "--out", str(tmp_path / "o.json"))
        assert code == 2
        record = json.loads(capsys.readouterr().err)
        assert record["error"] == "FileNotFoundError"

    def test_bad_gauge_spec_is_usage_error(self, tmp_path):
        matrix_path = tmp_path / "m.json"
        serialize.write_matrix(str(matrix_path), np.eye(2))
        assert self.run("check", "weyl", "--in", str(matrix_path),
                        "--gauges", "bogus:1") == 2

    def test_out_dir_env_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SPECNEST_OUT_DIR", str(tmp_path))
        assert self.run("gen", "--kind", "jordan", "--n", "3",
                        "--lam-re", "1.0") == 0
        assert (tmp_path / "jordan_3_0_0000.json").exists()
