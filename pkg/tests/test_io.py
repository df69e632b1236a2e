import numpy as np
import pytest

from nks3 import fixtures, io


def test_immersion_csv_round_trip(tmp_path):
    grid = fixtures.example2_grid(fixtures.default_spec("example2", nu=9, nv=7))
    path = tmp_path / "g.csv"
    io.write_immersion_csv(path, grid)
    back = io.read_immersion_csv(path)
    assert back.nu == 9 and back.nv == 7
    assert abs(back.u0 - grid.u0) < 1e-15 and abs(back.du - grid.du) < 1e-15
    assert np.abs(back.p - grid.p).max() < 1e-15
    assert np.abs(back.q - grid.q).max() < 1e-15
    # writing the read-back grid reproduces the bytes
    path2 = tmp_path / "g2.csv"
    io.write_immersion_csv(path2, back)
    assert path.read_bytes() == path2.read_bytes()


def test_immersion_csv_layout(tmp_path):
    grid = fixtures.example1_grid(fixtures.default_spec("example1", nu=5, nv=6))
    path = tmp_path / "g.csv"
    io.write_immersion_csv(path, grid)
    lines = path.read_text().splitlines()
    assert lines[0] == "u,v,p0,p1,p2,p3,q0,q1,q2,q3"
    assert len(lines) == 1 + 5 * 6
    # v varies slowest: the first nu rows share v = v0
    first = np.array([ln.split(",")[:2] for ln in lines[1:6]], dtype=float)
    assert np.abs(first[:, 1] - grid.v0).max() == 0.0
    assert np.abs(first[:, 0] - grid.u_vals).max() < 1e-15


def test_epsilon_csv_round_trip(tmp_path):
    hs = fixtures.cmc_sphere_epsilon(
        fixtures.default_spec("cmc_sphere", nu=9, nv=9)
    )
    path = tmp_path / "e.csv"
    io.write_epsilon_csv(path, hs)
    assert path.read_text().splitlines()[0] == "u,v,x,y,z"
    back = io.read_epsilon_csv(path)
    assert np.abs(back.eps - hs.eps).max() < 1e-15
    assert abs(back.v0 - hs.v0) < 1e-15


def test_reader_accepts_shuffled_rows(tmp_path):
    hs = fixtures.cmc_cylinder_epsilon(
        fixtures.default_spec("cmc_cylinder", nu=7, nv=7)
    )
    path = tmp_path / "e.csv"
    io.write_epsilon_csv(path, hs)
    lines = path.read_text().splitlines()
    rng = np.random.default_rng(0)
    body = [lines[1 + k] for k in rng.permutation(len(lines) - 1)]
    path.write_text("\n".join([lines[0]] + body) + "\n")
    back = io.read_epsilon_csv(path)
    assert np.abs(back.eps - hs.eps).max() < 1e-15


def test_reader_rejects_bad_input(tmp_path):
    hs = fixtures.cmc_sphere_epsilon(
        fixtures.default_spec("cmc_sphere", nu=7, nv=7)
    )
    path = tmp_path / "e.csv"

    io.write_epsilon_csv(path, hs)
    lines = path.read_text().splitlines()
    with pytest.raises(ValueError, match="header"):
        p = tmp_path / "h.csv"
        p.write_text("\n".join(["a,b,c,d,e"] + lines[1:]) + "\n")
        io.read_epsilon_csv(p)
    with pytest.raises(ValueError, match="grid"):
        p = tmp_path / "m.csv"
        p.write_text("\n".join(lines[:-1]) + "\n")  # one missing row
        io.read_epsilon_csv(p)
    with pytest.raises(ValueError, match="missing or duplicated"):
        p = tmp_path / "d.csv"
        # right row count, but one cell written twice and another absent
        p.write_text("\n".join(lines[:-1] + [lines[5]]) + "\n")
        io.read_epsilon_csv(p)
    with pytest.raises(ValueError, match="irregular"):
        p = tmp_path / "j.csv"
        parts = lines[1 + 3].split(",")
        parts[0] = repr(float(parts[0]) + 1e-7)  # jitter one u coordinate
        p.write_text("\n".join(lines[: 1 + 3] + [",".join(parts)] + lines[2 + 3:]) + "\n")
        io.read_epsilon_csv(p)


def test_dump_report_canonical():
    rep = {"b": np.float64(1.5), "a": {"z": np.int64(3), "y": [np.float64(0.25)]}}
    text = io.dump_report(rep)
    assert text == '{\n  "a": {\n    "y": [\n      0.25\n    ],\n    "z": 3\n  },\n  "b": 1.5\n}\n'
    assert io.dump_report(rep) == text
