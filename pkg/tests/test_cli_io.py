import math
import os

import numpy as np
import pytest

from conetomo.cli import main
from conetomo.formats import (
    read_cone_sinogram,
    read_image_raw,
    read_radon_sinogram,
    write_cone_sinogram,
    write_image_raw,
    write_pgm16,
    write_radon_sinogram,
)
from conetomo.geometry import ConeSinogram, ImageGrid, RadonSinogram


def test_radon_sinogram_bit_exact_roundtrip(tmp_path, rng):
    for trial in range(5):
        vals = rng.standard_normal((7, 11)) * 10.0 ** rng.integers(-8, 8)
        vals[0, 0] = -0.0
        sino = RadonSinogram(7, 11, float(rng.uniform(0.5, 3.0)), vals)
        path = tmp_path / f"r{trial}.sg"
        write_radon_sinogram(path, sino)
        back = read_radon_sinogram(path)
        assert back.values.tobytes() == sino.values.tobytes()
        assert back.s_max == sino.s_max
        assert (back.n_theta, back.n_s) == (7, 11)


def test_cone_sinogram_bit_exact_roundtrip(tmp_path, rng):
    for trial in range(5):
        verts = rng.uniform(-2, 2, (3, 2))
        vals = rng.standard_normal((3, 8, 5)) * 10.0 ** rng.integers(-8, 8)
        sino = ConeSinogram(verts, 8, 5, vals)
        path = tmp_path / f"c{trial}.sg"
        write_cone_sinogram(path, sino)
        back = read_cone_sinogram(path)
        assert back.values.tobytes() == sino.values.tobytes()
        assert back.vertices.tobytes() == sino.vertices.tobytes()
        assert (back.n_beta, back.n_psi) == (8, 5)


def test_image_raw_roundtrip(tmp_path, rng):
    grid = ImageGrid(9, 1.25, rng.standard_normal((9, 9)))
    path = tmp_path / "img.raw"
    write_image_raw(path, grid)
    assert os.path.getsize(path) == 16 + 8 * 81
    back = read_image_raw(path)
    assert back.values.tobytes() == grid.values.tobytes()
    assert back.half_extent == pytest.approx(1.25, rel=1e-6)  # header keeps f32


def test_format_corruption_detected(tmp_path):
    sino = RadonSinogram(2, 3, 1.0, np.zeros((2, 3)))
    path = tmp_path / "x.sg"
    write_radon_sinogram(path, sino)
    raw = path.read_bytes()
    bad_magic = tmp_path / "bad1.sg"
    bad_magic.write_bytes(b"XXXXXXXX" + raw[8:])
    with pytest.raises(ValueError):
        read_radon_sinogram(bad_magic)
    truncated = tmp_path / "bad2.sg"
    truncated.write_bytes(raw[:-4])
    with pytest.raises(ValueError):
        read_radon_sinogram(truncated)
    trailing = tmp_path / "bad3.sg"
    trailing.write_bytes(raw + b"\x00")
    with pytest.raises(ValueError):
        read_radon_sinogram(trailing)
    with pytest.raises(ValueError):
        read_cone_sinogram(path)  # cone reader on radon file


def test_pgm_scaling_and_orientation(tmp_path):
    vals = np.zeros((2, 3))
    vals[1, 0] = 4.0  # (x min, y max): top-left of the rendered image
    path = tmp_path / "img.pgm"
    vmin, vmax = write_pgm16(path, vals)
    assert (vmin, vmax) == (0.0, 4.0)
    raw = path.read_bytes()
    header = b"P5\n3 2\n65535\n"
    assert raw.startswith(header)
    pix = np.frombuffer(raw[len(header):], dtype=">u2").reshape(2, 3)
    assert pix[0, 0] == 65535  # flipped to the top row
    assert pix[1, 0] == 0
    # constant image maps to all zeros
    write_pgm16(path, np.full((2, 2), 3.3))
    flat = np.frombuffer(path.read_bytes().split(b"65535\n", 1)[1], dtype=">u2")
    assert np.all(flat == 0)


def write_disk_phantom(tmp_path):
    path = tmp_path / "disk.txt"
    path.write_text("# unit disk\ndisk 0 0 0.5 1.0\n")
    return str(path)


def test_cli_phantom_products(tmp_path):
    pf = write_disk_phantom(tmp_path)
    out = str(tmp_path / "o")
    assert main(["phantom", "--phantom", pf, "--out", out, "--npx", "32"]) == 0
    grid = read_image_raw(os.path.join(out, "phantom.raw"))
    assert grid.n_px == 32
    assert grid.values.max() == pytest.approx(1.0)
    assert os.path.exists(os.path.join(out, "phantom.pgm"))
    assert os.path.exists(os.path.join(out, "phantom_scale.csv"))
    cfg = open(os.path.join(out, "run.cfg")).read()
    assert "npx = 32" in cfg and "extent = 1.0" in cfg


def test_cli_empty_phantom(tmp_path):
    pf = tmp_path / "empty.txt"
    pf.write_text("# nothing here\n")
    out = str(tmp_path / "o")
    assert main(["phantom", "--phantom", str(pf), "--out", out, "--npx", "16"]) == 0
    grid = read_image_raw(os.path.join(out, "phantom.raw"))
    assert np.all(grid.values == 0.0)
    pgm = open(os.path.join(out, "phantom.pgm"), "rb").read()
    assert set(pgm.split(b"65535\n", 1)[1]) == {0}


def test_cli_forward_single_vertex_constant(tmp_path):
    pf = write_disk_phantom(tmp_path)
    out = str(tmp_path / "o")
    code = main(
        ["forward", "--phantom", pf, "--out", out, "--vertex", "0,0", "--nbeta", "16", "--npsi", "8"]
    )
    assert code == 0
    sino = read_cone_sinogram(os.path.join(out, "cone.sg"))
    assert sino.values.shape == (1, 16, 8)
    assert np.allclose(sino.values, 1.0, atol=1e-12)


def test_cli_forward_radon_center_column(tmp_path):
    pf = write_disk_phantom(tmp_path)
    out = str(tmp_path / "o")
    code = main(
        ["forward", "--phantom", pf, "--out", out, "--method", "radon", "--ntheta", "8", "--ns", "9"]
    )
    assert code == 0
    sino = read_radon_sinogram(os.path.join(out, "radon.sg"))
    assert np.allclose(sino.values[:, 4], 1.0)  # s = 0 column = diameter chord


def test_cli_forward_camera_grid(tmp_path):
    pf = write_disk_phantom(tmp_path)
    out = str(tmp_path / "o")
    code = main(
        ["forward", "--phantom", pf, "--out", out, "--perside", "3", "--nbeta", "8", "--npsi", "4"]
    )
    assert code == 0
    sino = read_cone_sinogram(os.path.join(out, "cone.sg"))
    assert sino.values.shape == (8, 8, 4)  # 4*(3-1) boundary detectors


def test_cli_usage_errors(tmp_path):
    pf = write_disk_phantom(tmp_path)
    out = str(tmp_path / "o")
    assert main(["forward", "--phantom", pf, "--out", out, "--npsi", "0"]) == 2
    assert main(["forward", "--phantom", pf, "--out", out, "--method", "laplace"]) == 2
    assert main(["forward", "--phantom", pf, "--out", out, "--vertex", "zero"]) == 2
    assert main(["forward", "--out", out]) == 2  # no phantom
    assert main(["reconstruct", "--phantom", str(tmp_path / "nope.txt"), "--out", out]) == 2
    assert main(["reconstruct", "--phantom", pf, "--out", out, "--method", "sirt"]) == 2
    assert main(["verify", "--out", out, "--identity", "asgeirsson", "--n", "5"]) == 2
    assert main(["verify", "--out", out, "--identity", "harmonic", "--n", "2"]) == 2
    assert main(["lambda", "--out", out, "--n", "7"]) == 2


def test_cli_reconstruct_fbp_report(tmp_path):
    pf = write_disk_phantom(tmp_path)
    out = str(tmp_path / "o")
    code = main(
        [
            "reconstruct", "--phantom", pf, "--out", out, "--method", "fbp",
            "--npx", "64", "--ntheta", "60", "--ns", "129", "--threshold", "0.2",
        ]
    )
    assert code == 0
    report = open(os.path.join(out, "report.csv")).read().splitlines()
    assert report[0] == "method,n_px,rel_l2"
    method, n_px, rel = report[1].split(",")
    assert method == "fbp" and n_px == "64"
    assert 0.0 < float(rel) < 0.2
    # an unreachable threshold flips the exit code
    code = main(
        [
            "reconstruct", "--phantom", pf, "--out", out, "--method", "fbp",
            "--npx", "64", "--ntheta", "60", "--ns", "129", "--threshold", "1e-9",
        ]
    )
    assert code == 1


def test_cli_reconstruct_aliases(tmp_path):
    pf = tmp_path / "blob.txt"
    pf.write_text("gauss 0 0 0.25 1\n")
    out = str(tmp_path / "o")
    code = main(
        [
            "reconstruct", "--phantom", str(pf), "--out", out, "--method", "mu-weighted",
            "--npx", "32", "--nbeta", "16", "--npsi", "32", "--threshold", "0.1",
        ]
    )
    assert code == 0
    report = open(os.path.join(out, "report.csv")).read()
    assert "thm2" in report


def test_cli_verify_deterministic_bytes(tmp_path):
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    args = ["verify", "--identity", "psi-integral", "--count", "3", "--seed", "9"]
    assert main(args + ["--out", out1]) == 0
    assert main(args + ["--out", out2]) == 0
    csv1 = open(os.path.join(out1, "verify.csv"), "rb").read()
    csv2 = open(os.path.join(out2, "verify.csv"), "rb").read()
    assert csv1 == csv2
    lines = csv1.decode().splitlines()
    assert lines[0] == "identity,case,lhs,rhs,rel_err,status"
    assert len(lines) == 4
    assert all(line.endswith("pass") for line in lines[1:])


def test_cli_verify_asgeirsson_dimension_filter(tmp_path):
    out = str(tmp_path / "o")
    code = main(["verify", "--out", out, "--identity", "asgeirsson", "--n", "3", "--count", "2"])
    assert code == 0
    lines = open(os.path.join(out, "verify.csv")).read().splitlines()[1:]
    assert lines and all(line.startswith("asgeirsson-3d") for line in lines)


def test_cli_lambda_table(tmp_path):
    out = str(tmp_path / "o")
    assert main(["lambda", "--out", out, "--mmax", "4", "--n", "2"]) == 0
    lines = open(os.path.join(out, "lambda.csv")).read().splitlines()
    assert lines[0] == "n,m,lambda,normalized"
    assert len(lines) == 6
    row0 = lines[1].split(",")
    assert float(row0[2]) == pytest.approx(4.0, abs=1e-10)
    assert float(row0[3]) == pytest.approx(2 / math.pi, abs=1e-10)
    row2 = lines[3].split(",")
    assert float(row2[2]) == pytest.approx(4.0 / 3.0, abs=1e-10)


def test_cli_config_file_and_flag_precedence(tmp_path):
    pf = write_disk_phantom(tmp_path)
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"phantom = {pf}\nnpx = 24\nextent = 1.5  # comment\n")
    out = str(tmp_path / "o")
    assert main(["phantom", "--config", str(cfg), "--out", out, "--npx", "16"]) == 0
    grid = read_image_raw(os.path.join(out, "phantom.raw"))
    assert grid.n_px == 16  # flag beats the file
    assert grid.half_extent == pytest.approx(1.5)
    echoed = open(os.path.join(out, "run.cfg")).read()
    assert "npx = 16" in echoed and "extent = 1.5" in echoed
    bad = tmp_path / "bad.cfg"
    bad.write_text("npx: 16\n")
    assert main(["phantom", "--config", str(bad), "--out", out]) == 2
    unknown = tmp_path / "unk.cfg"
    unknown.write_text("warp = 9\n")
    assert main(["phantom", "--config", str(unknown), "--out", out]) == 2
