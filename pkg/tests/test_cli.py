import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from pmrecon.cli import main
from pmrecon.io import read_image, read_ksp, read_mask


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def pipeline_files(tmp_path):
    k, truth, mask = tmp_path / "full.ksp", tmp_path / "truth.npy", tmp_path / "mask.json"
    assert run("phantom", "--rows", 64, "--cols", 64, "--coils", 4, "--seed", 0, "--out", k, "--truth", truth) == 0
    assert run("mask", "--cols", 64, "--accel", 4, "--out", mask) == 0
    return tmp_path, k, truth, mask


def test_mask_command(tmp_path):
    out = tmp_path / "m.json"
    assert run("mask", "--cols", 8, "--accel", 4, "--acs", 2, "--out", out) == 0
    assert json.loads(out.read_text())["sampled"] == [0, 3, 4]


def test_usage_errors(tmp_path, capsys):
    assert run("mask", "--cols", 8, "--accel", 4, "--bogus", 1, "--out", tmp_path / "m") == 1
    assert run("frobnicate") == 1
    assert run("recon", "sense", "--in", "a", "--mask", "b", "--out-image", "c") == 1
    assert "usage" in capsys.readouterr().err


def test_data_errors(tmp_path, capsys):
    assert run("undersample", "--in", tmp_path / "missing.ksp", "--mask", tmp_path / "m", "--out", tmp_path / "o") == 2
    bad = tmp_path / "bad.ksp"
    bad.write_bytes(b"XXXX" + bytes(40))
    run("mask", "--cols", 8, "--accel", 2, "--out", tmp_path / "m.json")
    assert run("recon", "zerofill", "--in", bad, "--mask", tmp_path / "m.json", "--out-image", tmp_path / "i.npy") == 2
    assert "bad magic" in capsys.readouterr().err


def test_grappa_without_acs_exits_2(pipeline_files, capsys):
    tmp, k, _, _ = pipeline_files
    mask = tmp / "noacs.json"
    assert run("mask", "--cols", 64, "--accel", 4, "--acs", 0, "--out", mask) == 0
    assert run("recon", "grappa", "--in", k, "--mask", mask, "--out-image", tmp / "g.npy") == 2
    assert "ACS too small for GRAPPA: need at least 5 ACS columns" in capsys.readouterr().err


def test_undersample_and_recon(pipeline_files):
    tmp, k, truth, mask = pipeline_files
    under = tmp / "under.ksp"
    assert run("undersample", "--in", k, "--mask", mask, "--out", under) == 0
    m = read_mask(mask)
    data = read_ksp(under)
    assert not np.any(data[..., ~m.sampled])
    for method in ("grappa", "pdhg", "zerofill"):
        assert run("recon", method, "--in", under, "--mask", mask,
                   "--out-image", tmp / f"{method}.pgm", "--out-kspace", tmp / f"{method}.ksp") == 0
        assert read_ksp(tmp / f"{method}.ksp").shape == (4, 64, 64)
    grappa_k = read_ksp(tmp / "grappa.ksp")
    assert np.array_equal(grappa_k[..., m.sampled], data[..., m.sampled])
    assert (tmp / "grappa.pgm").read_bytes().startswith(b"P5\n64 64\n65535\n")


def test_eval(pipeline_files):
    tmp, k, truth, mask = pipeline_files
    assert run("recon", "zerofill", "--in", k, "--mask", mask, "--out-image", tmp / "zf.npy") == 0
    assert run("eval", "--recon", tmp / "zf.npy", "--ref", truth, "--out", tmp / "ev.json") == 0
    doc = json.loads((tmp / "ev.json").read_text())
    assert doc["methods"][0]["method"] == "recon"
    assert doc["methods"][0]["psnr_db"] < 30


def test_compare_pipeline(pipeline_files):
    tmp, k, truth, mask = pipeline_files
    assert run("compare", "--in", k, "--mask", mask, "--ref", truth, "--out", tmp / "cmp.json") == 0
    rows = list(csv.DictReader((tmp / "cmp.csv").open()))
    assert [r["method"] for r in rows] == ["grappa", "pdhg", "zerofill"]
    assert list(rows[0]) == ["method", "accel", "acs", "psnr_db", "ssim", "runtime_s"]
    psnr = {r["method"]: float(r["psnr_db"]) for r in rows}
    assert psnr["grappa"] > psnr["zerofill"] and psnr["pdhg"] > psnr["zerofill"]
    assert all(r["runtime_s"] == "" for r in rows)


def test_compare_timing_flag(pipeline_files):
    tmp, k, truth, mask = pipeline_files
    assert run("compare", "--in", k, "--mask", mask, "--ref", truth, "--out", tmp / "t.json", "--timing") == 0
    rows = list(csv.DictReader((tmp / "t.csv").open()))
    assert all(float(r["runtime_s"]) >= 0 for r in rows)


def test_noise_flag(tmp_path):
    a, b = tmp_path / "a.ksp", tmp_path / "b.ksp"
    run("phantom", "--rows", 32, "--cols", 32, "--coils", 2, "--out", a)
    run("phantom", "--rows", 32, "--cols", 32, "--coils", 2, "--out", b, "--noise-sigma", 0.5)
    assert np.std(read_ksp(b) - read_ksp(a)) > 0.4


def _cli_run_all(workdir, threads):
    env = dict(os.environ)
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        env[var] = str(threads)
    py = [sys.executable, "-m", "pmrecon"]
    steps = [
        ["phantom", "--rows", "64", "--cols", "64", "--coils", "4", "--seed", "2",
         "--out", "full.ksp", "--truth", "truth.npy", "--noise-sigma", "0.01"],
        ["mask", "--cols", "64", "--accel", "4", "--out", "mask.json"],
        ["undersample", "--in", "full.ksp", "--mask", "mask.json", "--out", "under.ksp"],
        ["recon", "grappa", "--in", "under.ksp", "--mask", "mask.json", "--out-image", "g.pgm", "--out-kspace", "g.ksp"],
        ["recon", "pdhg", "--in", "under.ksp", "--mask", "mask.json", "--out-image", "p.npy"],
        ["compare", "--in", "under.ksp", "--mask", "mask.json", "--ref", "truth.npy", "--out", "report.json"],
    ]
    workdir.mkdir()
    for step in steps:
        subprocess.run(py + step, cwd=workdir, env=env, check=True)
    return {p.name: p.read_bytes() for p in sorted(workdir.iterdir())}


def test_byte_reproducible_across_runs_and_threads(tmp_path):
    first = _cli_run_all(tmp_path / "a", 1)
    again = _cli_run_all(tmp_path / "b", 1)
    threaded = _cli_run_all(tmp_path / "c", 4)
    assert set(first) >= {"full.ksp", "g.pgm", "g.ksp", "p.npy", "report.json", "report.csv"}
    assert first == again == threaded
