"""Smoke tests for the Python bindings and the command-line tool."""

import json
import math
import os
import subprocess

import pytest

qdzip = pytest.importorskip("qdzip")


def test_domain_factories_and_io(tmp_path):
    dom = qdzip.Domain.disc(grid=256)
    assert dom.connectivity == 1
    assert dom.grid == 256
    assert abs(dom.area - math.pi) < 1e-10
    assert dom.contains(0.3 + 0.4j)
    assert not dom.contains(2.0 + 0j)

    path = tmp_path / "disc.json"
    dom.save(str(path))
    back = qdzip.Domain.load(str(path))
    assert back.to_json() == dom.to_json()

    ann = qdzip.Domain.annulus(0.5, grid=256)
    assert ann.connectivity == 2
    assert abs(ann.area - math.pi * 0.75) < 1e-10


def test_disc_szego_closed_form():
    dom = qdzip.Domain.disc(grid=256)
    solver = qdzip.KernelSolver(dom)
    s = solver.szego(0j)
    assert abs(s.at_base - 1 / (2 * math.pi)) < 1e-10
    assert abs(s(0.2 + 0.1j) - 1 / (2 * math.pi)) < 1e-8


def test_disc_bergman_and_ahlfors():
    dom = qdzip.Domain.disc(grid=256)
    solver = qdzip.KernelSolver(dom)
    kb = qdzip.BergmanKernel(solver)
    z = 0.1 + 0j
    exact = 1 / (math.pi * (1 - abs(z) ** 2) ** 2)
    assert abs(kb(z, z) - exact) < 1e-6

    f = solver.ahlfors(0.3 + 0j)
    w = 0.5 + 0.2j
    target = (w - 0.3) / (1 - 0.3 * w)
    assert abs(f(w) - target) < 1e-8
    assert f.max_modulus_defect < 1e-8


def test_map_and_archive_round_trip():
    dom = qdzip.Domain.annulus(0.5, grid=256)
    solver = qdzip.KernelSolver(dom)
    mp = qdzip.build_map_scattered(solver, 0.7 + 0j)
    assert mp.id_defect_c1 < 1e-3

    data = qdzip.quadrature_data(mp)
    assert len(data.nodes) >= 1
    residuals = qdzip.verify_quadrature(mp, data, 8)
    assert max(residuals) < 1e-6

    ar = qdzip.pack(mp, data)
    text = qdzip.archive_to_json(ar)
    ar2 = qdzip.archive_from_json(text)
    assert qdzip.archive_to_json(ar2) == text
    assert ar.raw_bytes > ar.compressed_bytes

    with pytest.raises(qdzip.IoError):
        qdzip.archive_from_json(text.replace("0", "1", 1))


def test_cli_kernels(tmp_path):
    cli = os.environ.get("QDZIP_CLI")
    if not cli:
        pytest.skip("QDZIP_CLI not set")
    dom = qdzip.Domain.disc(grid=256)
    path = tmp_path / "disc.json"
    dom.save(str(path))
    out = tmp_path / "out"
    proc = subprocess.run(
        [cli, "kernels", "--domain", str(path), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    report = json.loads((out / "kernels_report.json").read_text())
    assert report["pass"] is True
