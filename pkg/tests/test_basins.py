import os
import subprocess
import sys

import numpy as np
import pytest

from multipoint.basins import (
    ENV_FLAG, NONE, BasinConfig, classify_orbit, default_backend, orbit, render_basin,
    save_basin,
)
from multipoint.basins import _accel
from multipoint.basins.render import basin_csv_text, ppm_bytes, sidecar_text
from multipoint.problems import builtin_polynomials, get_problem
from multipoint.schemes import method_labels

BACKENDS = ["numpy", "python"] + (["numba"] if _accel.numba_enabled() else [])
FIGURE_METHODS = ["d4", "KT", "NNNN", "d7", "d9"]


def mirror_ok(image):
    """Pixel-exact conjugation symmetry: row r and row h-1-r hold conjugate roots."""
    problem = image.config.problem
    conj = np.array([problem.conjugate_index(k) for k in range(len(problem.roots))] + [NONE])
    a = image.assignment
    flipped = a[::-1]
    return (np.array_equal(conj[flipped], a)
            and np.array_equal(image.iterations[::-1], image.iterations))


def test_pixel_centres():
    cfg = BasinConfig("p1", "d4", resolution=(4, 2))
    assert cfg.pixel_point(0, 0) == complex(-2.25, 1.5)
    assert cfg.pixel_point(3, 1) == complex(2.25, -1.5)
    grid = cfg.grid()
    assert grid.shape == (2, 4)
    assert all(grid[r, c] == cfg.pixel_point(c, r) for r in range(2) for c in range(4))


@pytest.mark.parametrize("kwargs", [
    dict(problem="f1"), dict(resolution=(0, 4)), dict(tolerance=0), dict(max_iterations=0),
    dict(bounds=(1, -1, -3, 3)), dict(palette=((1, 2, 3),)),
])
def test_invalid_config(kwargs):
    base = dict(problem="p1", method="d4")
    base.update(kwargs)
    with pytest.raises(ValueError):
        BasinConfig(**base)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("problem", ["p1", "p2", "p3"])
def test_render_invariants(backend, problem):
    cfg = BasinConfig(problem, "d4", resolution=(24, 24) if backend == "python" else (64, 64))
    image = render_basin(cfg, backend=backend)
    assert image.backend == backend
    counts = image.counts()
    assert sum(counts.values()) == image.width * image.height
    assert mirror_ok(image)
    roots = np.array(cfg.problem.roots)
    hit = image.assignment != NONE
    dist = np.abs(image.finals[hit] - roots[image.assignment[hit]])
    assert np.all(dist < cfg.tolerance)
    assert np.all(image.iterations[~hit] == cfg.max_iterations)


@pytest.mark.parametrize("label", method_labels())
def test_backends_agree(label):
    cfg = BasinConfig("p3", label, resolution=(24, 24), max_iterations=40)
    ref = render_basin(cfg, backend="python").assignment
    for backend in BACKENDS[:1] + BACKENDS[2:]:
        other = render_basin(cfg, backend=backend).assignment
        # chaotic pixels near basin boundaries may flip with last-bit differences
        assert np.mean(other == ref) >= 0.97, backend


def test_high_precision_mode():
    cfg = BasinConfig("p2", "KT", resolution=(6, 6), precision=30)
    image = render_basin(cfg)
    assert image.backend == "python"
    assert np.mean(image.assignment == render_basin(
        BasinConfig("p2", "KT", resolution=(6, 6)), backend="python").assignment) >= 0.9


@pytest.mark.parametrize("backend", BACKENDS)
def test_classify_orbit_examples(backend):
    k, n = classify_orbit("four_point_W2", "p3", 0.8, backend=backend)
    assert k == 2 and n >= 1
    # f'(0) = 0 for z^2 + 1
    assert classify_orbit("d4", "p1", 0j, max_iterations=17, backend=backend) == (NONE, 17)
    # overflow to infinity classifies as NONE
    assert classify_orbit("d4", "p1", 1e300 + 1e300j, backend=backend)[0] == NONE
    a = classify_orbit("KT", "p1", 1.0, backend=backend)
    b = classify_orbit("KT", "p1", complex(1.0, -0.0), backend=backend)
    assert a[1] == b[1]


@pytest.mark.parametrize("problem", builtin_polynomials(), ids=lambda p: p.name)
def test_conjugation_symmetry_random_points(problem):
    rng = np.random.default_rng(7)
    pts = rng.uniform(-3, 3, 1000) + 1j * rng.uniform(-3, 3, 1000)
    backend = BACKENDS[-1]
    for label in ("d4", "d9"):
        for z in pts:
            k, n, _ = orbit(label, problem, z, backend=backend)
            kc, nc, _ = orbit(label, problem, z.conjugate(), backend=backend)
            expect = NONE if k == NONE else problem.conjugate_index(k)
            assert (kc, nc) == (expect, n)


def test_ppm_and_csv(tmp_path):
    cfg = BasinConfig("p1", "d4", resolution=(8, 6), max_iterations=5)
    image = render_basin(cfg, backend="numpy")
    image.assignment[0, 0] = NONE
    image.iterations[0, 0] = cfg.max_iterations
    data = ppm_bytes(image)
    header = b"P6\n8 6\n255\n"
    assert data.startswith(header) and len(data) == len(header) + 8 * 6 * 3
    assert data[len(header):len(header) + 3] == b"\x00\x00\x00"
    rows = basin_csv_text(image).splitlines()
    assert rows[0] == "col,row,re,im,root_index,iterations"
    assert rows[1] == f"0,0,-2.625,2.5,-1,{cfg.max_iterations}"
    assert len(rows) == 1 + 48
    paths = save_basin(image, tmp_path / "sub" / "b")
    assert sorted(p.suffix for p in paths.values()) == [".csv", ".ppm", ".txt"]
    assert f"none: {image.counts()[NONE]} pixels" in sidecar_text(image)


def test_palette_and_shading():
    cfg = BasinConfig("p1", "d4", resolution=(4, 4), shade=True)
    image = render_basin(cfg, backend="numpy")
    rgb = image.rgb()
    plain = render_basin(BasinConfig("p1", "d4", resolution=(4, 4)), backend="numpy").rgb()
    assert set(map(tuple, plain.reshape(-1, 3))) <= {(255, 0, 0), (0, 255, 0), (0, 0, 0)}
    assert np.all(rgb <= plain)


def test_render_is_deterministic():
    cfg = BasinConfig("p3", "d7", resolution=(32, 32))
    for backend in BACKENDS:
        a, b = render_basin(cfg, backend=backend), render_basin(cfg, backend=backend)
        assert ppm_bytes(a) == ppm_bytes(b)
        assert basin_csv_text(a) == basin_csv_text(b)


def test_env_flag_selects_numpy():
    code = "from multipoint.basins import default_backend; print(default_backend())"
    env = dict(os.environ, **{ENV_FLAG: "1"})
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "numpy"
    if _accel.numba_available() and not os.environ.get(ENV_FLAG):
        assert default_backend() == "numba"


def test_figure_methods_on_default_grid_p2():
    # geum_kim1 leaves more non-convergent pixels than kung_traub16 on p2
    backend = BACKENDS[-1]
    d7 = render_basin(BasinConfig("p2", "geum_kim1"), backend=backend).counts()[NONE]
    kt = render_basin(BasinConfig("p2", "kung_traub16"), backend=backend).counts()[NONE]
    assert d7 > kt
