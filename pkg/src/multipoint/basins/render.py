"""Basin-of-attraction rendering and file output."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..bigreal import PrecisionContext
from ..problems import ComplexProblem, get_problem
from ..schemes.methods import MethodSpec, get_method
from . import _accel, kernels
from .kernels import NONE

BACKENDS = ("numba", "numpy", "python")

DEFAULT_PALETTE = ((255, 0, 0), (0, 255, 0), (0, 0, 255), (255, 255, 0),
                   (0, 255, 255), (255, 0, 255))
BLACK = (0, 0, 0)


@dataclass(frozen=True)
class BasinConfig:
    """Grid, iteration budget and colours for one basin picture.

    ``bounds`` is ``(re_min, re_max, im_min, im_max)``; ``resolution`` is
    ``(width, height)``.  ``precision`` switches the python backend to
    mpmath complex numbers with that many digits.
    """

    problem: ComplexProblem | str
    method: str
    bounds: tuple[float, float, float, float] = (-3.0, 3.0, -3.0, 3.0)
    resolution: tuple[int, int] = (256, 256)
    max_iterations: int = 100
    tolerance: float = 1e-3
    palette: tuple = DEFAULT_PALETTE
    param: float | None = None
    precision: int | None = None
    shade: bool = False

    def __post_init__(self):
        if isinstance(self.problem, str):
            object.__setattr__(self, "problem", get_problem(self.problem))
        if not isinstance(self.problem, ComplexProblem):
            raise ValueError(f"{self.problem.name} is not a polynomial problem")
        spec = get_method(self.method)
        if not spec.complex_capable:
            raise ValueError(f"method {spec.label} cannot run over complex numbers")
        w, h = self.resolution
        if int(w) != w or int(h) != h or w < 1 or h < 1:
            raise ValueError("resolution components must be integers >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError("max_iterations must be an integer >= 1")
        if len(self.palette) < len(self.problem.roots):
            raise ValueError("palette needs one colour per root")
        x0, x1, y0, y1 = self.bounds
        if not (x1 > x0 and y1 > y0):
            raise ValueError("bounds must satisfy re_min < re_max and im_min < im_max")

    @property
    def spec(self) -> MethodSpec:
        return get_method(self.method)

    @property
    def method_param(self) -> float:
        spec = self.spec
        return float(spec.param_default if self.param is None else self.param)

    def pixel_point(self, col: int, row: int) -> complex:
        """Centre of pixel ``(col, row)``; row 0 is the top edge."""
        x0, x1, y0, y1 = self.bounds
        w, h = self.resolution
        dx, dy = (x1 - x0) / w, (y1 - y0) / h
        return complex(x0 + (col + 0.5) * dx, y1 - (row + 0.5) * dy)

    def grid(self) -> np.ndarray:
        x0, x1, y0, y1 = self.bounds
        w, h = self.resolution
        dx, dy = (x1 - x0) / w, (y1 - y0) / h
        re = x0 + (np.arange(w) + 0.5) * dx
        im = y1 - (np.arange(h) + 0.5) * dy
        return re[None, :] + 1j * im[:, None]

    def describe(self) -> list[str]:
        x0, x1, y0, y1 = self.bounds
        return [
            f"method: {self.spec.label}",
            f"problem: {self.problem.name} ({self.problem.formula})",
            f"roots: {', '.join(repr(r) for r in self.problem.roots)}",
            f"bounds: [{x0!r}, {x1!r}] x [{y0!r}, {y1!r}]",
            f"resolution: {self.resolution[0]}x{self.resolution[1]}",
            f"max_iterations: {self.max_iterations}",
            f"tolerance: {self.tolerance!r}",
            f"param: {self.method_param!r}",
            f"precision: {self.precision or 'machine'}",
        ]


@dataclass
class BasinImage:
    config: BasinConfig
    assignment: np.ndarray  # (height, width) root index or NONE
    iterations: np.ndarray
    finals: np.ndarray = field(repr=False)
    backend: str = "numpy"

    @property
    def width(self) -> int:
        return self.config.resolution[0]

    @property
    def height(self) -> int:
        return self.config.resolution[1]

    def counts(self) -> dict[int, int]:
        """Pixels per root index, with ``NONE`` (-1) for non-convergent ones."""
        out = {k: int(np.count_nonzero(self.assignment == k))
               for k in range(len(self.config.problem.roots))}
        out[NONE] = int(np.count_nonzero(self.assignment == NONE))
        return out

    def converged(self) -> int:
        return int(np.count_nonzero(self.assignment != NONE))

    def fractions(self) -> dict[int, float]:
        total = self.width * self.height
        return {k: v / total for k, v in self.counts().items()}

    def rgb(self) -> np.ndarray:
        pal = np.array(list(self.config.palette) + [BLACK], dtype=np.float64)
        img = pal[self.assignment]  # NONE = -1 picks the trailing black
        if self.config.shade:
            scale = 1.0 - 0.75 * self.iterations / self.config.max_iterations
            img = img * scale[..., None]
        return np.rint(img).astype(np.uint8)


def _python_grid(config: BasinConfig, z0: np.ndarray):
    problem = config.problem
    if config.precision:
        ctx = PrecisionContext(config.precision)
        f, df = problem.bind(ctx)
        roots = [ctx.mpc(r) for r in problem.roots]
        param = ctx.mpf(config.method_param)
        convert = ctx.mpc
    else:
        f, df = problem.bind(None)
        roots = list(problem.roots)
        param = config.method_param
        convert = complex
    h, w = z0.shape
    assign = np.empty((h, w), dtype=np.int32)
    iters = np.empty((h, w), dtype=np.int32)
    finals = np.empty((h, w), dtype=complex)
    for i in range(h):
        for j in range(w):
            k, n, x = kernels.python_orbit(config.spec, f, df, convert(z0[i, j]), roots,
                                           config.max_iterations, config.tolerance, param)
            assign[i, j], iters[i, j], finals[i, j] = k, n, complex(x)
    return assign, iters, finals


def _resolve_backend(config: BasinConfig, backend: str | None) -> str:
    if config.precision:
        return "python"
    backend = backend or _accel.default_backend()
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
    if backend == "numba" and not _accel.numba_enabled():
        backend = "numpy"
    return backend


def render_basin(config: BasinConfig, backend: str | None = None) -> BasinImage:
    """Classify the centre of every pixel; deterministic for a fixed config and backend."""
    backend = _resolve_backend(config, backend)
    z0 = config.grid()
    problem = config.problem
    if backend == "numba":
        result = kernels.numba_render(config.spec, problem.coefficients, problem.roots, z0,
                                      config.max_iterations, config.tolerance, config.method_param)
    elif backend == "numpy":
        result = kernels.numpy_render(config.spec, problem.coefficients, problem.roots, z0,
                                      config.max_iterations, config.tolerance, config.method_param)
    else:
        result = _python_grid(config, z0)
    return BasinImage(config, *result, backend=backend)


def orbit(method: str, problem: ComplexProblem | str, z0: complex, max_iterations: int = 100,
          tolerance: float = 1e-3, param: float | None = None, backend: str | None = None):
    """``(root_index, iterations, final_point)`` for a single start point."""
    config = BasinConfig(problem, method, resolution=(1, 1), max_iterations=max_iterations,
                         tolerance=tolerance, param=param)
    backend = _resolve_backend(config, backend)
    prob = config.problem
    args = (config.max_iterations, config.tolerance, config.method_param)
    if backend == "numba":
        return kernels.numba_orbit(config.spec, prob.coefficients, prob.roots, z0, *args)
    if backend == "numpy":
        a, n, x = kernels.numpy_render(config.spec, prob.coefficients, prob.roots,
                                       np.array([complex(z0)]), *args)
        return int(a[0]), int(n[0]), complex(x[0])
    f, df = prob.bind(None)
    return kernels.python_orbit(config.spec, f, df, complex(z0), list(prob.roots), *args)


def classify_orbit(method: str, problem: ComplexProblem | str, z0: complex,
                   max_iterations: int = 100, tolerance: float = 1e-3,
                   param: float | None = None, backend: str | None = None) -> tuple[int, int]:
    """``(root index or NONE, iterations used)`` for one start point."""
    k, n, _ = orbit(method, problem, z0, max_iterations, tolerance, param, backend)
    return k, n


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def ppm_bytes(image: BasinImage) -> bytes:
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + image.rgb().tobytes()


def write_ppm(image: BasinImage, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes(ppm_bytes(image))
    return path


def basin_csv_text(image: BasinImage) -> str:
    cfg = image.config
    lines = ["col,row,re,im,root_index,iterations"]
    for row in range(image.height):
        for col in range(image.width):
            z = cfg.pixel_point(col, row)
            lines.append(f"{col},{row},{z.real!r},{z.imag!r},"
                         f"{image.assignment[row, col]},{image.iterations[row, col]}")
    return "\n".join(lines) + "\n"


def write_basin_csv(image: BasinImage, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(basin_csv_text(image), encoding="ascii")
    return path


def sidecar_text(image: BasinImage) -> str:
    counts = image.counts()
    total = image.width * image.height
    lines = image.config.describe() + [f"backend: {image.backend}"]
    for k, root in enumerate(image.config.problem.roots):
        lines.append(f"root {k} {root!r}: {counts[k]} pixels ({counts[k] / total:.6f})")
    lines.append(f"none: {counts[NONE]} pixels ({counts[NONE] / total:.6f})")
    return "\n".join(lines) + "\n"


def write_sidecar(image: BasinImage, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(sidecar_text(image), encoding="ascii")
    return path


def save_basin(image: BasinImage, stem: str | Path) -> dict[str, Path]:
    """Write ``<stem>.ppm``, ``<stem>.csv`` and ``<stem>.txt``."""
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    return {
        "ppm": write_ppm(image, stem.with_suffix(".ppm")),
        "csv": write_basin_csv(image, stem.with_suffix(".csv")),
        "txt": write_sidecar(image, stem.with_suffix(".txt")),
    }
