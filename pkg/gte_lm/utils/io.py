"""
Text file formats for tensors, vectors and problem manifests.

Tensor file: first line ``l n``, then ``n**l`` entries in lexicographic index
order, whitespace separated. Vector file: first line ``n``, then ``n`` entries.
Values are written with 17 significant digits so a round trip is exact.

Problem manifest (YAML)::

    dim: 20
    kind: MTensor          # optional
    omega: 12.3            # optional scaling factor already applied
    coefficients: [A1.tensor, A2.tensor]
    rhs: b.vector
    x_star: x_star.vector  # optional planted solution

Relative paths are resolved against the manifest's directory.
"""

from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
import yaml

from ..exceptions import FileFormatError, GteError
from ..models import ProblemKind
from ..problem import GteProblem, ProblemInstance
from ..tensor import DenseTensor

PathLike = Union[str, Path]


def _format(value: float) -> str:
    return format(float(value), ".17g")


def _read_numeric_file(path: PathLike, header_len: int) -> Tuple[List[int], List[float], int, int]:
    """Header integers, entries, the header's line number and the last data line number."""
    path = Path(path)
    header: List[int] = []
    header_line = 0
    last_line = 0
    values: List[float] = []

    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if not header:
                if len(tokens) != header_len:
                    raise FileFormatError(path, lineno, f"expected a header of {header_len} integer(s), got {line!r}")
                try:
                    header = [int(tok) for tok in tokens]
                except ValueError:
                    raise FileFormatError(path, lineno, f"header must be integers, got {line!r}") from None
                header_line = lineno
                continue
            for tok in tokens:
                try:
                    values.append(float(tok))
                except ValueError:
                    raise FileFormatError(path, lineno, f"invalid number {tok!r}") from None
            last_line = lineno

    if not header:
        raise FileFormatError(path, 1, "file is empty")
    return header, values, header_line, last_line or header_line


def read_tensor(path: PathLike) -> DenseTensor:
    header, values, header_line, last_line = _read_numeric_file(path, 2)
    order, dim = header
    if order < 2 or dim < 1:
        raise FileFormatError(path, header_line, f"invalid tensor header: order {order}, dim {dim}")
    expected = dim ** order
    if len(values) != expected:
        raise FileFormatError(path, last_line, f"expected {expected} entries for order {order} dim {dim}, found {len(values)}")
    try:
        return DenseTensor(order, dim, np.array(values))
    except GteError as e:
        raise FileFormatError(path, None, str(e)) from e


def write_tensor(path: PathLike, A: DenseTensor):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{A.order} {A.dim}\n")
        for value in A.entries:
            f.write(_format(value) + "\n")


def read_vector(path: PathLike) -> np.ndarray:
    header, values, header_line, last_line = _read_numeric_file(path, 1)
    (n,) = header
    if n < 1:
        raise FileFormatError(path, header_line, f"invalid vector length {n}")
    if len(values) != n:
        raise FileFormatError(path, last_line, f"expected {n} entries, found {len(values)}")
    vec = np.array(values)
    if not np.all(np.isfinite(vec)):
        raise FileFormatError(path, None, "vector entries must be finite")
    return vec


def write_vector(path: PathLike, x):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    vec = np.asarray(x, dtype=float).ravel()
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{vec.shape[0]}\n")
        for value in vec:
            f.write(_format(value) + "\n")


def load_problem(manifest_path: PathLike) -> ProblemInstance:
    """Load and validate a problem manifest."""
    manifest_path = Path(manifest_path)
    with open(manifest_path, "r", encoding="utf-8") as f:
        try:
            manifest = yaml.safe_load(f)
        except yaml.YAMLError as e:
            line = getattr(getattr(e, "problem_mark", None), "line", None)
            raise FileFormatError(manifest_path, None if line is None else line + 1, f"invalid YAML: {e}") from e

    if not isinstance(manifest, dict):
        raise FileFormatError(manifest_path, None, "manifest must be a mapping")
    for key in ("dim", "coefficients", "rhs"):
        if key not in manifest:
            raise FileFormatError(manifest_path, None, f"missing required key {key!r}")

    base = manifest_path.parent
    coeff_files = manifest["coefficients"]
    if not isinstance(coeff_files, list) or not coeff_files:
        raise FileFormatError(manifest_path, None, "'coefficients' must be a nonempty list of tensor files")

    dim = int(manifest["dim"])
    coeffs = [read_tensor(base / name) for name in coeff_files]
    for name, coeff in zip(coeff_files, coeffs):
        if coeff.dim != dim:
            raise FileFormatError(manifest_path, None, f"{name} has dim {coeff.dim}, manifest says {dim}")
    rhs = read_vector(base / manifest["rhs"])
    if rhs.shape[0] != dim:
        raise FileFormatError(manifest_path, None, f"rhs has length {rhs.shape[0]}, manifest says {dim}")

    try:
        problem = GteProblem(tuple(coeffs), rhs)
    except GteError as e:
        raise FileFormatError(manifest_path, None, str(e)) from e

    kind = manifest.get("kind")
    try:
        kind = ProblemKind(kind) if kind else None
    except ValueError:
        raise FileFormatError(manifest_path, None, f"unknown problem kind {kind!r}") from None
    x_star = manifest.get("x_star")
    return ProblemInstance(
        problem=problem,
        kind=kind,
        omega=float(manifest.get("omega", 1.0)),
        x_star=read_vector(base / x_star) if x_star else None,
    )


def save_problem(out_dir: PathLike, instance: ProblemInstance, name: str = "problem") -> Path:
    """Write tensors, vectors and the manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    problem = instance.problem

    coeff_files = []
    for k, coeff in enumerate(problem.coeffs, start=1):
        fname = f"{name}_A{k}.tensor"
        write_tensor(out_dir / fname, coeff)
        coeff_files.append(fname)
    write_vector(out_dir / f"{name}_b.vector", problem.rhs)

    manifest = {
        "dim": problem.dim,
        "coefficients": coeff_files,
        "rhs": f"{name}_b.vector",
        "omega": float(instance.omega),
    }
    if instance.kind is not None:
        manifest["kind"] = instance.kind.value
    if instance.x_star is not None:
        write_vector(out_dir / f"{name}_x_star.vector", instance.x_star)
        manifest["x_star"] = f"{name}_x_star.vector"

    manifest_path = out_dir / f"{name}.yaml"
    with open(manifest_path, "w", encoding="utf-8") as f:
        yaml.safe_dump(manifest, f, sort_keys=False)
    return manifest_path
