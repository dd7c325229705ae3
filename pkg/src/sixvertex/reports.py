"""Run configuration, verification records, and file emission (JSON/CSV/SVG).

Outputs are deterministic: records serialize with sorted keys, the SVG writer
is hand-rolled (no plotting dependency), and writes go through an atomic
rename so concurrent commands never observe partial files.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .model import ModelParams

__all__ = [
    "ConfigError",
    "RunConfig",
    "VerificationReport",
    "default_tolerances",
    "atomic_write_text",
    "write_csv",
    "write_svg_line",
    "ResultCache",
]


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


def default_tolerances():
    return {
        "yang_baxter": 1e-12,
        "transfer_commute": 1e-10,
        "highest_weight": 1e-12,
        "exchange": 1e-11,
        "structure": 1e-14,
        "polynomial_fit": 1e-9,
        "linear_problem": 1e-10,
        "compatibility": 1e-8,
        "nonlinear_n1": 1e-8,
        "nonlinear_n2": 1e-8,
        "negative_control": 1e-3,
        "transport_loop": 1e-9,
        "factorization": 1e-8,
        "reduced_det": 1e-10,
        "reduced_det_spread": 1e-9,
        "theta_conservation": 1e-6,
        "conserved_constancy": 1e-8,
        "conserved_closed_form": 1e-7,
        "bethe_residual": 1e-12,
        "bethe_match": 1e-8,
        "riccati_n1": 1e-7,
        "sigma1": 1e-7,
        "sigma2": 1e-6,
        "riccati2": 1e-6,
        "riccati_h": 1e-9,
        "upsilon": 1e-13,
        "u_equation": 1e-6,
        "pde_ratio_low": 3.5,
        "pde_ratio_high": 4.5,
        "schrodinger": 1e-5,
        "root_of_unity_power": 1e-12,
        "root_of_unity_sector": 1e-9,
        "potential_reality": 1e-12,
    }


_REFERENCE_MODEL = {"L": 4, "gamma": 0.7, "mu": [0.0, 0.0, 0.0, 0.0],
                    "phi1": 1.0, "phi2": 1.0}


@dataclass
class RunConfig:
    """Validated run configuration; defaults embed the reference scenario
    (L=4, gamma=0.7, homogeneous, untwisted)."""

    model: ModelParams
    sectors: list
    tolerances: dict
    fd_step: float = 1e-5
    seed: int = 1234
    output_dir: Path = Path("out")
    checks: list = field(default_factory=list)
    perturb_lambda: float = 0.0

    @classmethod
    def from_dict(cls, d):
        try:
            model = ModelParams.from_dict(d.get("model", _REFERENCE_MODEL))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad model section: {exc}") from exc
        sectors = d.get("sectors", list(range(model.L + 1)))
        if not all(isinstance(n, int) and 0 <= n <= model.L for n in sectors):
            raise ConfigError(f"sectors must be integers in [0, {model.L}]: {sectors}")
        tol = default_tolerances()
        for k, v in d.get("tolerances", {}).items():
            if k not in tol:
                raise ConfigError(f"unknown tolerance name: {k}")
            if not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(f"tolerance {k} must be positive, got {v}")
            tol[k] = float(v)
        fd_step = float(d.get("fd_step", 1e-5))
        if fd_step <= 0:
            raise ConfigError("fd_step must be positive")
        return cls(
            model=model,
            sectors=list(sectors),
            tolerances=tol,
            fd_step=fd_step,
            seed=int(d.get("seed", 1234)),
            output_dir=Path(d.get("output_dir", "out")),
            checks=list(d.get("checks", [])),
            perturb_lambda=float(d.get("perturb_lambda", 0.0)),
        )

    @classmethod
    def from_file(cls, path):
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def reference(cls, **overrides):
        d = {"model": dict(_REFERENCE_MODEL)}
        d.update(overrides)
        return cls.from_dict(d)

    def content_key(self):
        """Hash of everything that influences numerical results."""
        from . import __version__
        payload = {
            "model": self.model.to_dict(),
            "sectors": self.sectors,
            "fd_step": self.fd_step,
            "seed": self.seed,
            "version": __version__,
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class VerificationReport:
    """One verified identity at one parameter point."""

    check: str
    identity: str
    residual: float
    tolerance: float
    parameters: dict = field(default_factory=dict)
    passed: bool = None
    wall_time: float = 0.0
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.passed is None:
            self.passed = bool(self.residual <= self.tolerance)

    def to_dict(self):
        d = asdict(self)
        d["residual"] = float(self.residual)
        d["tolerance"] = float(self.tolerance)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{status:4s}  {self.check:28s} {self.identity:34s} "
                f"residual={self.residual:11.3e}  tol={self.tolerance:.1e}")


# ---------------------------------------------------------------------------
# file emission

def atomic_write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+}j".replace("+-", "-")
    return str(v)


def write_svg_line(path, xs, series, labels=(), title="", width=720, height=480):
    """Minimal deterministic SVG line plot.

    series is a list of y-arrays (nan entries break the polyline, which is
    how pole locations appear in potential profiles).
    """
    xs = np.asarray(xs, dtype=float)
    ys_all = np.concatenate([np.asarray(ys, dtype=float) for ys in series])
    finite = ys_all[np.isfinite(ys_all)]
    if finite.size == 0:
        raise ValueError("nothing finite to plot")
    lo, hi = float(finite.min()), float(finite.max())
    if hi - lo < 1e-12:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    x0, x1 = float(xs.min()), float(xs.max())
    mleft, mright, mtop, mbot = 60, 20, 40, 45
    pw, ph = width - mleft - mright, height - mtop - mbot

    def px(x):
        return mleft + (x - x0) / (x1 - x0) * pw

    def py(y):
        return mtop + (hi - y) / (hi - lo) * ph

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{mleft}" y="{mtop}" width="{pw}" height="{ph}" fill="none" '
        'stroke="#888" stroke-width="1"/>',
    ]
    if title:
        parts.append(f'<text x="{width/2:.1f}" y="24" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="15">{title}</text>')
    # axis ticks: 5 per axis
    for k in range(5):
        xv = x0 + k * (x1 - x0) / 4
        yv = lo + k * (hi - lo) / 4
        parts.append(f'<line x1="{px(xv):.1f}" y1="{mtop+ph}" x2="{px(xv):.1f}" '
                     f'y2="{mtop+ph+5}" stroke="#444"/>')
        parts.append(f'<text x="{px(xv):.1f}" y="{mtop+ph+20}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{xv:.3g}</text>')
        parts.append(f'<line x1="{mleft-5}" y1="{py(yv):.1f}" x2="{mleft}" '
                     f'y2="{py(yv):.1f}" stroke="#444"/>')
        parts.append(f'<text x="{mleft-9}" y="{py(yv)+4:.1f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{yv:.3g}</text>')
    for si, ys in enumerate(series):
        ys = np.asarray(ys, dtype=float)
        color = colors[si % len(colors)]
        seg = []
        for x, y in zip(xs, ys):
            if np.isfinite(y):
                seg.append(f"{px(float(x)):.2f},{py(float(y)):.2f}")
            elif seg:
                parts.append(f'<polyline points="{" ".join(seg)}" fill="none" '
                             f'stroke="{color}" stroke-width="1.5"/>')
                seg = []
        if seg:
            parts.append(f'<polyline points="{" ".join(seg)}" fill="none" '
                         f'stroke="{color}" stroke-width="1.5"/>')
        if si < len(labels):
            parts.append(f'<text x="{mleft+10}" y="{mtop+18+16*si}" fill="{color}" '
                         f'font-family="sans-serif" font-size="12">{labels[si]}</text>')
    parts.append("</svg>")
    atomic_write_text(path, "\n".join(parts) + "\n")


# ---------------------------------------------------------------------------
# diagonalization cache

class ResultCache:
    """Content-addressed store for per-sector eigendecompositions."""

    def __init__(self, root):
        self.root = Path(root)

    def _path(self, key, n):
        return self.root / f"eig-{key}-n{n}.npz"

    def load_sector(self, key, n, params):
        from .spectrum import EigenSystem
        path = self._path(key, n)
        if not path.exists():
            return None
        try:
            data = np.load(path, allow_pickle=False)
        except (OSError, ValueError):
            return None
        return EigenSystem(
            params=params, n=n, x_star=complex(data["x_star"][0]),
            indices=list(data["indices"]), eigs=data["eigs"],
            right=data["right"], left=data["left"],
            degenerate_flags=data["flags"],
        )

    def store_sector(self, key, es):
        path = self._path(key, es.n)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".npz")
        os.close(fd)
        try:
            np.savez(tmp, x_star=np.array([es.x_star]), indices=np.array(es.indices),
                     eigs=es.eigs, right=es.right, left=es.left,
                     flags=es.degenerate_flags)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def sector(self, key, n, params, compute):
        es = self.load_sector(key, n, params)
        if es is None:
            es = compute()
            self.store_sector(key, es)
        return es


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0
