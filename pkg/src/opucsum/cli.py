"""Command-line runner: ``opucsum {density,sumrule-scan,exponent-fit,verify}``.

Every artifact is a CSV whose leading ``#`` lines echo the configuration, so
identical flags give byte-identical files.  Exit codes: 0 pass, 1 property
violation, 2 configuration error, 3 inconclusive classification.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, inequalities, pruefer, sumrule, szego
from .verblunsky import VerblunskySequence, power_sequence, test_sequence

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_INCONCLUSIVE = 3

COMMANDS = ("density", "sumrule-scan", "exponent-fit", "verify")

# per-command defaults for flags whose meaning depends on the command
DEFAULTS = {
    "density": dict(theta_min=0.1, grid_points=200, N=[10**4], out="density.csv"),
    "sumrule-scan": dict(theta_min=math.pi * 2.0**-14, grid_points=2**14, N=[10**3, 10**4, 10**5],
                         out="sumrule_scan.csv"),
    "exponent-fit": dict(theta_min=1e-2, grid_points=40, N=[10**5], out="exponent_fit.csv"),
    "verify": dict(theta_min=math.pi * 2.0**-14, grid_points=2**14, N=[10**4], out="verify_replay.csv"),
}

log = logging.getLogger("opucsum")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    m: int = 1
    seq: str = "test"
    beta: list = field(default_factory=lambda: [0.2, 0.3])
    c: float = 0.7
    N: list = field(default_factory=list)
    theta_min: float | None = None
    grid_points: int | None = None
    refine_levels: int = 3
    out: str | None = None
    seed: int = 0
    trials: int = 10**5
    jobs: int | None = None

    def validate(self) -> "ExperimentConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown {self.command!r}")
        d = DEFAULTS[self.command]
        if not self.N:
            self.N = list(d["N"])
        if self.theta_min is None:
            self.theta_min = d["theta_min"]
        if self.grid_points is None:
            self.grid_points = d["grid_points"]
        if self.out is None:
            self.out = d["out"]
        if self.jobs is None:
            self.jobs = os.cpu_count() or 1

        if int(self.m) != self.m or self.m < 0:
            raise ConfigError(f"m: must be a nonnegative integer, got {self.m}")
        if self.seq not in ("test", "power"):
            raise ConfigError(f"seq: must be 'test' or 'power', got {self.seq!r}")
        if self.seq == "test" and self.m < 1 and self.command in ("density", "exponent-fit"):
            raise ConfigError("m: the test sequence needs m >= 1")
        if not 0 < self.c < 1:
            raise ConfigError(f"c: must lie in (0, 1), got {self.c}")
        if self.command == "sumrule-scan" and not self.beta:
            raise ConfigError("beta: empty list")
        if any(not b > 0 for b in self.beta):
            raise ConfigError(f"beta: values must be positive, got {self.beta}")
        if any(n < 1 for n in self.N):
            raise ConfigError(f"N: values must be positive, got {self.N}")
        if self.command != "sumrule-scan" and len(self.N) != 1:
            raise ConfigError(f"N: {self.command} takes a single N, got {self.N}")
        if not self.theta_min > 0:
            raise ConfigError(f"theta-min: must be positive, got {self.theta_min}")
        if self.grid_points < 3:
            raise ConfigError(f"grid-points: must be >= 3, got {self.grid_points}")
        if self.refine_levels < 3:
            raise ConfigError(f"refine-levels: must be >= 3, got {self.refine_levels}")
        if self.trials < 1:
            raise ConfigError(f"trials: must be >= 1, got {self.trials}")
        if self.jobs < 1:
            raise ConfigError(f"jobs: must be >= 1, got {self.jobs}")
        if self.command == "density" and self.theta_min >= math.pi:
            raise ConfigError(f"theta-min: must be < pi for the density grid, got {self.theta_min}")
        if self.command == "exponent-fit" and self.theta_min * 10 > math.pi / 4:
            raise ConfigError(f"theta-min: the fit spans [theta-min, 10 theta-min] within (0, pi/4]")
        if self.command in ("sumrule-scan", "verify"):
            try:
                self.grid()
            except ValueError as exc:
                raise ConfigError(f"grid-points/theta-min/refine-levels: {exc}") from None
        return self

    def sequence(self, N: int) -> VerblunskySequence:
        if self.seq == "test":
            return test_sequence(self.m, N)
        return power_sequence(self.beta[0], self.c, N)

    def grid(self) -> sumrule.QuadratureGrid:
        return sumrule.QuadratureGrid(points=self.grid_points, theta_min=self.theta_min,
                                      refine_levels=self.refine_levels)

    def header(self) -> list[str]:
        cfg = {k: v for k, v in asdict(self).items() if k not in ("out", "jobs")}
        return [f"opucsum {__version__}", "config " + " ".join(f"{k}={v}" for k, v in cfg.items())]


def _atomic_write(path: str, writer) -> Path:
    """Write via a temp file in the target directory; nothing is left behind on failure."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def run_density(cfg: ExperimentConfig) -> int:
    seq = cfg.sequence(cfg.N[0])
    eta = np.linspace(cfg.theta_min, 2 * math.pi - cfg.theta_min, cfg.grid_points)
    lim = pruefer.log_density_limit(seq, eta)
    _atomic_write(cfg.out, lambda p: pruefer.write_log_density_csv(lim, p, cfg.header()))
    print(f"wrote {cfg.out}: {eta.size} rows, max fluctuation {lim.fluctuation.max():.3g}, "
          f"{np.count_nonzero(~lim.converged)} above tol {lim.tol:g}")
    return EXIT_OK


def run_sumrule_scan(cfg: ExperimentConfig) -> int:
    grid = cfg.grid()
    rows = sumrule.equivalence_experiment(cfg.m, cfg.beta, cfg.N, c=cfg.c, grid=grid)
    scan = sumrule.scan_grid(power_sequence(cfg.beta[0], cfg.c, 1), grid)
    header = cfg.header() + [f"quadrature {scan.describe()}"]
    _atomic_write(cfg.out, lambda p: sumrule.write_report_csv(rows, p, header))
    labels = {}
    for r in rows:
        labels[r.beta] = r.classification
    for beta, label in labels.items():
        print(f"m={cfg.m} beta={beta:g}: {label}")
    return EXIT_INCONCLUSIVE if sumrule.INCONCLUSIVE in labels.values() else EXIT_OK


def run_exponent_fit(cfg: ExperimentConfig) -> int:
    seq = cfg.sequence(cfg.N[0])
    theta = np.geomspace(10 * cfg.theta_min, cfg.theta_min, cfg.grid_points)
    fit = sumrule.exponent_fit(seq, theta)

    def write(p):
        with open(p, "w", newline="") as fh:
            for line in cfg.header():
                fh.write(f"# {line}\n")
            fh.write(f"# slope={fit.slope!r} intercept={fit.intercept!r} residual={fit.residual!r}\n")
            fh.write("theta,log_w\n")
            for t, lw in zip(fit.theta, fit.log_w):
                fh.write(f"{t!r},{float(lw)!r}\n")

    _atomic_write(cfg.out, write)
    print(f"slope {fit.slope:.4f} (intercept {fit.intercept:.4f}, residual {fit.residual:.3g})")
    return EXIT_OK


def _cross_module_suites(rng: np.random.Generator, trials: int) -> list[inequalities.SuiteResult]:
    """Orthonormality, Prufer/polynomial consistency, m = 0 sum rule, Abel transform."""
    out = []

    res = inequalities.SuiteResult("orthonormality", trials, 0)
    for _ in range(trials):
        N = int(rng.integers(1, 9))
        seq = VerblunskySequence(inequalities.random_disk(rng, N, adversarial=0.0) * 0.9)
        err = np.abs(szego.gram_matrix(seq) - np.eye(N + 1)).max()
        if err > 1e-8:
            res.violations += 1
            res.replay += inequalities._rows(res.name, N, {"alpha": seq.coeffs})
    out.append(res)

    res = inequalities.SuiteResult("pruefer_consistency", trials, 0)
    for _ in range(trials):
        seq = VerblunskySequence(inequalities.random_disk(rng, 200, adversarial=0.0) * 0.7)
        eta = np.linspace(0.05, 2 * math.pi - 0.05, 100)
        for n, pair in enumerate(szego.orthonormal_family(seq, len(seq))):
            if n % 50:
                continue
            phi = szego.evaluate_phi(pair, eta)
            lr = pruefer.log_r_partial(seq, eta, n)
            if np.max(np.abs(np.exp(lr) - np.abs(phi)) / np.abs(phi)) > 1e-9:
                res.violations += 1
                res.replay += inequalities._rows(res.name, n, {"alpha": seq.coeffs})
                break
    out.append(res)

    res = inequalities.SuiteResult("szego_identity_m0", trials, 0)
    for _ in range(trials):
        N = int(rng.integers(1, 51))
        seq = VerblunskySequence(inequalities.random_disk(rng, N, adversarial=0.0) * 0.9)
        est = sumrule.z_bernstein_szego(seq, 0)
        if abs(est.value - sumrule.szego_identity_m0(seq)) > 1e-6:
            res.violations += 1
            res.replay += inequalities._rows(res.name, N, {"alpha": seq.coeffs})
    out.append(res)

    res = inequalities.SuiteResult("abel_transform", trials * 10, 0)
    for _ in range(trials * 10):
        inp = random_abel_input(rng)
        S, bound = pruefer.abel_transform(inp)
        direct = pruefer.abel_direct(inp)
        if abs(S - direct) > 1e-8 * max(1.0, abs(direct)) or abs(S) > bound * (1 + 1e-12) + 1e-15:
            res.violations += 1
            res.replay += inequalities._rows(res.name, inp.k, {"gamma": inp.gamma})
    out.append(res)
    return out


def random_abel_input(rng: np.random.Generator, length: int = 50) -> pruefer.AbelInput:
    """Non-resonant random data with a random phase track."""
    while True:
        k = int(rng.integers(-3, 4))
        phi = float(rng.uniform(0, 2 * math.pi)) if rng.random() < 0.7 else 0.0
        eta = float(rng.uniform(0.05, 2 * math.pi - 0.05))
        if (k, phi) == (0, 0.0):
            continue
        if abs(np.exp(-1j * (k * eta - phi)) - 1.0) < 1e-3:
            continue
        break
    L = int(rng.integers(1, length + 1))
    gamma = rng.uniform(0.1, 1.0) ** np.arange(L) * np.exp(1j * np.cumsum(rng.normal(0, 0.3, L)))
    gamma = gamma * np.exp(-1j * phi * np.arange(L))  # e^{i phi n} Gamma_n of bounded variation
    theta = np.cumsum(rng.normal(0, 0.2, L + 1)) if rng.random() < 0.7 else None
    return pruefer.AbelInput(k, phi, gamma, complex(rng.normal(), rng.normal()), eta, theta)


def run_verify(cfg: ExperimentConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    t0 = time.perf_counter()
    results = [
        inequalities.telescope_suite(rng, cfg.trials),
        inequalities.power_mean_suite(rng, cfg.trials),
        inequalities.product_suite(rng, max(1, cfg.trials // 100), N=cfg.N[0]),
    ]
    results += _cross_module_suites(rng, max(1, min(20, cfg.trials // 5000)))
    for r in results:
        print(f"{r.name:22s} trials={r.trials:<7d} violations={r.violations}  {'PASS' if r.passed else 'FAIL'}")
    print(f"elapsed {time.perf_counter() - t0:.1f}s")
    if all(r.passed for r in results):
        return EXIT_OK
    path = _atomic_write(cfg.out, lambda p: inequalities.write_replay_csv(results, p))
    print(f"violations written to {path}", file=sys.stderr)
    return EXIT_VIOLATION


RUNNERS = {
    "density": run_density,
    "sumrule-scan": run_sumrule_scan,
    "exponent-fit": run_exponent_fit,
    "verify": run_verify,
}


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="opucsum", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"opucsum {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--m", type=int, default=1, help="weight order (default 1)")
        s.add_argument("--seq", choices=["test", "power"], default="test",
                       help="test: (n+2)^(-1/2m); power: c (n+2)^(-beta)")
        s.add_argument("--beta", type=_floats, default=[0.2, 0.3], help="comma-separated exponents")
        s.add_argument("--c", type=float, default=0.7, help="power-sequence amplitude in (0, 1)")
        s.add_argument("--N", type=_ints, default=None, help="sequence length(s), comma-separated")
        s.add_argument("--theta-min", type=float, default=None)
        s.add_argument("--grid-points", type=int, default=None)
        s.add_argument("--refine-levels", type=int, default=3)
        s.add_argument("--out", default=None)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--trials", type=int, default=10**5)
        s.add_argument("--jobs", type=int, default=None, help="worker threads (default: all cores)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    cfg = ExperimentConfig(
        command=args.command, m=args.m, seq=args.seq, beta=args.beta, c=args.c, N=args.N or [],
        theta_min=args.theta_min, grid_points=args.grid_points, refine_levels=args.refine_levels,
        out=args.out, seed=args.seed, trials=args.trials, jobs=args.jobs,
    )
    try:
        cfg.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    import numba

    numba.set_num_threads(min(cfg.jobs, numba.config.NUMBA_NUM_THREADS))
    try:
        return RUNNERS[cfg.command](cfg)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
