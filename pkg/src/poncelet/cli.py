"""Command line: caustic search, simulation, rotation numbers and verification suites.

Exit codes: 0 success, 1 invalid input, 2 nothing found, 3 a verification failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import billiard, exactalg, extremal, pell, rotation
from .cayley import Flavor, find_caustics
from .conics import CausticKind, ConfocalFamily, InvalidFamily, classify
from .fixtures import Fixture, all_fixtures, periodic_fixtures, random_odd_caustics

EXIT_OK, EXIT_INVALID, EXIT_EMPTY, EXIT_FAILED = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    a: float
    b: float
    n: int
    flavor: str = "Periodic"
    output_path: Optional[str] = None
    format: str = "json"
    grid_density: int = 10000
    seed: int = 0

    def __post_init__(self):
        if not (self.a > self.b > 0):
            raise UsageError(f"need a > b > 0, got a={self.a}, b={self.b}")
        if self.n < 2:
            raise UsageError("n must be at least 2")
        if self.grid_density < 100:
            raise UsageError("grid density must be at least 100")
        if self.format not in ("json", "csv", "svg"):
            raise UsageError(f"unknown format {self.format}")
        Flavor(self.flavor)


# ---------------------------------------------------------------- output

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with floats at 17 significant digits and keys in insertion order."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (str, Enum, Fraction)):
        return json.dumps(obj.value if isinstance(obj, Enum) else str(obj))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PONCELET_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------- find-caustics

def _signature(family: ConfocalFamily, lam: float, n: int, flavor: Flavor):
    try:
        alt = pell.alternance(pell.pell_pair(family, lam, n, flavor))
    except (pell.NoKernel, pell.ResidualTooLarge, pell.CountMismatch, ValueError):
        return None
    return [alt.signature.tau1, alt.signature.tau2]


def cmd_find_caustics(cfg: RunConfig) -> tuple[int, dict]:
    family = ConfocalFamily(cfg.a, cfg.b)
    flavor = Flavor(cfg.flavor)
    sols = find_caustics(family, cfg.n, flavor, density=cfg.grid_density)
    out = {"n": cfg.n, "flavor": flavor.value, "caustics": []}
    for s in sols:
        out["caustics"].append({
            "lambda0": s.lambda0,
            "kind": s.caustic.kind.value,
            "winding": list(s.winding),
            "signature": _signature(family, s.lambda0, cfg.n, flavor),
            "source": s.source.value,
        })
    return (EXIT_OK if sols else EXIT_EMPTY), out


# ---------------------------------------------------------------- simulate

def cmd_simulate(cfg: RunConfig, lambda0: float, phase: Optional[float], bounces: int) -> tuple[int, str]:
    family = ConfocalFamily(cfg.a, cfg.b)
    kind = classify(family, lambda0)
    if kind not in (CausticKind.ELLIPSE, CausticKind.HYPERBOLA):
        raise UsageError(f"lambda0={lambda0} gives a {kind.value} caustic")
    caustic = family.caustic(lambda0)
    if phase is None:
        phase = float(billiard.default_phases(family, caustic, 8)[1])
    start, direction = billiard.launch_tangent(family, caustic, phase)
    traj = billiard.simulate(family, start, direction, max_bounces=bounces)
    if cfg.format == "svg":
        return EXIT_OK, billiard.to_svg(traj, family, caustic)
    if cfg.format == "csv":
        return EXIT_OK, billiard.to_csv(traj)
    return EXIT_OK, dumps({
        "lambda0": lambda0, "phase": phase, "winding": list(traj.winding), "closed": traj.closed,
        "closure_residual": traj.closure_residual,
        "vertices": traj.vertices.tolist(),
    }) + "\n"


# ---------------------------------------------------------------- rotation

def cmd_rotation(a: float, b: float, lambda0: Optional[float], scan: Optional[str], samples: int) -> dict:
    family = ConfocalFamily(a, b)
    if scan is not None:
        side = rotation.Side.ELLIPSE if scan == "ellipse" else rotation.Side.HYPERBOLA
        rep = rotation.monotonicity_scan(family, side, samples)
        return {"side": side.value, "increasing": rep.increasing,
                "lambda": rep.lambdas.tolist(), "rho": rep.rhos.tolist()}
    res = rotation.rotation_number(family, lambda0)
    return {"lambda0": res.lam, "rho": res.rho, "quadrature_error": res.quadrature_error}


# ---------------------------------------------------------------- verify

def _check(name: str, passed: bool, **detail) -> dict:
    return {"id": name, "passed": bool(passed), **detail}


def _pell_fixture(fx: Fixture) -> dict:
    family = fx.family
    pair = pell.pell_pair(family, fx.lambda0, fx.n, fx.flavor)
    fac = pell.factor_pell(pair)
    expected = "periodic" if fx.periodic else "elliptic"
    detail = {"residual": pair.residual, "verdict": fac.verdict, "factor_residual": fac.residual}
    ok = pair.residual < pell.RESIDUAL_LIMIT and fac.verdict == expected and fac.residual < 1e-7
    if fx.periodic:
        alt = pell.alternance(pair)
        detail["winding"] = [alt.m0, alt.m1]
        detail["signature"] = [alt.signature.tau1, alt.signature.tau2]
        ok = ok and (alt.m0, alt.m1) == fx.winding
    return _check(fx.ident, ok, **detail)


def suite_pell(trials: int, seed: int) -> list[Callable[[], dict]]:
    jobs = [lambda fx=fx: _pell_fixture(fx) for fx in all_fixtures()]

    def canonical():
        family = ConfocalFamily(2.0, 1.0)
        pair = pell.pell_pair(family, 2.0 / 3.0, 4)
        s = pell.chebyshev_grid(0.0, pair.config.c1, 64)
        _, dev = extremal.proportionality(pair.p_hat(s), np.polynomial.Polynomial([1, -24, 88, -96, 32])(s))
        return _check("p4-canonical", dev < 1e-6, deviation=dev)

    def exclusion():
        # the endpoint where an odd p_hat equals +1 is c1 or c4, never c2 or c3
        bad = []
        for fx in random_odd_caustics(50, seed):
            pair = pell.pell_pair(fx.family, fx.lambda0, fx.n, fx.flavor)
            fac = pell.factor_pell_odd(pair)
            cfg = pair.config
            if fac.plus_points[0] not in (cfg.c1, cfg.c4) or (fac.verdict == "periodic") != fx.periodic:
                bad.append(fx.ident)
        return _check("odd-plus-point", not bad, samples=50, failures=bad)

    return jobs + [canonical, exclusion]


def suite_extremal(trials: int, seed: int) -> list[Callable[[], dict]]:
    def zol():
        r = extremal.verify_zolotarev_n3(ConfocalFamily(2.0, 1.0))
        return _check("zolotarev-n3", r.passed, proportionality=r.proportionality,
                      identity_quoted=r.identity_quoted, identity_corrected=r.identity_corrected)

    def n4(a, b, case):
        def run():
            r = extremal.verify_akhiezer_n4(ConfocalFamily(a, b), case)
            return _check(f"akhiezer-n4-{case.value}", r.passed, proportionality=r.proportionality)
        return run

    def pn(n, l):
        def run():
            family = ConfocalFamily(2.0, 1.0)
            lam = next(fx.lambda0 for fx in periodic_fixtures()
                       if fx.a == 2.0 and fx.n == n and fx.winding == (n, 2 * l))
            r = extremal.verify_akhiezer_pn(family, lam, n, l, extremal.Case.E)
            return _check(f"akhiezer-{n}-{l}", r.passed, proportionality=r.proportionality,
                          lambda_model=r.lambda_model)
        return run

    return [zol, n4(2.0, 1.0, extremal.Case.E), n4(3.0, 1.0, extremal.Case.H), pn(4, 1), pn(5, 1), pn(5, 2)]


def suite_discriminant(trials: int, seed: int) -> list[Callable[[], dict]]:
    def run(ident):
        def job():
            r = exactalg.verify_discriminant_example(ident, trials, seed)
            d = r.to_dict()
            d.pop("id")
            d.pop("passed")
            return _check(f"discriminant-{ident}", r.passed, **d)
        return job
    return [run(k) for k in exactalg.EXAMPLES]


def suite_rotation(trials: int, seed: int) -> list[Callable[[], dict]]:
    def fixture(fx: Fixture):
        def job():
            family = fx.family
            rho = rotation.rotation_number(family, fx.lambda0)
            m0, m1 = fx.winding
            resid = rotation.winding_identity_residual(family, fx.lambda0, m0, m1)
            err = abs(rho.rho - m1 / m0)
            return _check(f"rotation-{fx.ident}", err < 1e-9 and resid < 1e-9, rho=rho.rho, identity=resid)
        return job

    def scans():
        rng = np.random.default_rng(seed)
        ok = True
        for _ in range(10):
            b = float(rng.uniform(0.2, 1.0))
            a = b + float(rng.uniform(0.1, 4.0))
            for side in rotation.Side:
                try:
                    rotation.monotonicity_scan(ConfocalFamily(a, b), side, 200)
                except rotation.MonotonicityViolated:
                    ok = False
        return _check("rotation-monotonicity", ok)

    return [fixture(fx) for fx in periodic_fixtures()] + [scans]


SUITES = {
    "pell": suite_pell,
    "extremal": suite_extremal,
    "discriminant": suite_discriminant,
    "rotation": suite_rotation,
}


def _safe(job: Callable[[], dict]) -> dict:
    try:
        return job()
    except Exception as exc:  # a crashing check is a failed check
        return {"id": getattr(job, "__name__", "check"), "passed": False, "error": f"{type(exc).__name__}: {exc}"}


def cmd_verify(suite: str, trials: int = 20, seed: int = 0) -> tuple[int, dict]:
    names = sorted(SUITES) if suite == "all" else [suite]
    report = {}
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        for name in names:
            results = list(pool.map(_safe, SUITES[name](trials, seed)))
            report[name] = sorted(results, key=lambda r: r["id"])
    passed = all(r["passed"] for rs in report.values() for r in rs)
    return (EXIT_OK if passed else EXIT_FAILED), {"passed": passed, "suites": report}


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="poncelet", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    fc = sub.add_parser("find-caustics", help="caustics of n-periodic trajectories")
    fc.add_argument("--a", type=float, required=True)
    fc.add_argument("--b", type=float, required=True)
    fc.add_argument("--n", type=int, required=True)
    fc.add_argument("--flavor", default="Periodic", choices=[f.value for f in Flavor])
    fc.add_argument("--grid-density", type=int, default=10000)
    fc.add_argument("--output")

    sm = sub.add_parser("simulate", help="billiard trajectory tangent to a caustic")
    sm.add_argument("--a", type=float, required=True)
    sm.add_argument("--b", type=float, required=True)
    sm.add_argument("--lambda0", type=float, required=True)
    sm.add_argument("--phase", type=float)
    sm.add_argument("--bounces", type=int, default=20)
    sm.add_argument("--format", default="csv", choices=["json", "csv", "svg"])
    sm.add_argument("--output")

    rt = sub.add_parser("rotation", help="rotation number of a caustic or a monotonicity scan")
    rt.add_argument("--a", type=float, required=True)
    rt.add_argument("--b", type=float, required=True)
    grp = rt.add_mutually_exclusive_group(required=True)
    grp.add_argument("--lambda0", type=float)
    grp.add_argument("--scan", choices=["ellipse", "hyperbola"])
    rt.add_argument("--samples", type=int, default=200)
    rt.add_argument("--output")

    vf = sub.add_parser("verify", help="run verification suites")
    vf.add_argument("suite", choices=sorted(SUITES) + ["all"])
    vf.add_argument("--trials", type=int, default=20)
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--output")
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "find-caustics":
            cfg = RunConfig(args.a, args.b, args.n, args.flavor, args.output, "json", args.grid_density)
            code, out = cmd_find_caustics(cfg)
            _emit(dumps(out) + "\n", args.output)
            return code
        if args.command == "simulate":
            cfg = RunConfig(args.a, args.b, 2, output_path=args.output, format=args.format)
            if args.bounces < 1:
                raise UsageError("bounces must be positive")
            code, text = cmd_simulate(cfg, args.lambda0, args.phase, args.bounces)
            _emit(text, args.output)
            return code
        if args.command == "rotation":
            if not args.a > args.b > 0:
                raise UsageError("need a > b > 0")
            _emit(dumps(cmd_rotation(args.a, args.b, args.lambda0, args.scan, args.samples)) + "\n", args.output)
            return EXIT_OK
        code, out = cmd_verify(args.suite, args.trials, args.seed)
        _emit(dumps(out) + "\n", args.output)
        return code
    except (UsageError, InvalidFamily, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
