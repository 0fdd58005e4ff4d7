"""
Command-line front end.

``heavytail-ineq run.cfg`` loads a flat configuration, runs one command and
writes its CSV tables and JSON reports to the output directory. The exit
status is 0 when every check passes, 1 on a failed check, 2 when a Monte
Carlo check is inconclusive and 3 on a configuration error.

:copyright: (c) 2025 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

import argparse
import dataclasses
import logging
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from heavytail_ineq import const
from heavytail_ineq.config import RunConfig, VerifyConfig, load_config, parse_phi
from heavytail_ineq.duality import beta_from_profile, profile_from_beta, rate_from_profile
from heavytail_ineq.errors import ConfigError, ConverseConditionError, HeavyTailError, HypothesisError, ParameterError
from heavytail_ineq.isoperimetry import iso_I_even, iso_J, profile_I
from heavytail_ineq.lyapunov import (
    LyapunovCertificate,
    WeightKind,
    apply_generator,
    cauchy_certificate,
    derive_weight,
    exp_potential_certificate,
    fit_growth_exponent,
    growth_window,
    subexp_certificate,
    vq_certificate,
    verify_drift,
)
from heavytail_ineq.measures import Family, Measure1D
from heavytail_ineq.report import write_csv, write_json
from heavytail_ineq.spherical import (
    SphericalFamily,
    cauchy_bobkov_closed_form,
    cauchy_bounds,
    cauchy_sum_bracket,
    radial_moments,
    subexp_bounds,
    transported_log_density,
    weighted_poincare_report,
)
from heavytail_ineq.verify import HalfSpace, Status, check_inequality, check_isoperimetric, witness_suite
from heavytail_ineq.weak import (
    ProductBoundSpec,
    product_iso_lower,
    product_iso_upper,
    product_weak_cheeger,
    product_weak_poincare,
    product_weak_poincare_rate,
)

_LOG = logging.getLogger(__name__)

_EXIT_BY_STATUS = {
    Status.PASS: const.EXIT_PASS,
    Status.FAIL: const.EXIT_FAIL,
    Status.INCONCLUSIVE: const.EXIT_INCONCLUSIVE,
}


def _provenance(m: Measure1D) -> str:
    return const.PROVENANCE_FORMULA if m.has_closed_tail else const.PROVENANCE_QUADRATURE


def _run_profile(cfg: RunConfig) -> int:
    m = cfg.build_measure()
    t = np.asarray(cfg.grid.t)
    rows = zip(t, np.asarray(iso_J(m, t)), np.asarray(iso_I_even(m, t)))
    write_csv(cfg.output.path("profile.csv"), ("t", "J", "I"), rows, _provenance(m))
    return const.EXIT_PASS


def _run_duality(cfg: RunConfig) -> int:
    m = cfg.build_measure()
    points = const.CLI_DUALITY_POINTS
    profile = profile_I(m)
    beta_rows = [(s, beta_from_profile(profile, s, points)) for s in cfg.grid.s]
    write_csv(cfg.output.path("duality_beta.csv"), ("s", "beta"), beta_rows, const.PROVENANCE_QUADRATURE)
    rate = rate_from_profile(profile, points)
    profile_rows = [(t, profile_from_beta(rate, min(t, 1.0 - t), points), profile(t)) for t in cfg.grid.t]
    write_csv(cfg.output.path("duality_profile.csv"), ("t", "I_from_beta", "I"), profile_rows,
              const.PROVENANCE_QUADRATURE)
    return const.EXIT_PASS


def _certificate(cfg: RunConfig) -> LyapunovCertificate:
    family = cfg.lyapunov.family
    n = cfg.measure.dimension
    if family == "cauchy":
        if cfg.measure.alpha is None:
            raise ConfigError("the cauchy certificate needs measure.alpha", field="measure.alpha")
        return cauchy_certificate(n, cfg.measure.alpha)
    if family == "subexp":
        if cfg.measure.p is None:
            raise ConfigError("the subexp certificate needs measure.p", field="measure.p")
        return subexp_certificate(n, cfg.measure.p)
    if family == "exp-potential":
        if not cfg.measure.phi:
            raise ConfigError("the exp-potential certificate needs measure.phi", field="measure.phi")
        return exp_potential_certificate(parse_phi(cfg.measure.phi), cfg.lyapunov.gamma)
    if cfg.measure.q is None:
        raise ConfigError("the vq certificate needs measure.q", field="measure.q")
    return vq_certificate(cfg.measure.q, cfg.lyapunov.a)


def _run_lyapunov(cfg: RunConfig) -> int:
    cert = _certificate(cfg)
    report = verify_drift(cert, r_max=cfg.lyapunov.r_max)
    weights = {}
    for kind in WeightKind:
        try:
            weight = derive_weight(cert, kind, cfg.lyapunov.kappa_u)
        except ConverseConditionError as err:
            _LOG.warning("[%s] no %s weight: %s", cert.provenance, kind.value, err)
            weights[kind.value] = {"available": False, "reason": str(err)}
            continue
        try:
            exponent = fit_growth_exponent(weight, *growth_window(cert))
        except ParameterError as err:
            _LOG.debug("[%s] no growth fit for %s: %s", cert.provenance, kind.value, err)
            exponent = None
        weights[kind.value] = {
            "available": True,
            "prefactor": weight.prefactor,
            "kappa_u": weight.kappa_u,
            "growth_exponent": exponent,
            "note": weight.provenance,
        }
    write_json(cfg.output.path("lyapunov.json"), {
        "certificate": cert.to_dict(),
        "drift": report.to_dict(),
        "weights": weights,
        "provenance": const.PROVENANCE_QUADRATURE,
        "growth_provenance": const.PROVENANCE_FITTED,
    })

    r = np.linspace(0.0, cfg.lyapunov.r_max, cfg.grid.x_points)
    if cert.dimension >= 2:
        r[0] = 1e-9
    generator = np.asarray(apply_generator(cert.measure, cert.W, r))
    rate = np.asarray(cert.phi(cert.W(r)))
    allowed = np.where(r <= cert.radius, cert.b, 0.0)
    rows = zip(r, generator, rate, generator + rate, allowed)
    write_csv(cfg.output.path("drift_scan.csv"), ("r", "LW", "phi_W", "excess", "allowed"), rows,
              const.PROVENANCE_QUADRATURE)
    return const.EXIT_PASS if report.passed else const.EXIT_FAIL


def _spherical_family(cfg: RunConfig) -> tuple[SphericalFamily, float]:
    family = Family(cfg.measure.family)
    if family is Family.CAUCHY:
        return SphericalFamily.CAUCHY, cfg.measure.alpha
    if family is Family.SUBEXPONENTIAL:
        return SphericalFamily.SUBEXP, cfg.measure.p
    raise ConfigError("constants are tabulated for generalized-cauchy and sub-exponential", field="measure.family")


def _run_constants(cfg: RunConfig) -> int:
    family, param = _spherical_family(cfg)
    closed, numeric = [], []
    for n in cfg.grid.n:
        if family is SphericalFamily.CAUCHY:
            lower, upper = cauchy_bounds(n, param)
            bracket = cauchy_sum_bracket(n, param)
            closed.append((n, param, lower, upper, cauchy_bobkov_closed_form(n, param), *bracket))
        else:
            lower, upper = subexp_bounds(n, param)
            closed.append((n, param, lower, upper, float("nan"), float("nan"), float("nan")))
        report = weighted_poincare_report(family, n, param)
        m1, m2 = radial_moments(transported_log_density(family, n, param))
        numeric.append((n, param, report.upper, report.lower, m1, m2))
    write_csv(cfg.output.path("constants.csv"),
              ("n", "param", "lower", "upper", "bobkov_closed_form", "sigma_lower", "sigma_upper"), closed,
              const.PROVENANCE_FORMULA)
    write_csv(cfg.output.path("constants_numeric.csv"),
              ("n", "param", "bobkov_constant", "testfn_limit", "mean_r", "mean_r2"), numeric,
              const.PROVENANCE_QUADRATURE)
    return const.EXIT_PASS


def _run_weak(cfg: RunConfig) -> int:
    m = cfg.build_measure()
    tag = _provenance(m)
    cheeger, poincare, iso = [], [], []
    for n in cfg.grid.n:
        spec = ProductBoundSpec(m, n)
        for s in cfg.grid.s:
            coefficients = product_weak_cheeger(spec, s)
            cheeger.append((n, s, coefficients.gradient, coefficients.oscillation, coefficients.vacuous))
            poincare.append((n, s, *product_weak_poincare(spec, s)))
        for t in cfg.grid.t:
            iso.append((n, t, product_iso_lower(spec, t), product_iso_upper(spec, t)))
    write_csv(cfg.output.path("weak_cheeger.csv"), ("n", "s", "gradient", "oscillation", "vacuous"), cheeger, tag)
    write_csv(cfg.output.path("weak_poincare.csv"), ("n", "s", "energy", "oscillation"), poincare, tag)
    write_csv(cfg.output.path("product_iso.csv"), ("n", "t", "lower", "upper"), iso, tag)
    return const.EXIT_PASS


def _default_weighted_poincare(m: Measure1D) -> tuple[float, Callable, str]:
    """Upper constant and weight of the weighted Poincare inequality on the line."""
    if m.family is Family.CAUCHY:
        return cauchy_bounds(1, m.alpha)[1], lambda r: (1.0 + r) ** 2, "(1+|x|)^2"
    if m.family is Family.SUBEXPONENTIAL and m.p < 1.0:
        e = 2.0 * (1.0 - m.p)
        return subexp_bounds(1, m.p)[1], lambda r: np.power(r, e), f"|x|^{e:g}"
    raise ConfigError("verify.constant is required for this family", field="verify.constant")


def _engine(vc: VerifyConfig, n: int) -> str:
    """Configured engine, or quadrature on the line and Monte Carlo in higher dimension."""
    if vc.engine is None:
        return "quadrature" if n == 1 else "mc"
    if vc.engine == "quadrature" and n > 1:
        raise ConfigError(f"quadrature checks are one-dimensional, got dimension {n}", field="verify.engine")
    return vc.engine


def _run_verify(cfg: RunConfig) -> int:
    m = cfg.build_measure()
    vc = cfg.verify
    n = cfg.measure.dimension
    payload = {"kind": vc.kind, "measure": m.label, "dimension": n, "scale": vc.scale}
    if vc.kind == "weighted-poincare":
        if vc.constant is None:
            constant, weight, label = _default_weighted_poincare(m)
        else:
            try:
                _, weight, label = _default_weighted_poincare(m)
            except ConfigError:
                weight, label = None, "1"
            constant = vc.constant
        constant *= vc.scale
        functions = witness_suite(m, 1, vc.witnesses, seed=cfg.mc.seed)
        result = check_inequality(vc.kind, m, functions, constant=constant, weight=weight,
                                  mc=cfg.mc if _engine(vc, 1) == "mc" else None)
        payload.update(constant=constant, weight=label)
    elif vc.kind == "weak-poincare":
        spec = ProductBoundSpec(m, n)
        s_grid = [s for s in cfg.grid.s if s < 0.25]
        if not s_grid:
            raise ConfigError("weak-poincare needs s values below 1/4", field="grid.s")

        def rate(s: float) -> float:
            return vc.scale * product_weak_poincare_rate(spec, s)

        functions = witness_suite(m, n, vc.witnesses, seed=cfg.mc.seed)
        if _engine(vc, n) == "quadrature":
            result = check_inequality(vc.kind, m, functions, rate=rate, s_grid=s_grid)
        else:
            result = check_inequality(vc.kind, spec, functions, rate=rate, s_grid=s_grid, mc=cfg.mc)
        payload.update(s_grid=s_grid, rate=f"{vc.scale:g} x product weak Poincare rate")
    else:
        if vc.engine == "quadrature":
            raise ConfigError("the isoperimetric check has no quadrature engine", field="verify.engine")
        spec = ProductBoundSpec(m, n)
        result = check_isoperimetric(spec, HalfSpace(0, 0.0), const.BOUNDARY_STEP, cfg.mc)
        payload.update(region="halfspace x0 <= 0", h=const.BOUNDARY_STEP)
    payload["result"] = result.to_dict()
    write_json(cfg.output.path("verify.json"), payload)
    return _EXIT_BY_STATUS[result.status]


_COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "profile": _run_profile,
    "duality": _run_duality,
    "lyapunov": _run_lyapunov,
    "constants": _run_constants,
    "weak": _run_weak,
    "verify": _run_verify,
}


def run(config: RunConfig) -> int:
    """Run one configured command and return its exit status."""
    _LOG.info("[%s] starting, output in %s", config.command, config.output.directory)
    try:
        status = _COMMANDS[config.command](config)
    except (ConfigError, ParameterError, HypothesisError) as err:
        _LOG.error("[%s] configuration rejected: %s", config.command, err)
        return const.EXIT_CONFIG
    except HeavyTailError as err:
        _LOG.error("[%s] failed: %s", config.command, err)
        return const.EXIT_FAIL
    _LOG.info("[%s] finished with exit status %d", config.command, status)
    return status


def build_parser() -> argparse.ArgumentParser:
    from heavytail_ineq import __version__

    parser = argparse.ArgumentParser(
        prog="heavytail-ineq",
        description="Compute and check functional inequalities for heavy-tailed measures.",
    )
    parser.add_argument("config", type=Path, help="run configuration (key = value lines)")
    parser.add_argument("--seed", type=int, default=None, help="override mc.seed")
    parser.add_argument("--output-dir", type=Path, default=None, help="override output.dir")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config.mc = dataclasses.replace(config.mc, seed=args.seed)
        if args.output_dir is not None:
            config.output = dataclasses.replace(config.output, directory=args.output_dir)
    except ConfigError as err:
        _LOG.error("Invalid configuration %s: %s", args.config, err)
        return const.EXIT_CONFIG
    return run(config)
