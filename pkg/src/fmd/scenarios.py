"""Scenario specifications and their evaluation.

A :class:`ScenarioSpec` names one computation (build a predictive vector,
reduce, extend, ...) on one assertion. :func:`run_scenario` evaluates it and
returns the tables to write, a short summary, and curves for plotting. The
command-line verbs and the figure presets are both thin layers over this.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

import numpy as np

from .calculus import (
    ExtensionScenario,
    exact_predictive,
    reduce_exact,
    extend_assertion,
    forced_extension,
    interior_mass,
    line_system,
    theorem1_bound,
    theorem1_mass,
    theorem2_sum_bound_check,
    verify_theorem3,
)
from .completions import CompletionKind, PaNAssertion, build_predictive
from .core import (
    MassFunction,
    density_histogram,
    invert_to_mass,
    mass_to_predictive,
    reduce_mass_to,
    roundtrip_check,
)
from .errors import FMDError
from .io import Table, distribution_table, table_from_records
from .limits import (
    IncompleteBetaParams,
    compare_to_limit,
    fm_assertion,
    incomplete_beta_density,
    incomplete_beta_mixture_mass,
)

__all__ = ["ACTIONS", "THEOREMS", "ScenarioSpec", "Curve", "ScenarioResult", "run_scenario", "local_maxima"]

ACTIONS = ("predict", "mass", "reduce", "extend", "limit", "sensitivity", "geometry", "verify")
THEOREMS = ("theorem1", "theorem2", "theorem3", "theorem4", "theorem5", "roundtrip")

#: Tolerance applied by ``verify theorem1`` and ``verify theorem3``.
VERIFY_TOL = 1e-12


@dataclass(frozen=True)
class ScenarioSpec:
    """One computation.

    Attributes:
        name: Stem for output files.
        action: One of :data:`ACTIONS`.
        assertion: The PaN assertion acted on (``limit`` may omit it).
        completion: Completion used to build predictive vectors.
        params: Action parameters, e.g. ``{"M": 101}`` for ``reduce``.
        log_output: Write log masses instead of linear ones.
    """

    name: str
    action: str
    assertion: PaNAssertion | None
    completion: CompletionKind = CompletionKind.LINEAR
    params: Mapping[str, Any] = field(default_factory=dict)
    log_output: bool = False

    def __post_init__(self) -> None:
        if self.action not in ACTIONS:
            raise FMDError(f"unknown action {self.action!r}")
        object.__setattr__(self, "completion", CompletionKind.parse(self.completion))
        object.__setattr__(self, "params", dict(self.params))
        if self.assertion is None and self.action != "limit" and not (
            self.action == "verify" and self.params.get("theorem") in ("theorem1", "theorem2")
        ):
            raise FMDError(f"action {self.action!r} needs an assertion")


@dataclass(frozen=True)
class Curve:
    """Plot-ready series: ``kind`` is ``"predictive"`` or ``"density"``."""

    label: str
    kind: str
    x: np.ndarray
    y: np.ndarray


@dataclass
class ScenarioResult:
    spec: ScenarioSpec
    tables: dict[str, Table]
    summary: dict[str, Any]
    curves: list[Curve]
    passed: bool = True


def local_maxima(log_values: np.ndarray) -> list[int]:
    """Indices whose mass is at least both neighbours' and above one of them."""
    lq = np.asarray(log_values)
    padded = np.concatenate(([-np.inf], lq, [-np.inf]))
    left, mid, right = padded[:-2], padded[1:-1], padded[2:]
    peak = (mid >= left) & (mid >= right) & ((mid > left) | (mid > right)) & np.isfinite(mid)
    return [int(i) for i in np.flatnonzero(peak)]


def _label(spec: ScenarioSpec, assertion: PaNAssertion | None = None) -> str:
    A = assertion or spec.assertion
    return f"{A} {spec.completion.value}"


def _predictive_curve(label: str, p) -> Curve:
    return Curve(label, "predictive", np.arange(p.N + 1) / p.N, np.asarray(p.values))


def _density_curve(label: str, q: MassFunction) -> Curve:
    h = density_histogram(q)
    return Curve(label, "density", np.asarray(h.bin_centers), np.asarray(h.densities))


def _meta(spec: ScenarioSpec, **extra) -> dict:
    meta = {
        "scenario": spec.name,
        "action": spec.action,
        "completion": spec.completion.value,
    }
    if spec.assertion is not None:
        meta["assertion"] = str(spec.assertion)
    meta.update(extra)
    return meta


def _run_predict(spec: ScenarioSpec) -> ScenarioResult:
    p = build_predictive(spec.assertion, spec.completion)
    table = distribution_table(p, None, spec.log_output, _meta(spec))
    return ScenarioResult(spec, {"": table}, {"N": p.N}, [_predictive_curve(_label(spec), p)])


def _run_mass(spec: ScenarioSpec) -> ScenarioResult:
    p = build_predictive(spec.assertion, spec.completion)
    q = invert_to_mass(p)
    peaks = local_maxima(q.log_values)
    table = distribution_table(p, q, spec.log_output, _meta(spec))
    summary = {"Nplus1": q.Nplus1, "local_maxima": peaks}
    curves = [_predictive_curve(_label(spec), p), _density_curve(_label(spec), q)]
    return ScenarioResult(spec, {"": table}, summary, curves)


def _run_reduce(spec: ScenarioSpec) -> ScenarioResult:
    A = spec.assertion
    M = int(spec.params["M"])
    q = invert_to_mass(build_predictive(A, spec.completion))
    r = reduce_mass_to(q, M)
    p = mass_to_predictive(r)
    n = M - 1
    a = np.arange(n + 1)
    window = (a / n >= A.a1 / A.N) & (a / n <= A.a2 / A.N)
    dev = float(np.max(np.abs(p.values[window] - a[window] / n))) if window.any() else 0.0
    summary = {
        "M": M,
        "p_first": float(p.values[0]),
        "p_last": float(p.values[-1]),
        "max_fm_deviation_on_window": dev,
    }
    table = distribution_table(p, r, spec.log_output, _meta(spec, M=M))
    label = f"{_label(spec)} reduced to {M}"
    return ScenarioResult(spec, {"": table}, summary, [_predictive_curve(label, p), _density_curve(label, r)])


def _scenario_of(spec: ScenarioSpec) -> ExtensionScenario:
    P = spec.params
    return ExtensionScenario(spec.assertion, int(P["K"]), P.get("pL_ext"), P.get("pU_ext"))


def _run_extend(spec: ScenarioSpec) -> ScenarioResult:
    scen = _scenario_of(spec)
    ext = extend_assertion(scen)
    p = build_predictive(ext, spec.completion)
    q = invert_to_mass(p)
    im = interior_mass(scen, spec.completion)
    summary = {
        "extended": str(ext),
        "local_maxima": local_maxima(q.log_values),
        "interior_mass_direct": im.direct_sum,
        "interior_mass_closed_form": im.closed_form,
    }
    table = distribution_table(p, q, spec.log_output, _meta(spec, extended=str(ext)))
    label = f"{ext} {spec.completion.value}"
    return ScenarioResult(spec, {"": table}, summary, [_predictive_curve(label, p), _density_curve(label, q)])


def _limit_params(spec: ScenarioSpec) -> IncompleteBetaParams:
    return IncompleteBetaParams(float(spec.params["theta1"]), float(spec.params["theta2"]))


def _run_limit(spec: ScenarioSpec) -> ScenarioResult:
    P = spec.params
    params = _limit_params(spec)
    N = int(P["N"])
    t1, t2 = P["theta1"], P["theta2"]
    mix = incomplete_beta_mixture_mass(N + 1, params)
    margin = P.get("margin")
    summary: dict[str, Any] = {"Z": params.Z, "mixture_vs_limit": compare_to_limit(mix, params, margin)}
    curves = []
    A = spec.assertion
    if A is None:
        pL = float(P.get("pL", float(t1) / 2))
        pU = float(P.get("pU", 1 - (1 - float(t2)) / 2))
        A = fm_assertion(N, t1, t2, pL, pU)
    q = invert_to_mass(build_predictive(A, spec.completion))
    summary["assertion"] = str(A)
    summary["fmd_vs_limit"] = compare_to_limit(q, params, margin)
    curves.append(_density_curve(_label(spec, A), q))
    grid = np.linspace(params.theta1, params.theta2, 2001)[1:-1]
    curves.append(
        Curve(f"Incomplete Beta ({params.theta1:g}, {params.theta2:g}, 0, 0)", "density", grid,
              incomplete_beta_density(grid, params))
    )
    p_mix = mass_to_predictive(mix)
    table = distribution_table(
        p_mix, mix, spec.log_output, _meta(spec, theta1=params.theta1, theta2=params.theta2, N=N)
    )
    return ScenarioResult(spec, {"": table}, summary, curves)


def _run_sensitivity(spec: ScenarioSpec) -> ScenarioResult:
    A = spec.assertion
    tables, curves, summary = {}, [], {}
    for pU in spec.params["pU_list"]:
        B = PaNAssertion(A.N, A.a1, A.a2, A.pL, float(pU))
        p = build_predictive(B, spec.completion)
        q = invert_to_mass(p)
        key = f"pU={float(pU)!r}"
        peaks = local_maxima(q.log_values)
        summary[key] = {
            "local_maxima_abscissa": [k / q.Nplus1 for k in peaks],
            "mean_abscissa": float(np.dot(np.arange(q.Nplus1 + 1) / q.Nplus1, q.values)),
        }
        tables[f"_pU{float(pU)!r}"] = distribution_table(p, q, spec.log_output, _meta(spec, pU=float(pU)))
        curves.append(_density_curve(f"{B} {spec.completion.value}", q))
    return ScenarioResult(spec, tables, summary, curves)


GEOMETRY_COLUMNS = (
    "n", "a", "in_window", "p_a", "p_a_plus_1", "p_reduced",
    "slope_a", "slope_a_plus_1", "meet_alpha", "meet_beta", "parallel",
)


def _run_geometry(spec: ScenarioSpec) -> ScenarioResult:
    A = spec.assertion
    triples = line_system(A, spec.completion)
    chain = {A.N: exact_predictive(A, spec.completion)}
    for n in range(A.N, A.N - (A.a2 - A.a1), -1):
        chain[n - 1] = reduce_exact(chain[n])
    records = []
    for t in triples:
        p = chain[t.N]
        pa, pb, pr = p[t.a], p[t.a + 1], chain[t.N - 1][t.a]
        point = t.concurrency.point
        records.append((
            t.N, t.a, t.in_window, pa, pb, pr, (1 - pa) / pa, (1 - pb) / pb,
            None if point is None else point[0], None if point is None else point[1],
            t.concurrency.parallel,
        ))
    fm = [t for t in triples if t.in_window]
    summary = {
        "triples": len(triples),
        "window_triples": len(fm),
        "window_triples_at_origin": sum(1 for t in fm if t.concurrency.point == (0, 0)),
    }
    passed = summary["window_triples"] == summary["window_triples_at_origin"]
    table = table_from_records(GEOMETRY_COLUMNS, records, _meta(spec))
    return ScenarioResult(spec, {"": table}, summary, [], passed)


def _run_verify(spec: ScenarioSpec) -> ScenarioResult:
    P = spec.params
    which = P["theorem"]
    A = spec.assertion
    if which == "theorem1":
        N, q0 = int(P["N"]), float(P.get("q0", 0.0))
        q1 = float(P.get("q1", theorem1_bound(N, q0) / 2))
        q = theorem1_mass(N, q0, q1)
        summary: dict[str, Any] = {"bound": theorem1_bound(N, q0)}
        if N > 1:
            # p[a] from adjacent interior masses only, so q[0] = 0 is allowed
            v = q.values
            a = np.arange(1, N)
            up = (a + 1) * v[2 : N + 1]
            p = up / (up + (N + 1 - a) * v[1:N])
            summary["max_fm_deviation"] = float(np.max(np.abs(p - a / N)))
        else:
            summary["max_fm_deviation"] = 0.0
        passed = summary["max_fm_deviation"] < VERIFY_TOL
    elif which == "theorem2":
        N, M, q0 = int(P["N"]), int(P["M"]), float(P.get("q0", 0.0))
        q1 = float(P.get("q1", theorem1_bound(N, q0) / 2))
        lhs, rhs = theorem2_sum_bound_check(N, M, q0, q1)
        summary = {"lhs": lhs, "rhs": rhs}
        passed = lhs <= rhs
    elif which == "theorem3":
        dev = verify_theorem3(A, spec.completion)
        summary = {"max_deviation": dev, "exact_max_deviation": float(verify_theorem3(A, spec.completion, exact=True))}
        passed = dev < VERIFY_TOL
    elif which == "theorem4":
        a_star = int(P["a_star"])
        forced = forced_extension(A, a_star)
        summary = {
            "forced": [f"p[{a},{A.N + 1}]={v}" for a, v in forced],
            "window": [forced[0][0], forced[-1][0]],
        }
        passed = all(v == Fraction(a, A.N + 1) for a, v in forced)
    elif which == "theorem5":
        im = interior_mass(_scenario_of(spec), spec.completion)
        rel = abs(im.direct_sum - im.closed_form) / im.closed_form
        summary = {"direct_sum": im.direct_sum, "closed_form": im.closed_form, "relative_gap": rel}
        passed = rel < 1e-10
    elif which == "roundtrip":
        q = invert_to_mass(build_predictive(A, spec.completion))
        err = roundtrip_check(q)
        summary = {"max_abs_error": err}
        passed = err < 1e-10
    else:
        raise FMDError(f"unknown theorem {which!r}; choose from {', '.join(THEOREMS)}")
    summary = {"theorem": which, **summary, "passed": bool(passed)}
    return ScenarioResult(spec, {}, summary, [], bool(passed))


_RUNNERS = {
    "predict": _run_predict,
    "mass": _run_mass,
    "reduce": _run_reduce,
    "extend": _run_extend,
    "limit": _run_limit,
    "sensitivity": _run_sensitivity,
    "geometry": _run_geometry,
    "verify": _run_verify,
}


def run_scenario(spec: ScenarioSpec) -> ScenarioResult:
    """Evaluate ``spec``; library errors propagate unchanged."""
    return _RUNNERS[spec.action](spec)
