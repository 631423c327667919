"""Named scenario bundles reproducing the reference figures' parameter sets."""

from __future__ import annotations

from dataclasses import dataclass

from .completions import CompletionKind, PaNAssertion
from .errors import FMDError
from .limits import fm_assertion
from .scenarios import ScenarioSpec

__all__ = ["Preset", "FigureRecipe", "PRESET_NAMES", "preset"]

L, Q, W, S = (CompletionKind.LINEAR, CompletionKind.QUARTIC, CompletionKind.WEAK, CompletionKind.STRICT)
APIARY = PaNAssertion(100, 25, 60, 0.1, 0.7)


@dataclass(frozen=True)
class FigureRecipe:
    """One PNG: which scenarios' curves to overlay and which kinds to show."""

    filename: str
    scenarios: tuple[str, ...]
    kinds: tuple[str, ...]
    title: str
    log_density: bool = False


@dataclass(frozen=True)
class Preset:
    name: str
    scenarios: tuple[ScenarioSpec, ...]
    figures: tuple[FigureRecipe, ...]


def _four(prefix: str, assertion: PaNAssertion, action: str) -> tuple[ScenarioSpec, ...]:
    return tuple(ScenarioSpec(f"{prefix}_{k.value}", action, assertion, k) for k in (L, Q, W, S))


def _fig1() -> Preset:
    specs = _four("fig1", APIARY, "predict")
    fig = FigureRecipe("fig1.png", tuple(s.name for s in specs), ("predictive",), str(APIARY))
    return Preset("fig1", specs, (fig,))


def _fig2(name: str, assertion: PaNAssertion) -> Preset:
    specs = _four(name.replace("-", "_"), assertion, "mass")
    fig = FigureRecipe(f"{name}.png", tuple(s.name for s in specs), ("density",), str(assertion))
    return Preset(name, specs, (fig,))


def _fig3() -> Preset:
    big = PaNAssertion(100_000, 25_000, 60_000, 0.1, 0.7)
    specs = (
        ScenarioSpec("fig3_L1", "mass", big, L),
        ScenarioSpec("fig3_S1", "mass", big, S),
        ScenarioSpec("fig3_L2", "mass", APIARY, L),
        ScenarioSpec("fig3_S2", "mass", APIARY, S),
        ScenarioSpec("fig3_LR", "reduce", big, L, {"M": 101}),
        ScenarioSpec("fig3_SR", "reduce", big, S, {"M": 101}),
    )
    fig = FigureRecipe("fig3.png", tuple(s.name for s in specs), ("predictive", "density"),
                       f"{big} and {APIARY}, with reductions to 101 events")
    return Preset("fig3", specs, (fig,))


def _fig4() -> Preset:
    spec = ScenarioSpec("fig4", "extend", APIARY, L, {"K": 99_900, "pL_ext": 0.00012, "pU_ext": 0.99998})
    figs = (
        FigureRecipe("fig4.png", ("fig4",), ("predictive", "density"), "Pa100[25,60] extended to N+K = 100000"),
        FigureRecipe("fig4_log.png", ("fig4",), ("density",), "log density", log_density=True),
    )
    return Preset("fig4", (spec,), figs)


def _fig8() -> Preset:
    specs = tuple(
        ScenarioSpec(f"fig8_N{N}", "mass", fm_assertion(N, ".2", ".6", 0.1, 0.8), S) for N in (100, 1000, 100_000)
    )
    limit = ScenarioSpec("fig8_limit", "limit", None, S,
                         {"N": 100_000, "theta1": 0.2, "theta2": 0.6, "pL": 0.1, "pU": 0.8})
    fig = FigureRecipe("fig8.png", tuple(s.name for s in specs) + ("fig8_limit",), ("density",),
                       "Strict completions on [.2, .6] and the limiting density")
    return Preset("fig8", specs + (limit,), (fig,))


def _appendix1() -> Preset:
    spec = ScenarioSpec("appendix1", "sensitivity", APIARY, W, {"pU_list": (0.75, 0.79, 0.83)})
    fig = FigureRecipe("appendix1.png", ("appendix1",), ("density",), "Weak completion, varying pU")
    return Preset("appendix1", (spec,), (fig,))


def _appendix2() -> Preset:
    A = PaNAssertion(8, 2, 5, 0.2, 0.7)
    specs = (
        ScenarioSpec("appendix2_lines", "geometry", A, S),
        ScenarioSpec("appendix2_theorem4", "verify", A, S, {"theorem": "theorem4", "a_star": 5}),
    )
    return Preset("appendix2", specs, ())


_BUILDERS = {
    "fig1": _fig1,
    "fig2-top": lambda: _fig2("fig2-top", APIARY),
    "fig2-bottom": lambda: _fig2("fig2-bottom", PaNAssertion(1000, 250, 600, 0.1, 0.7)),
    "fig3": _fig3,
    "fig4": _fig4,
    "fig8": _fig8,
    "appendix1": _appendix1,
    "appendix2": _appendix2,
}
PRESET_NAMES = tuple(_BUILDERS)


def preset(name: str) -> Preset:
    """Scenario bundle for a figure id (see :data:`PRESET_NAMES`)."""
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise FMDError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}") from None
