"""Named experiment bundles reproducing the standard data sets."""

from __future__ import annotations

from .config import resolve

_LONG_TIMES = {"start": 0.01, "stop": 1.0e6, "points": 400}
_GAMMAS = [round(0.1 * k, 1) for k in range(11)]


def _gasket(gen):
    return {"kind": "gasket", "generation": gen}


_RTL = {"kind": "triangular", "side": 129}

PRESETS = {
    "fig2a": (
        "Corner-start quantum MSD on gaskets G(4)-G(7) with the three regime fits, "
        "plus the classical random-walk MSD on G(7).",
        [
            *({"name": f"fig2a_G{g}", "lattice": _gasket(g), "observables": ["msd"],
               "analysis": {"windows": ["short", "intermediate", "long"]}} for g in (4, 5, 6, 7)),
            {"name": "fig2a_G7_classical", "lattice": _gasket(7), "observables": ["classical_msd"],
             "analysis": {"windows": ["intermediate"]}},
        ],
    ),
    "fig2b": (
        "Corner-start quantum MSD on G(7) up to tJ = 1e6, including the long-time fit.",
        [{"name": "fig2b_G7", "lattice": _gasket(7), "times": _LONG_TIMES,
          "observables": ["msd"], "analysis": {"windows": ["short", "intermediate", "long"]}}],
    ),
    "fig2c": (
        "Ensemble-averaged MSD (mean and standard deviation) on G(6) over all initial "
        "sites of the lower-left G(3) sub-gasket.",
        [{"name": "fig2c_G6_ensemble", "lattice": _gasket(6),
          "initial": {"type": "ensemble", "region": 3}, "observables": ["msd"],
          "analysis": {"windows": ["intermediate"]}}],
    ),
    "fig3": (
        "Corner-start quantum MSD on the generation-5 Sierpinski carpet with the "
        "spreading-window fit.",
        [{"name": "fig3_carpet5", "lattice": {"kind": "carpet", "generation": 5},
          "observables": ["msd"], "analysis": {"windows": ["short", "spreading"]}}],
    ),
    "fig4": (
        "Integrated level-spacing staircases of gasket G(7), triangle (8385 sites), "
        "carpet generation 5 and square (6724 sites), with the beta fit where a "
        "power law exists.",
        [
            {"name": "fig4_SG", "lattice": _gasket(7), "observables": ["staircase"]},
            {"name": "fig4_RTL", "lattice": _RTL, "observables": ["staircase"]},
            {"name": "fig4_SC", "lattice": {"kind": "carpet", "generation": 5},
             "observables": ["staircase"]},
            {"name": "fig4_RSqL", "lattice": {"kind": "square", "side": 82},
             "observables": ["staircase"]},
        ],
    ),
    "fig5": (
        "MSD exponent on the interpolating G(7) lattice as a function of the coupling "
        "ratio gamma = J'/J.",
        [{"name": "fig5_sweep", "lattice": {"kind": "interpolating", "generation": 7},
          "observables": ["msd"], "sweep": {"gamma": _GAMMAS},
          "analysis": {"windows": ["spreading"]}}],
    ),
    "fig6": (
        "Region weights: probability kept inside the lower-left G(i) sub-structure "
        "after a corner start, on G(7) and on the regular triangle.",
        [
            {"name": "fig6_G7", "lattice": _gasket(7), "times": _LONG_TIMES,
             "observables": ["region_weight"], "analysis": {"windows": [], "regions": [1, 2, 3, 4, 5, 6]}},
            {"name": "fig6_RTL", "lattice": _RTL, "observables": ["region_weight"],
             "analysis": {"windows": [], "regions": [1, 2, 3, 4, 5, 6]}},
        ],
    ),
    "fig7": (
        "MSD of symmetric (+) and antisymmetric (-) superpositions of the corner and "
        "its bottom-edge neighbour, on G(7) and on the regular triangle.",
        [
            {"name": f"fig7_{lab}_{nm}", "lattice": lat,
             "initial": {"type": "superposition", "sign": sg}, "observables": ["msd"],
             "analysis": {"windows": []}}
            for lab, lat in (("G7", _gasket(7)), ("RTL", _RTL))
            for nm, sg in (("plus", "+"), ("minus", "-"))
        ],
    ),
}


def list_presets():
    """``[(name, description), ...]`` in preset order."""
    return [(name, desc) for name, (desc, _) in PRESETS.items()]


def preset_configs(name, overrides=None):
    """Resolved configs of a preset; ``overrides`` apply to every member."""
    if name not in PRESETS:
        raise KeyError(name)
    return [resolve(raw, overrides) for raw in PRESETS[name][1]]
