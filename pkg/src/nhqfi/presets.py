"""Named sweep recipes for the figure data of the PT and bosonic examples."""
import copy
import math

HALF_PI = math.pi / 2


def _pt(quantity, r, s, lo, hi, steps, m=1.0, phi=0.0, **extra):
    d = {
        "model": "pt",
        "quantity": quantity,
        "params": {"r": r, "s": s, "omega": HALF_PI},
        "grid": {"name": "theta", "min": lo, "max": hi, "steps": steps},
        "initial_state": {"m": m, "phi": phi},
    }
    d.update(extra)
    return d


def _s_scan(quantity):
    # |0> stands in for the eigenbasis exactly at the EP (s = 2)
    return {
        "model": "pt",
        "quantity": quantity,
        "params": {"r": 2.0, "s": 1.5, "omega": HALF_PI},
        "grid": {"name": "s", "min": 1.5, "max": 2.5, "steps": 101},
        "theta": 0.0,
        "initial_state": {"m": 1.0, "phi": 0.0, "basis": "eigen", "vector": [1, 0]},
    }


PRESETS = {
    "fig1a": _pt("qfi", 0.25, 1.0, 0.0, 14.0, 28001),
    "fig1a-broken": _pt("qfi", 1.0, 0.25, 0.0, 14.0, 28001, m=-1.0),
    "fig1b": _pt("i_theta", 0.25, 1.0, 0.0, 14.0, 28001),
    "fig1b-broken": _pt("i_theta", 1.0, 0.25, 0.0, 14.0, 28001, m=-1.0),
    "fig2a": _s_scan("qfi"),
    "fig2b": _s_scan("channel_qfi"),
    "fig3a": _pt("variance", 0.25, 0.5, 0.0, 10.0, 1001, m=1.0),
    "fig3b": _pt("variance", 0.25, 0.5, 0.0, 10.0, 1001, m=1.1),
    "fig3c": _pt("variance", 0.25, 0.5, 0.0, 10.0, 1001, m=1.2),
    "fig3d": _pt("variance", 0.25, 0.5, 0.0, 10.0, 1001, m=1.3),
    "fig5-phi0": _pt("i_theta", 0.4, 1.0, 0.0, 10.0, 10001, phi=0.0),
    "fig5-phi-half-pi": _pt("i_theta", 0.4, 1.0, 0.0, 10.0, 10001, phi=HALF_PI),
    "fig5-phi-pi": _pt("i_theta", 0.4, 1.0, 0.0, 10.0, 10001, phi=math.pi),
    "fig6a": _pt("sensor", 2.0, 3.0, 0.0, 4.0, 801),
    "fig6b": _pt("qfi", 2.0, 3.0, 0.0, 4.0, 801),
    "fig7": _pt("ratios", 0.2, 1.0, 0.0, 10.0, 2001),
    "bosonic": {
        "model": "bosonic",
        "quantity": "qfi",
        "params": {"omega0": 1.0, "g": 1.0, "gamma_a": 0.8, "gamma_b": 0.2},
        "grid": {"name": "theta", "min": 0.0, "max": 3.0, "steps": 301},
    },
}


def get(name):
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}") from None
