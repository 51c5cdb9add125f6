"""Regenerate the bundled JSON fixtures in src/diffpoly/fixtures.

Run from the repo root: ``python scripts/make_fixtures.py``. Output is
deterministic, so re-running leaves the tree unchanged.
"""

import json
from pathlib import Path

from diffpoly.algebra import (
    Derivation,
    adjoin_unit,
    inner_derivation,
    make_matrix_algebra,
    make_strict_upper,
    strip_unit,
)
from diffpoly.specfiles import algebra_to_json

OUT = Path(__file__).resolve().parents[1] / "src" / "diffpoly" / "fixtures"


def dump(name, obj):
    (OUT / f"{name}.json").write_text(json.dumps(obj, indent=1) + "\n")


def rows(d: Derivation):
    return [list(r) for r in d.matrix]


def coords(x):
    return list(x.coords)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    n2 = make_strict_upper(2, 2)
    n3 = make_strict_upper(3, 2)
    n3_3 = make_strict_upper(3, 3)
    n4 = make_strict_upper(4, 2)
    m2 = make_matrix_algebra(2, 2)
    m2_3 = make_matrix_algebra(2, 3)
    m3 = make_matrix_algebra(3, 2)
    m2_bare = strip_unit(m2)
    for name, A in [
        ("n2_z2", n2),
        ("n3_z2", n3),
        ("n3_z3", n3_3),
        ("n4_z2", n4),
        ("m2_z2", m2),
        ("m2_z3", m2_3),
        ("m3_z2", m3),
        ("m2_z2_bare", m2_bare),
    ]:
        dump(name, algebra_to_json(A))

    h3 = adjoin_unit(n3)
    h33 = adjoin_unit(n3_3)
    E = lambda H, lab: H.basis(lab)  # noqa: E731

    dump("tower_n3_inner", {"base": "n3_z2.json", "levels": [{"derivation": {"inner": coords(E(h3, "E12"))}}]})

    scen = {}
    scen["n2_zero"] = {"algebra": "n2_z2.json", "tower": {"levels": [{"derivation": None}]}}
    scen["n3_inner"] = {"tower": "tower_n3_inner.json"}
    scen["n3_zero2"] = {"algebra": "n3_z2.json", "tower": {"levels": [{"derivation": None}, {"derivation": None}]}}
    scen["n3_tower2"] = {
        "algebra": "n3_z2.json",
        "tower": {
            "levels": [
                {"derivation": {"inner": coords(E(h3, "E12"))}},
                {"derivation": {"inner": coords(E(h3, "E13"))}, "x_values": {"d_2(X_1)": coords(h3.one())}},
            ]
        },
    }
    u, v = E(h33, "E12"), E(h33, "E23")
    scen["n3z3_tower2"] = {
        "algebra": "n3_z3.json",
        "tower": {
            "levels": [
                {"derivation": {"inner": coords(u)}},
                {"derivation": {"inner": coords(v)}, "x_values": {"d_2(X_1)": coords(v * u - u * v + h33.one())}},
            ]
        },
    }
    # grading derivation E_ij -> (j - i) E_ij, not inner in R*
    grade = Derivation(h33, [[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0]])
    scen["n3z3_grading"] = {
        "algebra": "n3_z3.json",
        "tower": {
            "levels": [
                {"derivation": rows(grade)},
                {"derivation": {"inner": coords(u)}, "x_values": {"d_2(X_1)": coords(-grade(u) + h33.one())}},
            ]
        },
    }
    # crafted audit failures, one per hypothesis
    scen["fail_leibniz"] = {
        "algebra": "n3_z2.json",
        "tower": {"levels": [{"derivation": [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]}]},
    }
    scen["fail_leak"] = {"algebra": "n2_z2.json", "tower": {"levels": [{"derivation": [[0, 1], [0, 0]]}]}}
    scen["fail_xvalues"] = {
        "algebra": "n3_z2.json",
        "tower": {"levels": [{"derivation": None}, {"derivation": None, "x_values": {"d_2(X_1)": [0, 0, 0, 5]}}]},
    }
    scen["fail_nilpotent"] = {"algebra": "m2_z2_bare.json", "tower": {"levels": [{"derivation": None}]}}
    scen["fail_compat"] = {
        "algebra": "n3_z3.json",
        "tower": {
            "levels": [
                {"derivation": {"inner": coords(u)}},
                {"derivation": {"inner": coords(v)}, "x_values": {"d_2(X_1)": coords(u)}},
            ]
        },
    }
    # idempotent E11 over a non-nilpotent base: the filtration check must refuse it
    scen["m2_lemma13"] = {
        "algebra": "m2_z2_bare.json",
        "tower": {"levels": [{"derivation": None}]},
        "coefficients": {"0": coords(m2_bare.basis("E11"))},
    }
    for name, obj in scen.items():
        dump(name, {"name": name, **obj})

    dump("lemma10_m2", {"algebra": "m2_z2.json", "e": coords(m2.basis("E11")), "xs": [coords(m2.basis("E12"))], "ks": [1]})
    dump("lemma10_zero", {"algebra": "m2_z2.json", "e": coords(m2.zero()), "xs": [coords(m2.basis("E12"))], "ks": [2]})
    dump("lemma10_nonidem", {"algebra": "m2_z2.json", "e": coords(m2.basis("E12")), "xs": [coords(m2.basis("E21"))], "ks": [1]})


if __name__ == "__main__":
    main()
