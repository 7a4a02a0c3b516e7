"""Shared test helpers: a random birdtrack expression generator used by the
canonicalisation soundness and oracle regression tests."""

import random
from fractions import Fraction

from suncolor.tensor import TensorExpr


def random_term(rng: random.Random, max_atoms: int = 5) -> str:
    """One random product of atoms with consistent index wiring."""
    # stub lists: (name, polarity) for quark ends, names for gluon ends
    atoms = []
    quark_up: list[str] = []
    quark_dn: list[str] = []
    gluon: list[str] = []
    counter = [0]

    def fresh(prefix: str) -> str:
        counter[0] += 1
        return f"{prefix}{counter[0]}"

    n_atoms = rng.randint(1, max_atoms)
    for _ in range(n_atoms):
        kind = rng.choice(["t", "t", "t", "f", "dv", "delta", "gd", "sym", "asym"])
        if kind == "t":
            a, i, j = fresh("g"), fresh("u"), fresh("d")
            atoms.append(f"t({a};{i},{j})")
            gluon.append(a)
            quark_up.append(i)
            quark_dn.append(j)
        elif kind in ("f", "dv"):
            names = [fresh("g") for _ in range(3)]
            atoms.append(f"{kind}({','.join(names)})")
            gluon.extend(names)
        elif kind == "delta":
            i, j = fresh("u"), fresh("d")
            atoms.append(f"delta({i},{j})")
            quark_up.append(i)
            quark_dn.append(j)
        elif kind == "gd":
            a, b = fresh("g"), fresh("g")
            atoms.append(f"gd({a},{b})")
            gluon.extend([a, b])
        else:
            w = rng.choice([2, 2, 3])
            ups = [fresh("u") for _ in range(w)]
            dns = [fresh("d") for _ in range(w)]
            atoms.append(f"{kind}({','.join(ups)};{','.join(dns)})")
            quark_up.extend(ups)
            quark_dn.extend(dns)

    text = "*".join(atoms)
    # contract a random subset of compatible stubs by renaming
    rng.shuffle(quark_up)
    rng.shuffle(quark_dn)
    n_q = rng.randint(0, min(len(quark_up), len(quark_dn)))
    for up, dn in zip(quark_up[:n_q], quark_dn[:n_q]):
        shared = fresh("k")
        text = text.replace(f"({up},", f"({shared},").replace(f",{up})", f",{shared})")
        text = text.replace(f"({up};", f"({shared};").replace(f";{up},", f";{shared},")
        text = text.replace(f",{up};", f",{shared};").replace(f",{up},", f",{shared},")
        text = text.replace(f"({dn},", f"({shared},").replace(f",{dn})", f",{shared})")
        text = text.replace(f"({dn};", f"({shared};").replace(f";{dn},", f";{shared},")
        text = text.replace(f",{dn};", f",{shared};").replace(f",{dn},", f",{shared},")
    rng.shuffle(gluon)
    n_g = rng.randint(0, len(gluon) // 2)
    for k in range(n_g):
        a, b = gluon[2 * k], gluon[2 * k + 1]
        shared = fresh("x")
        for nm in (a, b):
            text = text.replace(f"({nm},", f"({shared},").replace(f",{nm})", f",{shared})")
            text = text.replace(f"({nm};", f"({shared};").replace(f",{nm},", f",{shared},")
    coeff = Fraction(rng.randint(-3, 3) or 1, rng.choice([1, 2, 3]))
    return f"({coeff})*{text}"


def random_expression(rng: random.Random, max_atoms: int = 5) -> TensorExpr:
    return TensorExpr.parse(random_term(rng, max_atoms))
