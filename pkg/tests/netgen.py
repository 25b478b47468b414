"""Random small timed-automata networks for engine/oracle comparison."""
from __future__ import annotations

import random

from creolta.io.tatext import parse_system

CHANNELS = ("a", "b")


def _atom(rng: random.Random, clocks: list[str], kmax: int, upper_only: bool = False) -> str:
    x = rng.choice(clocks)
    c = rng.randint(0, kmax)
    if not upper_only and len(clocks) > 1 and rng.random() < 0.2:
        y = rng.choice([z for z in clocks if z != x])
        return f"{x} - {y} {rng.choice(['<=', '>='])} {c}"
    if upper_only:
        return f"{x} <= {c}"
    return f"{x} {rng.choice(['<=', '>=', '>=', '=='])} {c}"


def random_network_text(seed: int, max_automata: int = 3, max_clocks: int = 4,
                        kmax: int = 6) -> str:
    """Closed guards only; constants at most ``kmax``."""
    rng = random.Random(seed)
    n_aut = rng.randint(2, max_automata) if max_automata > 1 else 1
    budget = max_clocks
    out = ["int[0,3] n = 0;", "chan a;", "chan b;", ""]
    for k in range(n_aut):
        nclk = min(budget - (n_aut - k - 1), rng.randint(1, 2))
        budget -= nclk
        clocks = [f"x{k}{j}" for j in range(nclk)]
        nloc = rng.randint(2, 4)
        out.append(f"template T{k}() {{")
        out.append(f"  clock {', '.join(clocks)};")
        for j in range(nloc):
            bits = [f"location L{j}"]
            if j == 0:
                bits.append("init")
            if rng.random() < 0.35:
                bits.append(f"invariant {_atom(rng, clocks, kmax, upper_only=True)}")
            out.append("  " + " ".join(bits) + ";")
        for _ in range(rng.randint(nloc, nloc + 3)):
            src, dst = rng.randrange(nloc), rng.randrange(nloc)
            bits = [f"edge L{src} -> L{dst}"]
            guards = [_atom(rng, clocks, kmax) for _ in range(rng.randint(0, 2))]
            if rng.random() < 0.25:
                guards.append(f"n {rng.choice(['<', '>=', '=='])} {rng.randint(0, 3)}")
            if guards:
                bits.append("guard " + " && ".join(guards))
            if rng.random() < 0.3:
                bits.append(f"sync {rng.choice(CHANNELS)}{rng.choice('!?')}")
            ups = [f"{x} = 0" for x in clocks if rng.random() < 0.4]
            if rng.random() < 0.25:
                ups.append("n = (n + 1) % 4")
            if ups:
                bits.append("assign " + ", ".join(ups))
            out.append("  " + " ".join(bits) + ";")
        out.append("}")
        out.append("")
    for k in range(n_aut):
        out.append(f"system P{k} = T{k}();")
    return "\n".join(out) + "\n"


def random_network(seed: int, **kw):
    return parse_system(random_network_text(seed, **kw), f"<random {seed}>")


def location_goals(net) -> list[tuple[int, int]]:
    return [(k, j) for k, inst in enumerate(net.instances) for j in range(len(inst.loc_ids))]
