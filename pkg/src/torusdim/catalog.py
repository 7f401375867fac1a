"""Named example measures, usable from the command line as ``@name``."""

from __future__ import annotations

from .model import MeasureSpec, parse_spec_text

CATALOG = {
    # Bernoulli convolution squared, ratio the golden mean
    "golden": """\
[field]
min_poly = 1, 1, -1   # r^2 + r - 1
root_interval = 1/2, 1

[ifs]
digits = 0, 1 - r, 2 - 2*r
probs = 1/4, 1/2, 1/4
""",
    # two essential classes on the torus, structure only
    "essnotunique": """\
[field]
min_poly = 4, -1

[ifs]
digits = 0, 3/5, 6/5, 9/5, 3
""",
    # one essential class and three isolated simple loops
    "isolated": """\
[field]
min_poly = 4, -1

[ifs]
digits = 0, 1/8, 1/4, 3/8, 1/2, 7/8, 9/8, 3/2
probs = 1/2402, 1000/2402, 1000/2402, 100/2402, 100/2402, 100/2402, 100/2402, 1/2402
""",
    # strong separation: a single 1x1 loop
    "strictsep": """\
[field]
min_poly = 4, -1

[ifs]
digits = 0, 3/2
probs = 1/4, 3/4
""",
    # 3-fold convolution of the middle-third Cantor measure
    "cantor3": """\
[field]
min_poly = 3, -1

[ifs]
digits = 0, 2/3, 4/3, 2
probs = 1/8, 3/8, 3/8, 1/8
""",
}


def catalog_spec(name: str, mode=None) -> MeasureSpec:
    try:
        text = CATALOG[name]
    except KeyError:
        raise KeyError(f"no example named {name!r}; known: {', '.join(sorted(CATALOG))}") from None
    return parse_spec_text(text, mode)
