"""Named generating sets and JSON (de)serialisation of generating sets and hulls."""

import json
from fractions import Fraction

from .errors import InvalidGenerators
from .lattice import GeneratorSet, TRIANGULATION_RULE, cone_measure


def _std(d):
    return [tuple(int(i == j) for j in range(d)) for i in range(d)]


PRESETS = {
    "std-d2": (_std(2), True),
    "std-d3": (_std(3), True),
    "chess-knight": ([(2, 1), (1, 2), (2, -1), (1, -2)], True),
    # ±e1±e2±e3 alone generates an index-4 sublattice; the face centres ±e_i
    # lie on L, so adding them keeps Q (the unit cube) while generating Z^3.
    "cube-d3": (
        [(1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1)] + _std(3),
        True,
    ),
    "six-one-d2": ([(6, 0), (1, 0), (0, 6), (0, 1)], True),
}


def preset(name):
    try:
        vectors, sym = PRESETS[name]
    except KeyError:
        raise InvalidGenerators(
            f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}"
        ) from None
    return GeneratorSet.from_vectors(vectors, symmetrize=sym)


def parse_generators(doc):
    """Build a :class:`GeneratorSet` from ``{"dim", "generators", "symmetrize"}``."""
    if not isinstance(doc, dict) or "generators" not in doc:
        raise InvalidGenerators('expected an object with a "generators" list')
    vectors = doc["generators"]
    if not isinstance(vectors, list) or not all(isinstance(v, list) for v in vectors):
        raise InvalidGenerators('"generators" must be a list of integer lists')
    for v in vectors:
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
            raise InvalidGenerators(f"non-integer coordinate in {v}")
    gens = GeneratorSet.from_vectors(vectors, symmetrize=bool(doc.get("symmetrize", False)))
    if "dim" in doc and doc["dim"] != gens.dim:
        raise InvalidGenerators(f'"dim" is {doc["dim"]} but generators have dimension {gens.dim}')
    return gens


def load_generators(path):
    with open(path) as fh:
        return parse_generators(json.load(fh))


def generators_to_json(gens, symmetrize=False):
    return {"dim": gens.dim, "generators": [list(v) for v in gens.vectors],
            "symmetrize": symmetrize}


def rational(q):
    return str(Fraction(q))


def parse_rational(s):
    return Fraction(s)


def shape_to_json(shape, measure=None):
    """Hull export; every rational is a ``"p/q"`` string so the file is bit-exact."""
    if measure is None:
        measure = cone_measure(shape)
    facet_measure = measure.per_facet(shape)
    out_facets = []
    k = 0
    for f, fm in zip(shape.facets, facet_measure):
        simplices = []
        for s in f.simplices:
            simplices.append({"vertices": list(s), "measure": rational(measure.weights[k])})
            k += 1
        out_facets.append({
            "vertices": list(f.vertex_indices),
            "normal": list(f.normal),
            "support": f.support,
            "measure": rational(fm),
            "simplices": simplices,
        })
    return {
        "dim": shape.dim,
        "vertices": [list(v) for v in shape.vertices],
        "boundary_generators": [list(v) for v in shape.boundary_generators],
        "volume": rational(shape.volume),
        "triangulation": TRIANGULATION_RULE,
        "facets": out_facets,
    }
