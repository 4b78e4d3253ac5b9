"""Versioned JSON file formats for graphs, maps, subgroups, and towers.

Every document carries a top-level ``"format"`` tag.  Graphs are stored as
vertex lists plus undirected edges; an edge ``E`` from ``src`` to ``dst``
stands for the dart pair ``E+`` / ``E-``.  Maps and congruences refer to
darts as an edge id plus a ``flip`` flag.  Emission is canonical (sorted
keys, sorted members), so equal values serialize byte-identically.
"""

from __future__ import annotations

import json
import os

from .graphs import (
    Congruence,
    FiniteGraph,
    GraphError,
    GraphMorphism,
    edge_stem,
)
from .freegroup import FreeWord, GeneratorImages, NotTransitiveError, PermRep
from .covering import Covering, GroupAction, as_covering
from .towers import Tower, TowerError, UniversalSpec

GRAPH_FORMAT = "procover-graph/1"
MORPHISM_FORMAT = "procover-morphism/1"
CONGRUENCE_FORMAT = "procover-congruence/1"
REP_FORMAT = "procover-rep/1"
IMAGES_FORMAT = "procover-images/1"
ACTION_FORMAT = "procover-action/1"
TOWER_FORMAT = "procover-tower/1"
UNIVERSAL_FORMAT = "procover-universal/1"
REPORT_FORMAT = "procover-report/1"


class FormatError(ValueError):
    """Malformed or wrongly versioned input document."""


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def save_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_json(obj))


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError("cannot read %s: %s" % (path, exc)) from exc


def _expect(obj, fmt: str):
    if not isinstance(obj, dict):
        raise FormatError("expected an object with format %r" % fmt)
    if obj.get("format") != fmt:
        raise FormatError("expected format %r, found %r"
                          % (fmt, obj.get("format")))


def _get(obj, key, kind):
    if key not in obj:
        raise FormatError("missing key %r" % key)
    value = obj[key]
    if not isinstance(value, kind):
        raise FormatError("key %r has the wrong type" % key)
    return value


# -- graphs -----------------------------------------------------------------

def _edge_table(g: FiniteGraph) -> list[tuple[str, str, str]]:
    """(edge id, positive dart, negative dart) per edge pair."""
    return [(edge_stem(pos, neg), pos, neg) for pos, neg in g.dart_pairs()]


def _dart_refs(g: FiniteGraph) -> dict[str, tuple[str, bool]]:
    refs = {}
    for eid, pos, neg in _edge_table(g):
        refs[pos] = (eid, False)
        refs[neg] = (eid, True)
    return refs


def graph_to_obj(g: FiniteGraph) -> dict:
    obj = {
        "format": GRAPH_FORMAT,
        "vertices": list(g.vertices),
        "edges": [{"id": eid, "src": g.src[pos], "dst": g.src[neg]}
                  for eid, pos, neg in _edge_table(g)],
    }
    if g.name is not None:
        obj["name"] = g.name
    return obj


def graph_from_obj(obj) -> FiniteGraph:
    _expect(obj, GRAPH_FORMAT)
    vertices = _get(obj, "vertices", list)
    edges = []
    for entry in _get(obj, "edges", list):
        if not isinstance(entry, dict):
            raise FormatError("edge entries must be objects")
        edges.append((_get(entry, "id", str), _get(entry, "src", str),
                      _get(entry, "dst", str)))
    name = obj.get("name")
    try:
        return FiniteGraph.from_edges(vertices, edges, name=name)
    except GraphError as exc:
        raise FormatError("bad graph document: %s" % exc) from exc


def load_graph(path: str) -> FiniteGraph:
    return graph_from_obj(load_json(path))


def save_graph(path: str, g: FiniteGraph) -> None:
    save_json(path, graph_to_obj(g))


# -- morphisms ---------------------------------------------------------------

def _maps_to_obj(f: GraphMorphism) -> dict:
    refs = _dart_refs(f.codomain)
    edge_map = {}
    for eid, pos, _neg in _edge_table(f.domain):
        target, flip = refs[f.dmap[pos]]
        edge_map[eid] = {"edge": target, "flip": flip}
    return {"vertex_map": dict(f.vmap), "edge_map": edge_map}


def _maps_from_obj(obj, domain: FiniteGraph, codomain: FiniteGraph):
    vmap = _get(obj, "vertex_map", dict)
    edge_entries = _get(obj, "edge_map", dict)
    cod_edges = {eid: (pos, neg) for eid, pos, neg in _edge_table(codomain)}
    dmap = {}
    for eid, pos, neg in _edge_table(domain):
        if eid not in edge_entries:
            raise FormatError("edge_map is missing edge %r" % eid)
        entry = edge_entries[eid]
        target = _get(entry, "edge", str)
        flip = _get(entry, "flip", bool)
        if target not in cod_edges:
            raise FormatError("edge_map sends %r to unknown edge %r" % (eid, target))
        tpos, tneg = cod_edges[target]
        dmap[pos], dmap[neg] = ((tneg, tpos) if flip else (tpos, tneg))
    return vmap, dmap


def morphism_to_obj(f: GraphMorphism, embed_graphs: bool = True) -> dict:
    obj = {"format": MORPHISM_FORMAT}
    obj.update(_maps_to_obj(f))
    if embed_graphs:
        obj["domain"] = graph_to_obj(f.domain)
        obj["codomain"] = graph_to_obj(f.codomain)
    return obj


def morphism_from_obj(obj, domain: FiniteGraph | None = None,
                      codomain: FiniteGraph | None = None) -> GraphMorphism:
    _expect(obj, MORPHISM_FORMAT)
    if domain is None:
        if "domain" not in obj:
            raise FormatError("morphism document has no domain graph")
        domain = graph_from_obj(obj["domain"])
    if codomain is None:
        if "codomain" not in obj:
            raise FormatError("morphism document has no codomain graph")
        codomain = graph_from_obj(obj["codomain"])
    vmap, dmap = _maps_from_obj(obj, domain, codomain)
    try:
        return GraphMorphism(domain, codomain, vmap, dmap)
    except GraphError as exc:
        raise FormatError("document is not a graph morphism: %s" % exc) from exc


def load_morphism(path: str, domain=None, codomain=None) -> GraphMorphism:
    return morphism_from_obj(load_json(path), domain=domain, codomain=codomain)


def save_morphism(path: str, f: GraphMorphism, embed_graphs: bool = True) -> None:
    save_json(path, morphism_to_obj(f, embed_graphs=embed_graphs))


def covering_report_obj(cov: Covering, regular=None, deck_order=None,
                        image_rep=None) -> dict:
    """The standard emitted summary of a covering."""
    obj = {"degree": cov.degree}
    if regular is not None:
        obj["regular"] = regular
    if deck_order is not None:
        obj["deck_order"] = deck_order
    if image_rep is not None:
        obj["image_rep"] = rep_to_obj(image_rep)
    return obj


# -- congruences --------------------------------------------------------------

def congruence_to_obj(r: Congruence) -> dict:
    refs = _dart_refs(r.base)
    edge_classes = []
    seen = set()
    for cls in r.dart_classes:
        key = frozenset(cls)
        if key in seen:
            continue
        mirror = frozenset(r.base.inv[d] for d in cls)
        seen.add(key)
        seen.add(mirror)
        entry = sorted(({"edge": refs[d][0], "flip": refs[d][1]} for d in cls),
                       key=lambda e: (e["edge"], e["flip"]))
        edge_classes.append(entry)
    return {
        "format": CONGRUENCE_FORMAT,
        "vertex_classes": [list(c) for c in r.vertex_classes],
        "edge_classes": edge_classes,
    }


def congruence_from_obj(obj, base: FiniteGraph) -> Congruence:
    _expect(obj, CONGRUENCE_FORMAT)
    edges = {eid: (pos, neg) for eid, pos, neg in _edge_table(base)}
    dart_classes = set()
    for cls in _get(obj, "edge_classes", list):
        darts = []
        for entry in cls:
            eid = _get(entry, "edge", str)
            flip = _get(entry, "flip", bool)
            if eid not in edges:
                raise FormatError("unknown edge %r in a class" % eid)
            pos, neg = edges[eid]
            darts.append(neg if flip else pos)
        dart_classes.add(frozenset(darts))
        dart_classes.add(frozenset(base.inv[d] for d in darts))
    return Congruence(base, _get(obj, "vertex_classes", list),
                      [sorted(c) for c in sorted(dart_classes, key=sorted)])


def load_congruence(path: str, base: FiniteGraph) -> Congruence:
    return congruence_from_obj(load_json(path), base)


def save_congruence(path: str, r: Congruence) -> None:
    save_json(path, congruence_to_obj(r))


# -- subgroups and homomorphisms ----------------------------------------------

def rep_to_obj(rep: PermRep) -> dict:
    return {
        "format": REP_FORMAT,
        "rank": rep.rank,
        "degree": rep.degree,
        "perms": [list(p) for p in rep.perms],
    }


def rep_from_obj(obj) -> PermRep:
    _expect(obj, REP_FORMAT)
    try:
        return PermRep(_get(obj, "rank", int), _get(obj, "degree", int),
                       _get(obj, "perms", list))
    except NotTransitiveError:
        # a semantic verdict, not a format problem: callers report the orbits
        raise
    except ValueError as exc:
        raise FormatError("bad subgroup document: %s" % exc) from exc


def load_rep(path: str) -> PermRep:
    return rep_from_obj(load_json(path))


def save_rep(path: str, rep: PermRep) -> None:
    save_json(path, rep_to_obj(rep))


def images_to_obj(images: GeneratorImages) -> dict:
    return {
        "format": IMAGES_FORMAT,
        "source_rank": images.source_rank,
        "target_rank": images.target_rank,
        "images": [str(w) for w in images.images],
    }


def images_from_obj(obj) -> GeneratorImages:
    _expect(obj, IMAGES_FORMAT)
    try:
        words = tuple(FreeWord.parse(text)
                      for text in _get(obj, "images", list))
        return GeneratorImages(_get(obj, "source_rank", int),
                               _get(obj, "target_rank", int), words)
    except ValueError as exc:
        raise FormatError("bad homomorphism document: %s" % exc) from exc


# -- group actions -------------------------------------------------------------

def action_to_obj(act: GroupAction) -> dict:
    return {
        "format": ACTION_FORMAT,
        "elements": [str(g) for g in act.elements],
        "maps": {str(g): _maps_to_obj(act.morphisms[g]) for g in act.elements},
    }


def action_from_obj(obj, graph: FiniteGraph) -> GroupAction:
    _expect(obj, ACTION_FORMAT)
    names = _get(obj, "elements", list)
    maps = _get(obj, "maps", dict)
    if set(names) != set(maps):
        raise FormatError("elements and maps disagree")
    morphisms = {}
    for g in names:
        vmap, dmap = _maps_from_obj(maps[g], graph, graph)
        try:
            morphisms[g] = GraphMorphism(graph, graph, vmap, dmap)
        except GraphError as exc:
            raise FormatError("element %r is not a graph map: %s" % (g, exc)) from exc
    return GroupAction.from_morphisms(graph, morphisms)


def load_action(path: str, graph: FiniteGraph) -> GroupAction:
    return action_from_obj(load_json(path), graph)


# -- towers ---------------------------------------------------------------------

def load_tower_pieces(path: str):
    """Load a tower manifest into bare morphisms (no covering checks).

    Returns (level maps, cover steps, base steps, basepoints or None);
    paths inside the manifest are taken relative to the manifest.
    """
    obj = load_json(path)
    _expect(obj, TOWER_FORMAT)
    here = os.path.dirname(os.path.abspath(path))

    def resolve(rel):
        return rel if os.path.isabs(rel) else os.path.join(here, rel)

    levels = _get(obj, "levels", list)
    if not levels:
        raise FormatError("tower manifest has no levels")
    gammas, deltas, fs = [], [], []
    for entry in levels:
        gamma = load_graph(resolve(_get(entry, "gamma", str)))
        delta = load_graph(resolve(_get(entry, "delta", str)))
        gammas.append(gamma)
        deltas.append(delta)
        fs.append(load_morphism(resolve(_get(entry, "f", str)),
                                domain=gamma, codomain=delta))
    phis = [load_morphism(resolve(p), domain=gammas[i + 1], codomain=gammas[i])
            for i, p in enumerate(_get(obj, "phi", list))]
    psis = [load_morphism(resolve(p), domain=deltas[i + 1], codomain=deltas[i])
            for i, p in enumerate(_get(obj, "psi", list))]
    if len(phis) != len(fs) - 1 or len(psis) != len(fs) - 1:
        raise FormatError("expected %d bonding maps per side" % (len(fs) - 1))
    basepoints = obj.get("basepoints")
    return fs, phis, psis, basepoints


def load_tower(path: str) -> Tower:
    """Load a manifest as a verified Tower (levels must be coverings)."""
    fs, phis, psis, basepoints = load_tower_pieces(path)
    coverings = [as_covering(f) for f in fs]
    try:
        return Tower(coverings, phis, psis, basepoints=basepoints)
    except TowerError as exc:
        raise FormatError("manifest does not assemble into a tower: %s" % exc) from exc


def save_tower(dirpath: str, t: Tower, stem: str = "tower") -> str:
    """Write every component of a tower plus its manifest; returns the
    manifest path."""
    os.makedirs(dirpath, exist_ok=True)
    manifest = {"format": TOWER_FORMAT, "levels": [], "phi": [], "psi": []}
    for i, cov in enumerate(t.coverings):
        names = {"gamma": "%s_gamma%d.json" % (stem, i),
                 "delta": "%s_delta%d.json" % (stem, i),
                 "f": "%s_f%d.json" % (stem, i)}
        save_graph(os.path.join(dirpath, names["gamma"]), cov.domain)
        save_graph(os.path.join(dirpath, names["delta"]), cov.codomain)
        save_morphism(os.path.join(dirpath, names["f"]), cov.map)
        manifest["levels"].append(names)
    for i in range(t.top):
        phi_name = "%s_phi%d.json" % (stem, i)
        psi_name = "%s_psi%d.json" % (stem, i)
        save_morphism(os.path.join(dirpath, phi_name), t.cover_steps[i])
        save_morphism(os.path.join(dirpath, psi_name), t.base_steps[i])
        manifest["phi"].append(phi_name)
        manifest["psi"].append(psi_name)
    if t.basepoints is not None:
        manifest["basepoints"] = list(t.basepoints)
    manifest_path = os.path.join(dirpath, "%s.json" % stem)
    save_json(manifest_path, manifest)
    return manifest_path


def load_universal_spec(path: str) -> UniversalSpec:
    obj = load_json(path)
    _expect(obj, UNIVERSAL_FORMAT)
    here = os.path.dirname(os.path.abspath(path))

    def resolve(rel):
        return rel if os.path.isabs(rel) else os.path.join(here, rel)

    base = load_graph(resolve(_get(obj, "base", str)))
    quotients = [load_congruence(resolve(p), base)
                 for p in _get(obj, "quotients", list)]
    normals = [load_rep(resolve(p)) for p in _get(obj, "normals", list)]
    return UniversalSpec(base=base, basepoint=_get(obj, "basepoint", str),
                         quotients=quotients, normals=normals)
