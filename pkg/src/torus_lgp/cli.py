"""Command-line front end: scenario files in, verdicts and certificates out.

A scenario is a YAML or JSON document::

    schema: 1
    kind: root_datum_query
    payload: {type: C3, op: weyl_order}
    expect: {order: 48}

validated against ``data/schema/scenario.schema.json``. ``run`` returns a
report ``{schema, kind, op, result[, expect]}`` that re-validates against
``data/schema/report.schema.json``. Exit codes: 0 success, 1 an ``expect``
block or a property check failed, 2 invalid input, 3 a resource cap was hit.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
import yaml

from . import algebra_model as am
from .cohomology import CHEBOTAREV, CohomologyCostError, PlaceModel, h, sha, sha_cyclic, tate_cyclic_oracle
from .catalog import load_pinned
from .embed import (
    TRANSPORT_OPS,
    GlobalScenario,
    LocalGroupDatum,
    TitsIndex,
    compute_tits_index,
    decide_all_orientations,
    decide_local,
    enumerate_orientations,
    lgp_certificate,
    obstruction_group,
    pinned_isomorphisms,
    tits_index_from_roots,
    transport_local_datum,
    transport_orientation,
)
from .exact_lattice import AbelianInvariants, Sublattice, kernel_basis, quotient_invariants, saturate, smith_normal_form
from .galois import (
    DEFAULT_GROUP_CAP,
    FiniteGroup,
    GammaLattice,
    GammaSet,
    GroupCapError,
    TwistedRootDatum,
    alternating_group,
    augmentation_sub,
    cyclic_group,
    dihedral_group,
    fixed_sublattice,
    induced_lattice,
    is_anisotropic,
    is_generic,
    norm_one_quotient,
    small_group_catalog,
    star_action,
    symmetric_group,
)
from .root_datum import (
    PinnedRootDatum,
    RootDatum,
    aut_group,
    cartan_and_dynkin,
    coxeter_element,
    derive,
    gl_datum,
    isomorphisms,
    predicates,
    reflection,
    simple_system,
    validate,
    weyl_group,
)

__all__ = [
    "SCHEMA_VERSION",
    "ScenarioError",
    "load_scenario",
    "validate_scenario",
    "validate_report",
    "run",
    "run_file",
    "reproduce_example_2_13",
    "example_2_13_scenario",
    "transport_invariance",
    "render_text",
    "main",
]

SCHEMA_VERSION = 1
EXIT_OK, EXIT_MISMATCH, EXIT_INVALID, EXIT_CAP = 0, 1, 2, 3


class ScenarioError(ValueError):
    """Invalid scenario; ``errors`` holds ``(path, message)`` pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{p or '<root>'}: {m}" for p, m in self.errors))


@lru_cache(maxsize=None)
def _schema(name: str) -> dict:
    text = resources.files("torus_lgp").joinpath("data", "schema", f"{name}.schema.json").read_text()
    return json.loads(text)


def _diagnostics(schema: dict, doc) -> list[tuple[str, str]]:
    validator = jsonschema.Draft202012Validator(schema)
    out = []
    for err in validator.iter_errors(doc):
        while err.context:
            # prefer a branch that failed on content over one that failed on type
            err = min(err.context, key=lambda e: (e.validator == "type", -len(e.absolute_path), e.message))
        out.append(("/".join(str(p) for p in err.absolute_path), err.message))
    return sorted(set(out))


def validate_scenario(doc) -> dict:
    """Raise :class:`ScenarioError` with path-to-field diagnostics unless ``doc`` is valid."""
    errors = _diagnostics(_schema("scenario"), doc)
    if errors:
        raise ScenarioError(errors)
    return doc


def validate_report(report) -> dict:
    errors = _diagnostics(_schema("report"), report)
    if errors:
        raise ScenarioError(errors)
    return report


def load_scenario(path) -> dict:
    """Parse a YAML/JSON scenario file and validate it."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError([("", f"not valid YAML/JSON: {exc}")]) from None
    return validate_scenario(doc)


# ---------------------------------------------------------------------------
# Building objects from payload fragments


class _Context:
    def __init__(self, cap: int = DEFAULT_GROUP_CAP, places: str | None = None):
        self.cap = cap
        self.places = places


@lru_cache(maxsize=None)
def _named_groups() -> dict[str, FiniteGroup]:
    return {G.name: G for G in small_group_catalog(24)}


_NAMED = re.compile(r"^([ZDSA])([0-9]+)$")


def build_group(spec, cap: int = DEFAULT_GROUP_CAP) -> FiniteGroup:
    """Group from a name (``Z6``, ``D4``, ``S3``, ``A4``, ``Q8``, ...) or explicit permutations."""
    if isinstance(spec, dict):
        return FiniteGroup(spec["degree"], spec["generators"], cap=cap, name=spec.get("name", ""))
    if spec == "trivial":
        return cyclic_group(1)
    m = _NAMED.match(spec)
    if m:
        letter, n = m.group(1), int(m.group(2))
        if n < 1:
            raise ScenarioError([("group", f"{spec} is not a group")])
        order = {"Z": n, "D": 2 * n, "S": math.factorial(n), "A": max(math.factorial(n) // 2, 1)}[letter]
        if order > cap:
            raise GroupCapError(f"{spec} has order {order}, above the cap of {cap}")
        return {"Z": cyclic_group, "D": dihedral_group, "S": symmetric_group, "A": alternating_group}[letter](n)
    groups = _named_groups()
    if spec not in groups:
        raise ScenarioError([("group", f"unknown group name {spec!r}")])
    G = groups[spec]
    if G.order > cap:
        raise GroupCapError(f"{spec} has order {G.order}, above the cap of {cap}")
    return G


def build_subgroup(G: FiniteGroup, spec) -> FiniteGroup:
    if spec == "all":
        return G
    if spec == "trivial":
        return G.trivial_subgroup()
    if "generators" in spec:
        for p in spec["generators"]:
            if tuple(p) not in G:
                raise ScenarioError([("subgroup", f"{p} is not an element of {G.name or 'the group'}")])
        return G.subgroup(spec["generators"])
    bad = [k for k in spec["elements"] if k >= G.order]
    if bad:
        raise ScenarioError([("subgroup", f"element indices {bad} exceed the group order {G.order}")])
    return G.subgroup_by_indices(spec["elements"])


def build_pinned(spec) -> PinnedRootDatum:
    if "type" in spec:
        try:
            return load_pinned(spec["type"], spec.get("form", "sc"))
        except KeyError as exc:
            raise ScenarioError([("datum", str(exc.args[0]))]) from None
    if "gl" in spec:
        return simple_system(gl_datum(spec["gl"]))
    if "split_model" in spec:
        s = spec["split_model"]
        return am.split_root_datum(s["tau_type"], s["n"])
    psi = RootDatum(spec["rank"], tuple(map(tuple, spec["roots"])), tuple(map(tuple, spec["coroots"])), spec.get("name", ""))
    return simple_system(psi)


def build_twisted(G: FiniteGroup, spec, name: str = "") -> TwistedRootDatum:
    p = build_pinned(spec["datum"])
    r = p.base.rank
    action = spec.get("action", "trivial")
    k = len(G.generators)
    if action == "trivial":
        mats = [np.eye(r, dtype=np.int64)] * k
    elif action == "-1":
        mats = [-np.eye(r, dtype=np.int64)] * k
    else:
        mats = action
        if len(mats) != k:
            raise ScenarioError([("action", f"need {k} matrices, one per group generator")])
    delta = spec.get("delta", p.delta if p.base.n_roots else None)
    return TwistedRootDatum(p.base, G, mats, name or p.base.name, delta)


def build_gamma_set(G: FiniteGroup, spec) -> GammaSet:
    if spec == "regular":
        return GammaSet.regular(G)
    if spec == "point":
        return GammaSet(G, 1, tuple((0,) for _ in G.generators))
    return GammaSet(G, spec["size"], tuple(tuple(p) for p in spec["generators"]))


def build_module(G: FiniteGroup, spec) -> GammaLattice:
    if isinstance(spec, str):
        if spec == "Z":
            return GammaLattice.trivial(G, 1)
        if spec == "Z(-1)":
            return GammaLattice.from_character(G, [-1] * len(G.generators))
        if spec.startswith("Z/"):
            return GammaLattice.trivial(G, 1, modulus=int(spec[2:]))
        X = GammaSet.regular(G)
        return {"Z[G]": induced_lattice, "J_G": norm_one_quotient, "I_G": augmentation_sub}[spec](X)
    if "induced" in spec:
        return induced_lattice(build_gamma_set(G, spec["induced"]))
    if "norm_one" in spec:
        return norm_one_quotient(build_gamma_set(G, spec["norm_one"]))
    if "augmentation" in spec:
        return augmentation_sub(build_gamma_set(G, spec["augmentation"]))
    r = spec["rank"]
    rel = spec["modulus"] * np.eye(r, dtype=np.int64) if spec.get("modulus") else None
    return GammaLattice(G, r, spec["generators"], relations=rel)


def build_etale(spec, ctx: _Context) -> am.EtaleInvolution:
    G = build_group(spec["group"], ctx.cap)
    factors = []
    for f in spec["factors"]:
        H = build_subgroup(G, f["H"])
        factors.append((H, build_subgroup(G, f.get("H_prime", f["H"]))))
    k_sub = build_subgroup(G, spec["k_subgroup"]) if "k_subgroup" in spec else None
    return am.etale_involution(G, factors, spec["tau_type"], fixed_point=spec.get("fixed_point", False), k_subgroup=k_sub)


def _places(G: FiniteGroup, spec, ctx: _Context):
    if ctx.places == "chebotarev" or spec == "chebotarev":
        return CHEBOTAREV
    if ctx.places == "explicit" and spec is None:
        raise ScenarioError([("payload/places", "--places explicit needs a place list in the payload")])
    out = []
    for i, p in enumerate(spec or []):
        if isinstance(p, dict) and "decomposition" in p:
            out.append(PlaceModel(p["label"], build_subgroup(G, p["decomposition"])))
        else:
            out.append(PlaceModel(f"v{i + 1}", build_subgroup(G, p)))
    return out


def _nodes(spec, diagram, datum: TwistedRootDatum, D: FiniteGroup | None = None) -> TitsIndex:
    if spec == "computed":
        return compute_tits_index(datum, D)
    if spec == "all":
        return TitsIndex(diagram, frozenset(diagram.nodes))
    if spec == "none":
        return TitsIndex(diagram, frozenset())
    if isinstance(spec, dict):
        return tits_index_from_roots(datum if D is None else datum.restrict(D), spec["roots"])
    return TitsIndex(diagram, frozenset(spec))


# ---------------------------------------------------------------------------
# Serialisation


def _plain(x):
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, frozenset):
        return sorted(_plain(v) for v in x)
    return x


def _invariants(a: AbelianInvariants) -> list[int]:
    """Invariant factors, ``0`` standing for a copy of ``ZZ``."""
    return list(a.torsion) + [0] * a.free_rank


def _cohomology(H) -> dict:
    return {"invariants": _invariants(H.invariants), "trivial": H.is_trivial}


def _datum(psi: RootDatum) -> dict:
    label = cartan_and_dynkin(simple_system(psi))[1].label
    return {"rank": psi.rank, "roots": psi.roots, "coroots": psi.coroots, "type": label, "n_roots": psi.n_roots}


def _basis(L: Sublattice) -> list:
    return L.basis().vectors()


# ---------------------------------------------------------------------------
# Kind handlers


def _root_datum_query(p: dict, ctx: _Context) -> dict:
    pinned = build_pinned(p["datum"] if "datum" in p else {k: p[k] for k in ("type", "form") if k in p})
    psi = pinned.base
    op = p["op"]
    if op == "validate":
        rep = validate(psi)
        return {"ok": rep.ok, "violations": [f"{v.axiom}[{v.index}]: {v.detail}" for v in rep.violations]}
    if op == "reflect":
        if "root" not in p or "x" not in p:
            raise ScenarioError([("payload", "reflect needs 'root' and 'x'")])
        return {"image": reflection(psi, p["root"], p["x"])}
    if op == "weyl_order":
        return {"order": weyl_group(psi).order}
    if op == "simple_system":
        return {"delta": pinned.delta, "simple_roots": pinned.simple_roots}
    if op == "cartan":
        C, diagram = cartan_and_dynkin(pinned)
        return {"cartan": C, "type": diagram.label}
    if op == "derive":
        out = psi
        for step in p.get("derive", ["ad"]):
            out = derive(out, step)
        return {"datum": _datum(out), "equal_to_input": out == psi}
    if op == "predicates":
        pr = predicates(psi)
        return {"reduced": pr.reduced, "semisimple": pr.semisimple, "simply_connected": pr.simply_connected, "adjoint": pr.adjoint}
    if op == "isomorphisms":
        if "other" not in p:
            raise ScenarioError([("payload", "isomorphisms needs 'other'")])
        return {"count": len(isomorphisms(psi, build_pinned(p["other"]).base))}
    if op == "aut_order":
        A = aut_group(psi, pinned)
        return {"aut": A.order, "weyl": A.weyl.order, "e_delta": len(A.e_delta)}
    if op == "coxeter":
        c = coxeter_element(pinned)
        order, power = 1, c.copy()
        while not np.array_equal(power, np.eye(psi.rank, dtype=np.int64)):
            power, order = power @ c, order + 1
        fixed = kernel_basis((c - np.eye(psi.rank, dtype=np.int64)).tolist(), psi.rank)
        return {"matrix": c, "order": order, "fixed_rank": fixed.rank}
    G = build_group(p.get("group", "trivial"), ctx.cap)
    T = build_twisted(G, {"datum": p["datum"] if "datum" in p else {k: p[k] for k in ("type", "form") if k in p}, "action": p.get("action", "trivial")})
    D = build_subgroup(G, p["subgroup"]) if "subgroup" in p else None
    if op == "fixed_sublattice":
        return {"basis": _basis(fixed_sublattice(T, D))}
    if op == "is_anisotropic":
        return {"anisotropic": is_anisotropic(T, D)}
    if op == "is_generic":
        return {"generic": is_generic(T)}
    perms = star_action(T)
    gens = [perms[k] for k in G.generator_indices]
    return {"generator_perms": gens, "trivial": all(g == tuple(range(len(g))) for g in gens)}


def _cohomology_query(p: dict, ctx: _Context) -> dict:
    op = p["op"]
    if op in ("smith", "kernel", "saturate", "quotient"):
        if "matrix" not in p:
            raise ScenarioError([("payload", f"{op} needs 'matrix'")])
        A = p["matrix"]
        ncols = p.get("ambient", len(A[0]) if A else 0)
        if op == "smith":
            _, D, _ = smith_normal_form(A)
            return {"diagonal": list(D.diagonal()), "shape": list(D.shape)}
        if op == "kernel":
            K = kernel_basis(A, ncols)
            return {"basis": _basis(K), "rank": K.rank}
        L = Sublattice.span(ncols, A)
        if op == "saturate":
            return {"basis": _basis(saturate(L))}
        return {"invariants": _invariants(quotient_invariants(ncols, L))}
    G = build_group(p.get("group", "trivial"), ctx.cap)
    M = build_module(G, p.get("module", "Z"))
    i = p.get("degree", 1)
    if op == "module":
        rel = quotient_invariants(M.rank, Sublattice.span(M.rank, M.relations.tolist())) if len(M.relations) else AbelianInvariants(M.rank)
        return {"rank": M.rank, "generator_matrices": M.generator_matrices, "group": _invariants(rel)}
    D = build_subgroup(G, p["subgroup"]) if "subgroup" in p else None
    if op == "fixed":
        return {"basis": _basis(fixed_sublattice(M, D))}
    if op == "anisotropic":
        return {"anisotropic": is_anisotropic(M, D)}
    if op == "h":
        return _cohomology(h(i, G, M))
    if op == "tate":
        return {"invariants": _invariants(tate_cyclic_oracle(G, M, i))}
    if op == "sha_cyclic":
        return _cohomology(sha_cyclic(i, G, M))
    if op == "restriction":
        if D is None:
            raise ScenarioError([("payload", "restriction needs 'subgroup'")])
        kernel = sha(i, G, M, [D])
        return {"source": _invariants(h(i, G, M).invariants), "target": _invariants(h(i, D, M.restrict(D)).invariants), "kernel": _invariants(kernel.invariants), "injective": kernel.is_trivial}
    places = _places(G, p.get("places", []), ctx)
    return _cohomology(sha(i, G, M, places if places is CHEBOTAREV else [v.decomposition for v in places]))


def _orientation_entry(u) -> dict:
    return {"diagram_map": u.diagram_map, "identity": u.is_identity_map()}


def _embedding_query(p: dict, ctx: _Context) -> dict:
    G = build_group(p["group"], ctx.cap)
    psi = build_twisted(G, p["psi"], "psi")
    g = build_twisted(G, p["g"], "G") if "g" in p else psi
    op = p["op"]
    if op == "tits_index":
        D = build_subgroup(G, p["subgroup"]) if "subgroup" in p else None
        I = compute_tits_index(psi, D)
        return {"type": I.diagram.label, "distinguished": I.distinguished, "circled": I.circled}
    if op == "orientations":
        us = enumerate_orientations(psi, g)
        return {"count": len(us), "orientations": [_orientation_entry(u) for u in us]}
    if op == "decide_local":
        _, dpsi = cartan_and_dynkin(psi.pinned)
        _, dg = cartan_and_dynkin(g.pinned)
        I = _nodes(p.get("psi_index", "computed"), dpsi, psi)
        Gd = LocalGroupDatum(g, _nodes(p.get("g_index", "computed"), dg, g))
        rows = []
        for u in enumerate_orientations(psi, g):
            d = decide_local(I, Gd, u)
            rows.append({**_orientation_entry(u), "ok": d.ok, "mapped": d.mapped, "required": d.required})
        return {"results": rows, "any": any(r["ok"] for r in rows), "psi_index": I.distinguished, "g_index": Gd.index.distinguished}
    if op == "decide":
        return _decide(G, psi, g, p, ctx)
    places = _places(G, p.get("places"), ctx)
    if op == "certificate":
        c = lgp_certificate(psi, places)
        return {"kind": c.kind.value, "place": c.place, "witness": c.witness}
    return _cohomology(obstruction_group(psi, places))


def _scenario_from_payload(G, psi, g, p) -> GlobalScenario:
    places, g_data = [], {}
    _, dg = cartan_and_dynkin(g.pinned)
    for entry in p.get("places") or []:
        if not isinstance(entry, dict) or "label" not in entry:
            raise ScenarioError([("payload/places", "decide needs places with label, decomposition and g_index")])
        D = build_subgroup(G, entry["decomposition"])
        local = g.restrict(D)
        places.append(PlaceModel(entry["label"], D))
        g_data[entry["label"]] = LocalGroupDatum(local, _nodes(entry["g_index"], dg, g, D))
    return GlobalScenario(G, psi, g_data, places, g_global=g)


def _table_report(scenario: GlobalScenario) -> dict:
    t = decide_all_orientations(scenario)
    return {
        "places": t.place_labels,
        "orientations": [{**_orientation_entry(u), "verdicts": [d.ok for d in row]} for u, row in zip(t.orientations, t.table)],
        "local_exists": t.local_exists,
        "psi_indices": [I.distinguished for I in t.psi_indices],
        "g_indices": [scenario.g_data[v].index.distinguished for v in t.place_labels],
        "verdict": t.verdict.value,
    }


def _decide(G, psi, g, p, ctx) -> dict:
    if ctx.places == "chebotarev" or p.get("places") == "chebotarev":
        raise ScenarioError([("payload/places", "decide needs explicit places with local Tits indices")])
    return _table_report(_scenario_from_payload(G, psi, g, p))


def _split_model_report(M: am.SplitModel) -> dict:
    B = M.B
    units = [(a, b) for a in range(M.size) for b in range(M.size) if M.allowed(a, b)]
    involutive = True
    for a, b in units:
        E = np.zeros((M.size, M.size), dtype=np.int64)
        E[a, b] = 1
        if not np.array_equal(M.tau0(M.tau0(E)), E):
            involutive = False
    return {
        "B": B,
        "pairs": M.pairs,
        "size": M.size,
        "rank": M.rank,
        "symmetric": bool(np.array_equal(B, B.T)),
        "antisymmetric": bool(np.array_equal(B, -B.T)),
        "tau_involutive": involutive,
    }


def _algebra_query(p: dict, ctx: _Context) -> dict:
    op = p["op"]
    if op in ("split_model", "split_root_datum"):
        if "tau_type" not in p or "n" not in p:
            raise ScenarioError([("payload", f"{op} needs 'tau_type' and 'n'")])
        if op == "split_model":
            return _split_model_report(am.split_model(p["tau_type"], p["n"]))
        P = am.split_root_datum(p["tau_type"], p["n"])
        roots_rank = Sublattice.span(P.base.rank, P.base.roots).rank if P.base.n_roots else 0
        return {"type": cartan_and_dynkin(P)[1].label, "n_roots": P.base.n_roots, "rank": P.base.rank, "central_rank": P.base.rank - roots_rank}
    if "etale" not in p:
        raise ScenarioError([("payload", f"{op} needs 'etale'")])
    E = build_etale(p["etale"], ctx)
    if op == "torus_lattice":
        L = am.torus_lattice(E)
        return {"rank": L.rank, "generator_matrices": L.generator_matrices}
    if op == "twisted_datum":
        T = am.build_twisted_datum(E)
        return {"type": cartan_and_dynkin(T.pinned)[1].label, "n_roots": T.base.n_roots, "generator_matrices": T.lattice.generator_matrices, "star_action": [star_action(T)[k] for k in T.group.generator_indices] if T.base.n_roots else []}
    if op == "thm25":
        D = build_subgroup(E.group, p.get("place", "all"))
        return {"hypothesis": am.thm25_hypothesis(E, D)}
    if op == "lemma26":
        r = am.lemma26_check(E)
        return {"ok": r.ok, "rank_P": r.rank_P, "rank_J": r.rank_J, "rank_J_sigma": r.rank_J_sigma, "isomorphic": r.isomorphic, "parity_ok": r.parity_ok, "tested": r.tested, "witness": r.witness}
    if op == "thm27":
        locals_ = [am.LocalAlgebraData(PlaceModel(x["label"], build_subgroup(E.group, x["decomposition"])), x["a_split"], x["disc_split"]) for x in p.get("locals", [])]
        return {"result": am.thm27_case(p.get("A", "matrix_over_field"), locals_, E)}
    if op == "second_kind_orientation":
        T = am.build_twisted_datum(E)
        u = am.second_kind_orientation(E, T)
        w = am.other_orientation(u)
        return {"orientation": _orientation_entry(u), "other": _orientation_entry(w), "autext": len(pinned_isomorphisms(T.pinned, T.pinned))}
    T = am.build_twisted_datum(E)
    return _cohomology(obstruction_group(T, _places(E.group, p.get("places", "chebotarev"), ctx)))


# ---------------------------------------------------------------------------
# Example 2.13


def _example_2_13_objects():
    G = cyclic_group(2)
    triv = G.trivial_subgroup()
    E = am.etale_involution(G, [(triv, triv)] * 3, "orthogonal")
    psi = am.build_twisted_datum(E, name="psi")
    fork_a = {"v1": (0, 2, 4), "v2": (0, 2, 4), "v3": (0, 2, 5), "v4": (0, 2, 5)}
    _, diagram = cartan_and_dynkin(psi.pinned)
    local = psi.restrict(G)
    g_data = {v: LocalGroupDatum(local, TitsIndex(diagram, frozenset(nodes))) for v, nodes in fork_a.items()}
    places = [PlaceModel(v, G) for v in fork_a]
    return GlobalScenario(G, psi, g_data, places, g_global=psi)


def example_2_13_scenario() -> GlobalScenario:
    """Four places, ``G`` with Tits index mirrored across the fork of ``D6``."""
    return _example_2_13_objects()


def reproduce_example_2_13() -> dict:
    """Truth table, per-place existence and global verdict for the ``D6`` example.

    ``Psi`` is the twisted datum of the orthogonal involution on a product
    of three quadratic extensions (``Gamma = ZZ/2`` swapping each pair), so
    its Tits index at every place is ``{alpha_1, alpha_3, alpha_5}``. ``G``
    has that index at ``v1, v2`` and the fork-mirrored
    ``{alpha_1, alpha_3, alpha_6}`` at ``v3, v4``.
    """
    scenario = _example_2_13_objects()
    report = _table_report(scenario)
    psi = scenario.psi
    names = {}
    for o in report["orientations"]:
        o["name"] = "u" if o["identity"] else "u'"
        names[o["name"]] = o
    simple = psi.pinned.simple_roots
    report["distinguished_roots"] = {
        v: [simple[i] for i in sorted(scenario.g_data[v].index.distinguished)] for v in report["places"]
    }
    report["circled"] = {v: sorted(scenario.g_data[v].index.circled) for v in report["places"]}
    report["type"] = cartan_and_dynkin(psi.pinned)[1].label
    return _plain(report)


# ---------------------------------------------------------------------------
# Transport invariance over a scenario


def transport_invariance(doc: dict, ops=TRANSPORT_OPS) -> dict[str, bool]:
    """For a decision scenario, whether every ``decide_local`` verdict survives each transport op.

    Returns ``{op: unchanged}``; empty for scenarios without local decisions.
    """
    kind, p = doc["kind"], doc.get("payload", {})
    ctx = _Context()
    if kind == "example_2_13":
        scenario = _example_2_13_objects()
        cases = _cases_from_scenario(scenario)
    elif kind == "embedding_query" and p["op"] in ("decide", "decide_local"):
        G = build_group(p["group"], ctx.cap)
        psi = build_twisted(G, p["psi"], "psi")
        g = build_twisted(G, p["g"], "G") if "g" in p else psi
        if p["op"] == "decide":
            cases = _cases_from_scenario(_scenario_from_payload(G, psi, g, p))
        else:
            _, dpsi = cartan_and_dynkin(psi.pinned)
            _, dg = cartan_and_dynkin(g.pinned)
            I = _nodes(p.get("psi_index", "computed"), dpsi, psi)
            Gd = LocalGroupDatum(g, _nodes(p.get("g_index", "computed"), dg, g))
            cases = [(I, Gd, u) for u in enumerate_orientations(psi, g)]
    else:
        return {}
    out = {}
    for op in ops:
        same = True
        for I, Gd, u in cases:
            before = decide_local(I, Gd, u).ok
            v = transport_orientation(u, op)
            Gt = transport_local_datum(Gd, op)
            It = TitsIndex(cartan_and_dynkin(v.source.pinned)[1], I.distinguished)
            if decide_local(It, Gt, v).ok != before:
                same = False
        out[op] = same
    return out


def _cases_from_scenario(scenario: GlobalScenario):
    from .embed import Orientation, _align_groups, _is_fixed

    cases = []
    rows = enumerate_orientations(scenario.psi, scenario.g_global)
    for place in scenario.places:
        Gd = scenario.g_data[place.label]
        local_psi = scenario.psi.restrict(place.decomposition)
        I = compute_tits_index(local_psi)
        for u in rows:
            if _is_fixed(*_align_groups(local_psi, Gd.datum), u.matrix):
                cases.append((I, Gd, Orientation(local_psi, Gd.datum, u.matrix, u.diagram_map)))
    return cases


# ---------------------------------------------------------------------------
# Entry points

_HANDLERS = {
    "root_datum_query": _root_datum_query,
    "cohomology_query": _cohomology_query,
    "embedding_query": _embedding_query,
    "algebra_query": _algebra_query,
}


def _match(expected, actual, path: str, out: list[str]):
    if isinstance(expected, dict) and isinstance(actual, dict):
        for k, v in expected.items():
            if k not in actual:
                out.append(f"{path}/{k}: missing from result")
            else:
                _match(v, actual[k], f"{path}/{k}", out)
    elif expected != actual:
        out.append(f"{path}: expected {json.dumps(expected)}, got {json.dumps(actual)}")


def run(doc: dict, cap_group_order: int = DEFAULT_GROUP_CAP, places: str | None = None) -> dict:
    """Validate ``doc``, dispatch it, and return the report dictionary."""
    validate_scenario(doc)
    ctx = _Context(cap_group_order, places)
    kind = doc["kind"]
    if kind == "example_2_13":
        op, result = "reproduce", reproduce_example_2_13()
    else:
        op = doc["payload"]["op"]
        result = _plain(_HANDLERS[kind](doc["payload"], ctx))
    report = {"schema": SCHEMA_VERSION, "kind": kind, "op": op, "result": result}
    if "expect" in doc:
        mismatches: list[str] = []
        _match(doc["expect"], result, "result", mismatches)
        report["expect"] = {"ok": not mismatches, "mismatches": mismatches}
    return validate_report(report)


def run_file(path, **kwargs) -> dict:
    return run(load_scenario(path), **kwargs)


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _fmt(v) -> str:
    return json.dumps(v, sort_keys=True, separators=(",", ":"))


def render_text(report: dict) -> str:
    """Human summary: one ``key: value`` line per result field."""
    lines = [f"{report['kind']} / {report['op']}"]
    res = report["result"]
    if report["kind"] == "example_2_13" or (report["op"] == "decide" and "orientations" in res):
        places = res["places"]
        lines.append("orientation  " + "  ".join(f"{v:>3}" for v in places))
        for o in res["orientations"]:
            label = o.get("name", _fmt(o["diagram_map"]))
            lines.append(f"{label:<11}  " + "  ".join(f"{'T' if x else 'F':>3}" for x in o["verdicts"]))
        lines.append("local exists " + "  ".join(f"{'T' if x else 'F':>3}" for x in res["local_exists"]))
        lines.append(f"verdict: {res['verdict']}")
    else:
        for k in sorted(res):
            lines.append(f"{k}: {_fmt(res[k])}")
    if "expect" in report:
        lines.append("expect: " + ("ok" if report["expect"]["ok"] else "MISMATCH"))
        lines += [f"  {m}" for m in report["expect"]["mismatches"]]
    return "\n".join(lines) + "\n"


CHECKS = ("tate", "certificate", "thm25", "type_c", "transport")


def run_check(prop: str, seed: int, trials: int) -> dict:
    """Randomised property check; ``violations`` lists failing trials."""
    from .sampling import random_cyclic_lattice, random_etale_involution, random_twisted_datum

    rng = np.random.default_rng(seed)
    violations = []
    for t in range(trials):
        if prop == "tate":
            n = int(rng.integers(1, 13))
            M = random_cyclic_lattice(rng, n)
            for i in (1, 2):
                if h(i, M.group, M).invariants != tate_cyclic_oracle(M.group, M, i):
                    violations.append(f"trial {t}: Z/{n} degree {i}")
        elif prop == "certificate":
            T = random_twisted_datum(rng)
            if lgp_certificate(T, CHEBOTAREV).kind.value != "NONE" and not obstruction_group(T, CHEBOTAREV).is_trivial:
                violations.append(f"trial {t}: {T.name} over {T.group.order} elements")
        elif prop == "thm25":
            E = random_etale_involution(rng, "orthogonal", odd=True)
            T = am.build_twisted_datum(E)
            if not am.lemma26_check(E).ok:
                violations.append(f"trial {t}: lemma26 failed on {E.group.name}")
            hyp = any(am.thm25_hypothesis(E, D) for D in E.group.cyclic_subgroup_classes())
            if hyp and not obstruction_group(T, CHEBOTAREV).is_trivial:
                violations.append(f"trial {t}: nonzero obstruction on {E.group.name}")
        elif prop == "type_c":
            E = random_etale_involution(rng, "symplectic")
            if not obstruction_group(am.build_twisted_datum(E), CHEBOTAREV).is_trivial:
                violations.append(f"trial {t}: {E.group.name}")
        else:
            T = random_twisted_datum(rng)
            D = T.group.cyclic_subgroup_classes()[int(rng.integers(len(T.group.cyclic_subgroup_classes())))]
            local = T.restrict(D)
            I = compute_tits_index(local)
            Gd = LocalGroupDatum(local, I)
            for u in enumerate_orientations(local, local):
                before = decide_local(I, Gd, u).ok
                for op in TRANSPORT_OPS:
                    v = transport_orientation(u, op)
                    It = TitsIndex(cartan_and_dynkin(v.source.pinned)[1], I.distinguished)
                    if decide_local(It, transport_local_datum(Gd, op), v).ok != before:
                        violations.append(f"trial {t}: {T.name} op {op}")
    return {"property": prop, "seed": seed, "trials": trials, "violations": violations}


def _global_flags(ap: argparse.ArgumentParser, defaults: bool):
    # subcommands repeat the flags without defaults so either position works
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    ap.add_argument("--format", choices=("json", "text"), default=d("json"))
    ap.add_argument("--cap-group-order", type=int, default=d(DEFAULT_GROUP_CAP), metavar="N")
    ap.add_argument("--places", choices=("explicit", "chebotarev"), default=d(None))
    ap.add_argument("--seed", type=int, default=d(0), help="seed for randomised property checks")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="torus-lgp", description="Local-global embedding checks for maximal tori.")
    _global_flags(ap, True)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, False)
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="run one or more scenario files")
    r.add_argument("files", nargs="+", type=Path)
    sub.add_parser("example-2-13", parents=[common], help="reproduce the four-place D6 example")
    c = sub.add_parser("check", parents=[common], help="randomised property check")
    c.add_argument("property", choices=CHECKS)
    c.add_argument("--trials", type=int, default=50)
    v = sub.add_parser("validate", parents=[common], help="validate scenario files without running them")
    v.add_argument("files", nargs="+", type=Path)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    render = render_json if args.format == "json" else render_text
    status = EXIT_OK
    try:
        if args.command == "example-2-13":
            doc = {"schema": SCHEMA_VERSION, "kind": "example_2_13", "payload": {}}
            sys.stdout.write(render(run(doc)))
        elif args.command == "check":
            rep = run_check(args.property, args.seed, args.trials)
            report = {"schema": SCHEMA_VERSION, "kind": "check", "op": args.property, "result": rep}
            sys.stdout.write(render(validate_report(report)))
            if rep["violations"]:
                status = EXIT_MISMATCH
        elif args.command == "validate":
            for f in args.files:
                load_scenario(f)
                sys.stdout.write(f"{f}: ok\n")
        else:
            for f in args.files:
                report = run_file(f, cap_group_order=args.cap_group_order, places=args.places)
                if len(args.files) > 1:
                    report["source"] = str(f)
                sys.stdout.write(render(report))
                if "expect" in report and not report["expect"]["ok"]:
                    status = EXIT_MISMATCH
    except ScenarioError as exc:
        for path, msg in exc.errors:
            sys.stderr.write(f"error: {path or '<root>'}: {msg}\n")
        return EXIT_INVALID
    except (GroupCapError, CohomologyCostError) as exc:
        sys.stderr.write(f"resource cap: {exc}\n")
        return EXIT_CAP
    except (ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    return status


if __name__ == "__main__":
    sys.exit(main())
