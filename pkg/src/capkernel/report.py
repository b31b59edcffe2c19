"""Report assembly and rendering.

Every command produces a plain dict with ``validation``, ``computation`` and
``provenance`` sections.  The structured rendering is canonical JSON (sorted
keys, fixed separators), and the text rendering walks the same dict, so both
carry identical data.
"""

import json

REPORT_FORMAT_VERSION = 1
TOOL_VERSION = "0.1.0"

MAP_NAMES = ("kummer", "inclusion", "snake", "transgression")


def _rat(q):
    return str(q)


def element_data(x):
    return [_rat(c) for c in x.coords()]


def group_data(G):
    return {"invariants": list(G.invariants), "free_rank": G.free_rank,
            "order": G.order if G.is_finite else None,
            "structure": G.describe()}


def hom_data(h):
    return {"source": h.source.describe(), "target": h.target.describe(),
            "matrix": [list(r) for r in h.matrix]}


def validation_data(entries):
    checks = [{"check": e.check, "passed": bool(e.passed), "detail": e.detail} for e in entries]
    return {"passed": all(c["passed"] for c in checks), "checks": checks}


def provenance_data(seed, precision_used, options=None):
    out = {"seed": seed, "precision_reached_bits": precision_used,
           "tool_version": TOOL_VERSION, "format_version": REPORT_FORMAT_VERSION}
    if options is not None:
        out["height_bound"] = options.height
        out["precision_ceiling_bits"] = options.precision_ceiling
    return out


def sequence_line(terms):
    names = ["0"] + [terms[f"term{i}"].describe() for i in range(1, 6)]
    return " → ".join(names)


def sequence_data(rep, options=None):
    """Structured form of a verified five-term sequence."""
    terms = {k: group_data(g) for k, g in rep.terms.items()}
    maps = {k: hom_data(h) for k, h in rep.maps.items()}
    for i, name in enumerate(MAP_NAMES, 1):
        maps[f"map{i}"]["name"] = name
    exactness = [{"node": f"term{v.node}", "composition_zero": v.composition_zero,
                  "kernel_equals_image": v.kernel_equals_image,
                  "kernel_order": v.kernel_order, "image_order": v.image_order,
                  "exact": v.exact} for v in rep.verdicts]
    witnesses = [{"class_vector": list(vec), "generator": element_data(x)}
                 for vec, x in rep.kernel_witnesses]
    mw = getattr(rep, "map_witnesses", {})
    map1_w = [{"unit": element_data(u), "root": element_data(v)} for u, v in mw.get("map1", [])]
    map3_w = [{"unit": element_data(u)} for u in mw.get("map3", [])]
    comp = {
        "n": rep.n,
        "sequence": sequence_line(rep.terms),
        "terms": terms,
        "kernel_invariants": list(rep.terms["term3"].invariants),
        "maps": maps,
        "map_witnesses": {"map1": map1_w, "map3": map3_w},
        "capitulation_witnesses": witnesses,
        "exactness": exactness,
        "exact": rep.exact,
        "n_torsion": dict(rep.torsion_ok),
        "cross_checks": dict(rep.cross_check),
        "kernel_vs_psi": dict(rep.kernel_vs_psi) if rep.kernel_vs_psi else {"applies": False},
        "norm_of_extended_classes": {"ok": rep.rescores["ok"],
                                     "per_generator": list(rep.rescores["per_generator"])},
        "norm_unit_identity": {"ok": rep.norm_identity["ok"],
                               "per_generator": list(rep.norm_identity["per_generator"])},
        "well_definedness": dict(rep.fuzzing),
        "cech_comparison": dict(rep.cech),
        "units": dict(rep.units),
        "class_groups": {k: group_data(g) for k, g in rep.class_groups.items()},
        "expectations": rep.expectations,
        "convention": rep.convention,
        "hasse_principle_for_psi": "unanswered",
        "failures": rep.failures(),
    }
    return {"fixture": rep.name, "command": "verify-sequence",
            "validation": validation_data(rep.validation),
            "computation": comp,
            "provenance": provenance_data(rep.seed, rep.precision_used, options)}


def _text_lines(value, indent):
    pad = "  " * indent
    if isinstance(value, dict):
        out = []
        for k in sorted(value):
            v = value[k]
            if isinstance(v, (dict, list)) and v and not _is_flat_list(v):
                out.append(f"{pad}{k}:")
                out += _text_lines(v, indent + 1)
            else:
                out.append(f"{pad}{k}: {_scalar(v)}")
        return out
    if isinstance(value, list):
        out = []
        for v in value:
            if isinstance(v, (dict, list)) and v and not _is_flat_list(v):
                out.append(f"{pad}-")
                out += _text_lines(v, indent + 1)
            else:
                out.append(f"{pad}- {_scalar(v)}")
        return out
    return [f"{pad}{_scalar(value)}"]


def _is_flat_list(v):
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) or
                                       (isinstance(x, list) and _is_flat_list(x)) for x in v)


def _scalar(v):
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return "-"
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{}"
    return str(v)


def render_text(data):
    lines = []
    comp = data.get("computation", {})
    if "sequence" in comp:
        lines.append(comp["sequence"])
        terms = ["term1", "term2", "term3", "term4", "term5"]
        arrows = [f"{a} --{m}--> {b}" for a, m, b in zip(terms, MAP_NAMES, terms[1:])]
        lines.append("maps: " + ", ".join(arrows))
        lines.append("")
    lines += _text_lines(data, 0)
    return "\n".join(lines) + "\n"


def render_structured(data):
    return json.dumps(data, sort_keys=True, ensure_ascii=False) + "\n"


def emit_report(data, fmt="text"):
    """Render a report dict to bytes."""
    if hasattr(data, "verdicts"):
        data = sequence_data(data)
    if fmt == "structured":
        text = render_structured(data)
    elif fmt == "text":
        text = render_text(data)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return text.encode("utf-8")
