"""Line-oriented fixture format: parsing, serialization and validation.

A fixture is a sequence of ``[section]`` headers followed by ``key = value``
lines.  Numbers are exact decimal integers or ``a/b`` rationals; matrix rows
are separated by ``;``; ``p : coords`` names the prime ideal ``(p, alpha)``
with alpha given over the integral basis.  ``#`` starts a comment line.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
import re

from .errors import (CapkernelError, InternalOverflow, ParseError, PrecisionExhausted,
                     ValidationError)

FORMAT_VERSION = 1

FIELD_KEYS = ("polynomial", "basis", "discriminant", "signature")
SIGMA_KEYS = ("archimedean", "infinite_ramification", "F", "K")
CLASSGROUP_KEYS = ("prime", "relation")
UNITS_KEYS = ("torsion", "free", "rank")
EXPECTATION_KEYS = ("class_group_F", "class_group_K", "kernel", "term1", "term2", "term3",
                    "term4", "term5", "h1_units", "w_K", "rank_K", "unit_index", "exact")
HEADER_KEYS = ("format_version", "name", "seed")
SECTIONS = ("field F", "field K", "embedding", "galois", "sigma", "classgroup F",
            "classgroup K", "primes F", "primes K", "units F", "units K", "expectations")


@dataclass
class FieldBlock:
    polynomial: list
    basis: list
    discriminant: int
    signature: tuple


@dataclass
class PrimeSpec:
    p: int
    generator: list          # rational coordinates over the integral basis


@dataclass
class RelationSpec:
    exponents: list
    witness: list            # rational coordinates


@dataclass
class ClassGroupBlock:
    primes: list = field(default_factory=list)
    relations: list = field(default_factory=list)


@dataclass
class UnitsBlock:
    torsion: list = None
    w: int = 1
    free: list = field(default_factory=list)
    rank: int = None


@dataclass
class SigmaBlock:
    archimedean: str = "all"
    infinite_ramification: str = "none"
    F: list = field(default_factory=list)
    K: list = field(default_factory=list)


@dataclass
class FixtureFile:
    format_version: int = FORMAT_VERSION
    name: str = ""
    seed: int = 0
    fields: dict = field(default_factory=dict)
    embedding: list = None
    table: list = None
    automorphisms: list = field(default_factory=list)
    sigma: SigmaBlock = field(default_factory=SigmaBlock)
    classgroups: dict = field(default_factory=lambda: {"F": ClassGroupBlock(), "K": ClassGroupBlock()})
    primes: dict = field(default_factory=lambda: {"F": [], "K": []})
    units: dict = field(default_factory=dict)
    expectations: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# parsing

class _Line:
    def __init__(self, number, text):
        self.number = number
        self.text = text

    def error(self, msg, col=1):
        return ParseError(msg, self.number, col)


def _tokens(text, col):
    """Whitespace-separated tokens with their 1-based columns; ``col`` is where ``text`` starts."""
    return [(m.group(), col + m.start()) for m in re.finditer(r"\S+", text)]


def _ints(line, text, col):
    out = []
    for tok, c in _tokens(text, col):
        try:
            out.append(int(tok))
        except ValueError:
            raise line.error(f"expected an integer, got {tok!r}", c) from None
    return out


def _rationals(line, text, col):
    out = []
    for tok, c in _tokens(text, col):
        try:
            out.append(Fraction(tok))
        except (ValueError, ZeroDivisionError):
            raise line.error(f"expected a rational number, got {tok!r}", c) from None
    return out


def _rows(line, text, col, conv=_ints):
    rows, offset = [], 0
    for part in text.split(";"):
        rows.append(conv(line, part, col + offset))
        offset += len(part) + 1
    return rows


def _prime(line, text, col):
    if ":" not in text:
        raise line.error("prime must be written 'p : coords'", col)
    p, coords = text.split(":", 1)
    ps = _ints(line, p, col)
    if len(ps) != 1 or ps[0] < 2:
        raise line.error("prime must start with a rational prime", col)
    return PrimeSpec(ps[0], _rationals(line, coords, col + len(p) + 1))


def parse_text(text):
    fx = FixtureFile()
    section = None
    seen_header = set()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _Line(number, raw)
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        if s.startswith("["):
            if not s.endswith("]"):
                raise line.error("unterminated section header", len(raw))
            name = " ".join(s[1:-1].split())
            if name not in SECTIONS:
                raise line.error(f"unknown section [{name}]", raw.index("[") + 1)
            section = name
            continue
        if "=" not in s:
            raise line.error("expected 'key = value'", 1)
        key, value = s.split("=", 1)
        key = key.strip()
        value = value.strip()
        eq = raw.index("=") + 1
        col = eq + 1 + (len(raw[eq:]) - len(raw[eq:].lstrip()))
        _assign(fx, section, key, value, line, col, seen_header)
    if "format_version" not in seen_header:
        raise ParseError("missing format_version", 1, 1)
    if fx.format_version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {fx.format_version}", 1, 1)
    return fx


def _assign(fx, section, key, value, line, col, seen_header):
    if section is None:
        if key not in HEADER_KEYS:
            raise line.error(f"unknown key {key!r}", 1)
        seen_header.add(key)
        if key == "name":
            fx.name = value
        else:
            v = _ints(line, value, col)
            if len(v) != 1:
                raise line.error(f"{key} takes one integer", col)
            setattr(fx, key, v[0])
        return
    if section.startswith("field "):
        which = section[-1]
        blk = fx.fields.setdefault(which, FieldBlock([], [], None, None))
        if key not in FIELD_KEYS:
            raise line.error(f"unknown key {key!r} in [{section}]", 1)
        if key == "polynomial":
            blk.polynomial = _ints(line, value, col)
        elif key == "basis":
            blk.basis = _rows(line, value, col, _rationals)
        elif key == "discriminant":
            v = _ints(line, value, col)
            if len(v) != 1:
                raise line.error("discriminant takes one integer", col)
            blk.discriminant = v[0]
        else:
            v = _ints(line, value, col)
            if len(v) != 2:
                raise line.error("signature takes two integers", col)
            blk.signature = tuple(v)
        return
    if section == "embedding":
        if key != "image":
            raise line.error(f"unknown key {key!r} in [embedding]", 1)
        fx.embedding = _rationals(line, value, col)
        return
    if section == "galois":
        if key == "table":
            fx.table = _rows(line, value, col)
        elif key == "automorphism":
            fx.automorphisms.append(_rationals(line, value, col))
        else:
            raise line.error(f"unknown key {key!r} in [galois]", 1)
        return
    if section == "sigma":
        if key not in SIGMA_KEYS:
            raise line.error(f"unknown key {key!r} in [sigma]", 1)
        if key == "archimedean":
            if value != "all":
                raise line.error("archimedean must be 'all'", col)
            fx.sigma.archimedean = value
        elif key == "infinite_ramification":
            if value not in ("none", "allowed"):
                raise line.error("infinite_ramification must be 'none' or 'allowed'", col)
            fx.sigma.infinite_ramification = value
        else:
            getattr(fx.sigma, key).append(_prime(line, value, col))
        return
    if section.startswith("classgroup "):
        blk = fx.classgroups[section[-1]]
        if key == "prime":
            blk.primes.append(_prime(line, value, col))
        elif key == "relation":
            if ":" not in value:
                raise line.error("relation must be written 'exponents : witness'", col)
            ex, wit = value.split(":", 1)
            blk.relations.append(RelationSpec(_ints(line, ex, col),
                                            _rationals(line, wit, col + len(ex) + 1)))
        else:
            raise line.error(f"unknown key {key!r} in [{section}]", 1)
        return
    if section.startswith("primes "):
        if key != "prime":
            raise line.error(f"unknown key {key!r} in [{section}]", 1)
        fx.primes[section[-1]].append(_prime(line, value, col))
        return
    if section.startswith("units "):
        blk = fx.units.setdefault(section[-1], UnitsBlock())
        if key == "torsion":
            if ":" not in value:
                raise line.error("torsion must be written 'coords : order'", col)
            coords, w = value.split(":", 1)
            blk.torsion = _rationals(line, coords, col)
            wv = _ints(line, w, col + len(coords) + 1)
            if len(wv) != 1 or wv[0] < 1:
                raise line.error("torsion order must be a positive integer", col)
            blk.w = wv[0]
        elif key == "free":
            blk.free.append(_rationals(line, value, col))
        elif key == "rank":
            v = _ints(line, value, col)
            if len(v) != 1:
                raise line.error("rank takes one integer", col)
            blk.rank = v[0]
        else:
            raise line.error(f"unknown key {key!r} in [{section}]", 1)
        return
    if section == "expectations":
        if key not in EXPECTATION_KEYS:
            raise line.error(f"unknown expectation {key!r}", 1)
        if key == "exact":
            if value not in ("yes", "no"):
                raise line.error("exact must be 'yes' or 'no'", col)
            fx.expectations[key] = value
        else:
            fx.expectations[key] = _ints(line, value, col)
        return
    raise line.error(f"key {key!r} outside a known section", 1)


def parse_file(path):
    return parse_text(Path(path).read_text())


# ---------------------------------------------------------------------------
# serialization

def _fmt(vals):
    return " ".join(str(v) for v in vals)


def _fmt_rows(rows):
    return " ; ".join(_fmt(r) for r in rows)


def _fmt_prime(ps):
    return f"{ps.p} : {_fmt(ps.generator)}"


def serialize(fx):
    out = [f"format_version = {fx.format_version}"]
    if fx.name:
        out.append(f"name = {fx.name}")
    out.append(f"seed = {fx.seed}")
    for which in ("F", "K"):
        blk = fx.fields.get(which)
        if blk is None:
            continue
        out += ["", f"[field {which}]", f"polynomial = {_fmt(blk.polynomial)}"]
        if blk.basis:
            out.append(f"basis = {_fmt_rows(blk.basis)}")
        if blk.discriminant is not None:
            out.append(f"discriminant = {blk.discriminant}")
        if blk.signature is not None:
            out.append(f"signature = {_fmt(blk.signature)}")
    if fx.embedding is not None:
        out += ["", "[embedding]", f"image = {_fmt(fx.embedding)}"]
    if fx.table is not None or fx.automorphisms:
        out += ["", "[galois]"]
        if fx.table is not None:
            out.append(f"table = {_fmt_rows(fx.table)}")
        out += [f"automorphism = {_fmt(a)}" for a in fx.automorphisms]
    out += ["", "[sigma]", f"archimedean = {fx.sigma.archimedean}",
            f"infinite_ramification = {fx.sigma.infinite_ramification}"]
    out += [f"F = {_fmt_prime(p)}" for p in fx.sigma.F]
    out += [f"K = {_fmt_prime(p)}" for p in fx.sigma.K]
    for which in ("F", "K"):
        if fx.primes[which]:
            out += ["", f"[primes {which}]"] + [f"prime = {_fmt_prime(p)}" for p in fx.primes[which]]
    for which in ("F", "K"):
        blk = fx.classgroups[which]
        out += ["", f"[classgroup {which}]"]
        out += [f"prime = {_fmt_prime(p)}" for p in blk.primes]
        out += [f"relation = {_fmt(r.exponents)} : {_fmt(r.witness)}" for r in blk.relations]
    for which in ("F", "K"):
        blk = fx.units.get(which)
        if blk is None:
            continue
        out += ["", f"[units {which}]"]
        if blk.torsion is not None:
            out.append(f"torsion = {_fmt(blk.torsion)} : {blk.w}")
        out += [f"free = {_fmt(u)}" for u in blk.free]
        if blk.rank is not None:
            out.append(f"rank = {blk.rank}")
    if fx.expectations:
        out += ["", "[expectations]"]
        for key in EXPECTATION_KEYS:
            if key in fx.expectations:
                v = fx.expectations[key]
                out.append(f"{key} = {v if isinstance(v, str) else _fmt(v)}".rstrip())
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# validation: fixture -> covering datum

@dataclass
class BuildOptions:
    height: int = 12
    precision_ceiling: int = 1024
    seed: int = None


def parse_and_validate(path, options=None):
    fx = parse_file(path)
    return build_covering(fx, options)


def build_covering(fx, options=None):
    """Construct and verify every certificate; failures are aggregated."""
    from .capitulation import build_covering_datum
    options = options or BuildOptions()
    try:
        return build_covering_datum(fx, options)
    except (ValidationError, PrecisionExhausted, InternalOverflow):
        raise
    except CapkernelError as exc:
        raise ValidationError(f"{type(exc).__name__}: {exc}", [str(exc)]) from exc


def bundled_fixture(name):
    """Path of a fixture shipped with the package."""
    return Path(__file__).with_name("data") / f"{name}.fix"


def bundled_fixture_names():
    return sorted(p.stem for p in (Path(__file__).with_name("data")).glob("*.fix"))
