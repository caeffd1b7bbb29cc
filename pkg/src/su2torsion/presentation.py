"""Finite presentations, free-group words and Fox calculus.

A word is stored as a tuple of non-zero integers: ``+i`` is the i-th
generator (1-based) and ``-i`` its inverse. In documents a word is a string
over the generator letters, lowercase for a generator and uppercase for its
inverse, so ``"xxYYY"`` is x^2 y^-3.
"""
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import su2
from .errors import PeripheralError, SchemaError


def free_reduce(letters):
    out = []
    for a in letters:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    letters: tuple = ()

    def __post_init__(self):
        if any((not isinstance(a, (int, np.integer))) or a == 0 for a in self.letters):
            raise ValueError("letters must be non-zero integers")
        object.__setattr__(self, 'letters', free_reduce(int(a) for a in self.letters))

    def __mul__(self, other):
        return Word(self.letters + other.letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def inverse(self):
        return Word(tuple(-a for a in reversed(self.letters)))

    def __pow__(self, n):
        base = self if n >= 0 else self.inverse()
        return Word(base.letters * abs(n))

    def max_generator(self):
        return max((abs(a) for a in self.letters), default=0)

    @classmethod
    def parse(cls, text, generators):
        letters = []
        for ch in text:
            if ch in generators:
                letters.append(generators.index(ch) + 1)
            elif ch.lower() in generators and ch != ch.lower():
                letters.append(-(generators.index(ch.lower()) + 1))
            elif ch in ' 1':
                continue
            else:
                raise SchemaError(f"unknown letter {ch!r} in word {text!r}")
        return cls(tuple(letters))

    def spell(self, generators):
        return ''.join(generators[a - 1] if a > 0 else generators[-a - 1].upper()
                       for a in self.letters)


def conjugate(s, r):
    """s r s^-1."""
    return s * r * s.inverse()


@dataclass(frozen=True)
class Presentation:
    """Deficiency-one presentation of a knot group with its peripheral data.

    ``relator_signs[j]`` is +1 when the boundary commutator decomposes with
    r_j as given and -1 when it needed r_j^-1.
    """

    generators: tuple
    relators: tuple
    meridian: Word
    longitude: Word
    peripheral: tuple
    relator_signs: tuple = field(default=None)

    def __post_init__(self):
        if self.relator_signs is None:
            object.__setattr__(self, 'relator_signs', (1,) * len(self.relators))

    @property
    def k(self):
        return len(self.generators)

    def spell(self, word):
        return word.spell(self.generators)

    def to_document(self):
        return {
            "generators": list(self.generators),
            "relators": [self.spell(r) for r in self.relators],
            "meridian": self.spell(self.meridian),
            "longitude": self.spell(self.longitude),
            "peripheral": [{"s": self.spell(s), "t": self.spell(t)}
                           for s, t in self.peripheral],
        }


def boundary_commutator(pres):
    lam, mu = pres.longitude, pres.meridian
    return lam * mu * lam.inverse() * mu.inverse()


def peripheral_product(relators, peripheral, signs):
    out = Word()
    for r, (s, t), sign in zip(relators, peripheral, signs):
        rr = r if sign > 0 else r.inverse()
        out = out * conjugate(s, rr) * conjugate(t, rr.inverse())
    return out


def find_relator_signs(relators, peripheral, commutator):
    """Orientations of the relators for which the decomposition holds, or None."""
    for signs in itertools.product((1, -1), repeat=len(relators)):
        if peripheral_product(relators, peripheral, signs) == commutator:
            return signs
    return None


def _word_field(doc, key, generators):
    value = doc.get(key)
    if not isinstance(value, str):
        raise SchemaError(f"field {key!r} must be a word string")
    return Word.parse(value, generators)


def presentation_from_dict(doc):
    if not isinstance(doc, dict):
        raise SchemaError("presentation document must be a JSON object")
    for key in ("generators", "relators", "meridian", "longitude", "peripheral"):
        if key not in doc:
            raise SchemaError(f"missing field {key!r}")
    gens = doc["generators"]
    if (not isinstance(gens, list) or not gens
            or any(not isinstance(g, str) or len(g) != 1 or not g.islower() for g in gens)
            or len(set(gens)) != len(gens)):
        raise SchemaError("generators must be distinct lowercase letters")
    gens = tuple(gens)
    k = len(gens)
    if k < 2:
        raise SchemaError("at least two generators are required (k-1 >= 1 relators)")
    if not isinstance(doc["relators"], list) or len(doc["relators"]) != k - 1:
        raise SchemaError(f"expected exactly {k - 1} relators for {k} generators")
    relators = []
    for text in doc["relators"]:
        if not isinstance(text, str):
            raise SchemaError("relators must be word strings")
        relators.append(Word.parse(text, gens))
    if any(len(r) == 0 for r in relators):
        raise SchemaError("relators must be non-trivial after free reduction")
    meridian = _word_field(doc, "meridian", gens)
    longitude = _word_field(doc, "longitude", gens)
    periph = doc["peripheral"]
    if not isinstance(periph, list) or len(periph) != k - 1:
        raise SchemaError("peripheral must list one {s, t} pair per relator")
    peripheral = []
    for item in periph:
        if not isinstance(item, dict):
            raise SchemaError("peripheral entries must be objects with 's' and 't'")
        peripheral.append((_word_field(item, "s", gens), _word_field(item, "t", gens)))
    relators, peripheral = tuple(relators), tuple(peripheral)
    lam, mu = longitude, meridian
    signs = find_relator_signs(relators, peripheral, lam * mu * lam.inverse() * mu.inverse())
    if signs is None:
        raise PeripheralError(
            "longitude-meridian commutator is not the product of the given "
            "peripheral conjugates of the relators")
    return Presentation(gens, relators, meridian, longitude, peripheral, signs)


def parse_presentation(text):
    """Parse and validate a presentation document (JSON text)."""
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return presentation_from_dict(doc)


TREFOIL_DOCUMENT = {
    "generators": ["x", "y"],
    "relators": ["xxYYY"],
    "meridian": "xY",
    # x^2 mu^-6 with mu = x y^-1
    "longitude": "xx" + "yX" * 6,
    "peripheral": [{"s": "x", "t": "xY"}],
}

BUILTINS = {"trefoil": TREFOIL_DOCUMENT}


def builtin(name):
    try:
        return presentation_from_dict(BUILTINS[name])
    except KeyError:
        raise SchemaError(f"unknown builtin presentation {name!r}") from None


def load_presentation(source):
    """Resolve ``builtin:<name>``, a bare builtin name, or a path to a JSON file."""
    if isinstance(source, Presentation):
        return source
    source = str(source)
    if source.startswith("builtin:"):
        return builtin(source.split(":", 1)[1])
    if source in BUILTINS:
        return builtin(source)
    path = Path(source)
    if not path.is_file():
        raise SchemaError(f"presentation file not found: {source}")
    return parse_presentation(path.read_text(encoding="utf-8"))


def evaluate_word(word, rep):
    """Image of ``word`` under the assignment ``rep`` of shape (..., k, 4)."""
    rep = np.asarray(rep, dtype=float)
    k = rep.shape[-2]
    if word.max_generator() > k:
        raise IndexError(f"word uses generator {word.max_generator()} but only {k} are assigned")
    out = np.broadcast_to(su2.IDENTITY, rep.shape[:-2] + (4,)).copy()
    for count, a in enumerate(word, start=1):
        x = rep[..., abs(a) - 1, :]
        out = su2.qmul(out, x if a > 0 else su2.qinv(x))
        if count % su2.RENORMALIZE_EVERY == 0:
            out = su2.normalize(out)
    return out


@dataclass(frozen=True)
class FoxDerivative:
    """Integral group-ring element sum sign * prefix."""

    terms: tuple = ()

    def __add__(self, other):
        return FoxDerivative(self.terms + other.terms)

    def left_multiply(self, u):
        return FoxDerivative(tuple((s, u * w) for s, w in self.terms))


def fox_derivative(r, i):
    """Left Fox derivative d r / d x_i: d(uv) = du + u dv."""
    terms = []
    for m, a in enumerate(r.letters):
        if a == i:
            terms.append((1, Word(r.letters[:m])))
        elif a == -i:
            terms.append((-1, Word(r.letters[:m + 1])))
    return FoxDerivative(tuple(terms))


def instantiate_fox(d, rep):
    """sum sign * Ad(prefix) as a (..., 3, 3) matrix."""
    rep = np.asarray(rep, dtype=float)
    out = np.zeros(rep.shape[:-2] + (3, 3))
    for sign, prefix in d.terms:
        out = out + sign * su2.adjoint_matrix(evaluate_word(prefix, rep))
    return out


def relator_jacobian(pres, rep):
    """Instantiated Fox Jacobian: (..., 3(k-1), 3k), block (j, i) = d r_j / d x_i.

    Prefix products of each relator are formed once and shared by all columns.
    """
    rep = np.asarray(rep, dtype=float)
    k = pres.k
    batch = rep.shape[:-2]
    jac = np.zeros(batch + (3 * len(pres.relators), 3 * k))
    inv = su2.qinv(rep)
    for j, r in enumerate(pres.relators):
        prefix = np.broadcast_to(su2.IDENTITY, batch + (4,)).copy()
        for m, a in enumerate(r.letters):
            i = abs(a) - 1
            if a > 0:
                jac[..., 3 * j:3 * j + 3, 3 * i:3 * i + 3] += su2.adjoint_matrix(prefix)
                prefix = su2.qmul(prefix, rep[..., i, :])
            else:
                prefix = su2.qmul(prefix, inv[..., i, :])
                jac[..., 3 * j:3 * j + 3, 3 * i:3 * i + 3] -= su2.adjoint_matrix(prefix)
            if (m + 1) % su2.RENORMALIZE_EVERY == 0:
                prefix = su2.normalize(prefix)
    return jac


def relator_values(pres, rep):
    """Images of the relators, shape (..., k-1, 4)."""
    return np.stack([evaluate_word(r, rep) for r in pres.relators], axis=-2)
