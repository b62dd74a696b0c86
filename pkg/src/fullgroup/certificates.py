"""Symbolic group words, conjugate-product certificates and their
synthesizers and verifier.

A ConjugateProduct over a named generator tau0 denotes a product
prod_i g_i tau0^{s_i} g_i^-1 with each conjugator g_i a word over named
elements of an Environment.  Certificates of this shape witness
membership in the normal closure of tau0; the synthesizers below emit
them for commutators and products of commutators, and
`verify_certificate` replays them exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .backends import BackendId
from .clopen import ClopenSet
from .decompose import decompose_small_support, separated_cylinder
from .elements import (GroupElement, compose, identity, image_of_clopen,
                       inverse, support)
from .encoding import (format_backend, format_clopen, format_element,
                       parse_backend, parse_element)
from .errors import MalformedInput, PostconditionError, PreconditionError
from .transfers import full_group_transfer, proper_subcylinder

FORMAT_VERSION = 1


@dataclass(frozen=True)
class GroupWord:
    """A word over named elements: tokens (name, +-1), read left to
    right in composition order (rightmost acts first)."""

    tokens: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        for name, exp in self.tokens:
            if exp not in (1, -1):
                raise MalformedInput(f"word exponent must be +-1, got {exp}")
            if not name:
                raise MalformedInput("empty name in group word")

    @classmethod
    def gen(cls, name: str, exp: int = 1) -> "GroupWord":
        return cls(((name, exp),))

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return GroupWord(self.tokens + other.tokens)

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple((n, -e) for n, e in reversed(self.tokens)))

    def names(self) -> set[str]:
        return {n for n, _ in self.tokens}

    def evaluate(self, env: "Environment") -> GroupElement:
        result = identity(env.backend)
        for name, exp in self.tokens:
            elem = env.get(name)
            result = compose(result, elem if exp == 1 else inverse(elem))
        return result

    def __str__(self):
        if not self.tokens:
            return "1"
        return "*".join(n if e == 1 else f"{n}^-1" for n, e in self.tokens)


def commutator_word(a: str, b: str) -> GroupWord:
    return GroupWord(((a, 1), (b, 1), (a, -1), (b, -1)))


@dataclass(frozen=True)
class ConjugateFactor:
    conjugator: GroupWord
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise MalformedInput(f"factor sign must be +-1, got {self.sign}")


@dataclass(frozen=True)
class ConjugateProduct:
    """Product of conjugates g tau0^{+-1} g^-1 of a named generator."""

    generator: str
    factors: tuple[ConjugateFactor, ...]

    def __post_init__(self):
        if not self.generator:
            raise MalformedInput("conjugate product needs a generator name")

    def conjugated(self, word: GroupWord) -> "ConjugateProduct":
        return ConjugateProduct(self.generator, tuple(
            ConjugateFactor(word * f.conjugator, f.sign) for f in self.factors))

    def inverse(self) -> "ConjugateProduct":
        return ConjugateProduct(self.generator, tuple(
            ConjugateFactor(f.conjugator, -f.sign) for f in reversed(self.factors)))

    def __mul__(self, other: "ConjugateProduct") -> "ConjugateProduct":
        if other.generator != self.generator:
            raise MalformedInput("cannot concatenate certificates over different generators")
        return ConjugateProduct(self.generator, self.factors + other.factors)

    def evaluate(self, env: "Environment") -> GroupElement:
        tau0 = env.get(self.generator)
        tau0_inv = inverse(tau0)
        result = identity(env.backend)
        for f in self.factors:
            g = f.conjugator.evaluate(env)
            middle = tau0 if f.sign == 1 else tau0_inv
            result = compose(result, compose(compose(g, middle), inverse(g)))
        return result


class Environment:
    """A finite name -> element map over a single backend."""

    def __init__(self, backend: BackendId, mapping: dict[str, GroupElement] | None = None):
        self.backend = backend
        self._map: dict[str, GroupElement] = {}
        self._counter = 0
        for name, elem in (mapping or {}).items():
            self.define(name, elem)

    def define(self, name: str, elem: GroupElement) -> str:
        if elem.backend != self.backend:
            raise MalformedInput(f"element for {name!r} is on backend "
                                 f"{elem.backend.tag}, expected {self.backend.tag}")
        if name in self._map and self._map[name] != elem:
            raise MalformedInput(f"name {name!r} already bound to a different element")
        self._map[name] = elem
        return name

    def fresh(self, prefix: str, elem: GroupElement) -> str:
        while f"{prefix}.{self._counter}" in self._map:
            self._counter += 1
        name = f"{prefix}.{self._counter}"
        self._counter += 1
        return self.define(name, elem)

    def get(self, name: str) -> GroupElement:
        try:
            return self._map[name]
        except KeyError:
            raise MalformedInput(f"unresolved name {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._map

    def names(self) -> list[str]:
        return sorted(self._map)

    def items(self):
        return sorted(self._map.items())


@dataclass(frozen=True)
class CommutatorExpansion:
    """The pair of words ([g1..gn, h1..hm], expansion) together with the
    conjugated atomic pairs the expansion is made of."""

    lhs: GroupWord
    rhs: GroupWord
    pairs: tuple[tuple[GroupWord, str, str], ...]


def _expand_pairs(gs: list[str], hs: list[str]) -> list[tuple[GroupWord, str, str]]:
    if len(gs) == 1:
        g = gs[0]
        if len(hs) == 1:
            return [(GroupWord(), g, hs[0])]
        h1, rest = hs[0], hs[1:]
        # [g, h1 R] = [g, h1] * h1 [g, R] h1^-1
        tail = _expand_pairs([g], rest)
        return [(GroupWord(), g, h1)] + [(GroupWord.gen(h1) * c, a, b) for c, a, b in tail]
    g1, rest = gs[0], gs[1:]
    # [g1 R, H] = g1 [R, H] g1^-1 * [g1, H]
    head = _expand_pairs(rest, hs)
    return ([(GroupWord.gen(g1) * c, a, b) for c, a, b in head]
            + _expand_pairs([g1], hs))


def expand_commutator_product(gs: list[str], hs: list[str]) -> CommutatorExpansion:
    """Express [g1..gn, h1..hm] as a product of conjugates of the atomic
    commutators [g_i, h_j]; an exact identity in every environment."""
    if not gs or not hs:
        raise MalformedInput("commutator expansion needs nonempty name lists")
    pairs = tuple(_expand_pairs(list(gs), list(hs)))
    gw = reduce(lambda a, b: a * b, (GroupWord.gen(n) for n in gs))
    hw = reduce(lambda a, b: a * b, (GroupWord.gen(n) for n in hs))
    lhs = gw * hw * gw.inverse() * hw.inverse()
    rhs = GroupWord()
    for conj, a, b in pairs:
        rhs = rhs * conj * commutator_word(a, b) * conj.inverse()
    return CommutatorExpansion(lhs, rhs, pairs)


def _proper_support_factors(name: str, env: Environment,
                            epsilon: Fraction | None) -> list[tuple[str, ClopenSet]]:
    """Factor the named element so every factor has a proper clopen
    support bound (measure below epsilon on the odometer when given);
    returns (name, bound) pairs, factors registered in the environment."""
    elem = env.get(name)
    bound = support(elem)
    needs_split = bound.is_whole()
    if not needs_split and epsilon is not None and not bound.volume() < epsilon:
        needs_split = True
    if not needs_split:
        return [(name, bound)]
    dec = decompose_small_support(elem, epsilon if epsilon is not None else Fraction(1, 2))
    return [(env.fresh(f"{name}.f", factor), cbound)
            for factor, cbound in zip(dec.factors, dec.bounds)]


def normality_certificate(tau_name: str, alpha_name: str,
                          env: Environment,
                          trace: dict | None = None) -> tuple[GroupWord, dict]:
    """A derived-subgroup conjugator word w with
    alpha tau alpha^-1 = w tau w^-1 exactly.

    Requires supp(tau) proper (split it first otherwise).  alpha is
    pre-factored into small-support pieces when its support is too
    large, and the single-factor conjugators w_i = [a_i, gamma_i] are
    chained right to left.
    """
    tau = env.get(tau_name)
    alpha = env.get(alpha_name)
    backend = env.backend
    B = support(tau)
    if B.is_whole():
        raise PreconditionError(
            "supp(tau) is the whole space; apply split_nontrivial_support first")
    if alpha.is_identity() or tau.is_identity():
        return GroupWord(), {"factors": []}
    epsilon = B.complement().volume() if backend.is_odometer else None
    factors = _proper_support_factors(alpha_name, env, epsilon)
    word = GroupWord()
    steps = []
    current = tau
    for fname, fbound in reversed(factors):
        felem = env.get(fname)
        fsupp = support(felem)
        csupp = support(current)
        if fsupp.intersect(csupp).is_empty():
            gamma = identity(backend)
        else:
            gamma = full_group_transfer(backend, fbound, csupp.complement()).element
        gname = env.fresh("gamma", gamma)
        w_i = commutator_word(fname, gname)
        conj = compose(compose(felem, current), inverse(felem))
        g_i = w_i.evaluate(env)
        if not compose(compose(g_i, current), inverse(g_i)) == conj:
            raise PostconditionError("normality conjugator failed its identity")
        steps.append({"factor": fname, "gamma": gname,
                      "bound": format_clopen(fbound)})
        current = conj
        word = w_i * word
    final = word.evaluate(env)
    if not compose(compose(final, tau), inverse(final)) == \
            compose(compose(alpha, tau), inverse(alpha)):
        raise PostconditionError("normality certificate failed its identity")
    info = {"factors": steps[::-1]}
    if trace is not None:
        trace.update(info)
    return word, info


def _atomic_closure_factors(a_name: str, a_bound: ClopenSet,
                            b_name: str, b_bound: ClopenSet,
                            tau0_name: str, C: ClopenSet,
                            env: Environment,
                            tags: set[str] | None = None) -> tuple[ConjugateFactor, ...]:
    """The eight conjugate factors expressing [a, b] inside the normal
    closure of tau0, via gamma0 (moving supp a off supp b), sigma
    (parking everything inside the separating cylinder C of tau0) and
    tau = sigma^-1 tau0 sigma."""
    backend = env.backend
    tau0 = env.get(tau0_name)
    not_b = b_bound.complement()
    if backend.is_odometer or not_b.is_subset(a_bound):
        moved = full_group_transfer(backend, a_bound, not_b)
    else:
        # reserve a cylinder outside supp(a) so the parked region D stays proper
        free = not_b - a_bound
        reserved = proper_subcylinder(free)
        moved = full_group_transfer(backend, a_bound, not_b - reserved)
    gamma0 = moved.element
    D = a_bound | support(gamma0)
    if D.is_whole():
        raise PostconditionError("parked region filled the whole space")
    parked = full_group_transfer(backend, D, C)
    sigma = parked.element
    if tags is not None:
        tags.update({moved.postcondition_tag, parked.postcondition_tag})
    g0 = env.fresh("gamma0", gamma0)
    sg = env.fresh("sigma", sigma)
    tau = compose(compose(inverse(sigma), tau0), sigma)
    if not image_of_clopen(tau, D).intersect(D).is_empty():
        raise PostconditionError("conjugated generator does not displace the parked region")
    gamma = compose(compose(compose(gamma0, tau), inverse(gamma0)), inverse(tau))
    if not image_of_clopen(gamma, a_bound).is_subset(not_b):
        raise PostconditionError("closure element does not separate the supports")
    w_g0s = GroupWord(((g0, 1), (sg, -1)))
    w_s = GroupWord(((sg, -1),))
    a = GroupWord.gen(a_name)
    b = GroupWord.gen(b_name)
    return (
        ConjugateFactor(a * w_g0s, 1),
        ConjugateFactor(a * w_s, -1),
        ConjugateFactor(w_s, 1),
        ConjugateFactor(w_g0s, -1),
        ConjugateFactor(b * w_g0s, 1),
        ConjugateFactor(b * w_s, -1),
        ConjugateFactor(b * a * w_s, 1),
        ConjugateFactor(b * a * w_g0s, -1),
    )


def commutator_in_normal_closure(alpha_name: str, beta_name: str,
                                 tau0_name: str, env: Environment,
                                 trace: dict | None = None) -> ConjugateProduct:
    """A certificate expressing [alpha, beta] as a product of conjugates
    of tau0^{+-1}; eight factors per atomic pair of the commutator
    expansion of the pre-factored alpha and beta."""
    backend = env.backend
    tau0 = env.get(tau0_name)
    if tau0.is_identity():
        raise PreconditionError("the generator tau0 must be nontrivial")
    alpha = env.get(alpha_name)
    beta = env.get(beta_name)
    target = compose(compose(compose(alpha, beta), inverse(alpha)), inverse(beta))
    if target.is_identity():
        return ConjugateProduct(tau0_name, ())
    C = separated_cylinder(env.get(tau0_name))
    b_factors = _proper_support_factors(beta_name, env, None if not backend.is_odometer
                                        else Fraction(1, 2))
    if backend.is_odometer:
        eta = min(min(b.complement().volume() for _, b in b_factors), C.volume())
        a_factors = _proper_support_factors(alpha_name, env, eta / 2)
    else:
        a_factors = _proper_support_factors(alpha_name, env, None)
    a_bounds = dict(a_factors)
    b_bounds = dict(b_factors)
    expansion = _expand_pairs([n for n, _ in a_factors], [n for n, _ in b_factors])
    factors: list[ConjugateFactor] = []
    tags: set[str] = set()
    for conj, a_nm, b_nm in expansion:
        eight = _atomic_closure_factors(a_nm, a_bounds[a_nm], b_nm, b_bounds[b_nm],
                                        tau0_name, C, env, tags)
        factors.extend(ConjugateFactor(conj * f.conjugator, f.sign) for f in eight)
    cert = ConjugateProduct(tau0_name, tuple(factors))
    if not cert.evaluate(env) == target:
        raise PostconditionError("closure certificate does not evaluate to the commutator")
    if trace is not None:
        trace.update({
            "separating": format_clopen(C),
            "alpha_factors": [n for n, _ in a_factors],
            "beta_factors": [n for n, _ in b_factors],
            "pairs": len(expansion),
            "tags": sorted(tags),
        })
    return cert


def simplicity_certificate(tau0_name: str,
                           targets: list[tuple[str, str]],
                           env: Environment,
                           trace: dict | None = None) -> ConjugateProduct:
    """Concatenated closure certificates: the normal closure of any
    nontrivial tau0 swallows any product of commutators."""
    tau0 = env.get(tau0_name)
    if tau0.is_identity():
        raise PreconditionError("the generator tau0 must be nontrivial")
    cert = ConjugateProduct(tau0_name, ())
    product = identity(env.backend)
    for alpha_name, beta_name in targets:
        sub_trace: dict = {}
        cert = cert * commutator_in_normal_closure(alpha_name, beta_name,
                                                   tau0_name, env, sub_trace)
        alpha, beta = env.get(alpha_name), env.get(beta_name)
        product = compose(product, compose(
            compose(compose(alpha, beta), inverse(alpha)), inverse(beta)))
        if trace is not None:
            trace.setdefault("targets", []).append(sub_trace)
    if not cert.evaluate(env) == product:
        raise PostconditionError("concatenated certificate does not evaluate to the product")
    return cert


def scan_conjugate_form(cp: ConjugateProduct, env: Environment) -> bool:
    """Structural check: every occurrence of the generator is inside a
    conjugate g tau0^{+-1} g^-1 whose conjugator never mentions tau0,
    and all names resolve."""
    env.get(cp.generator)
    for f in cp.factors:
        if f.sign not in (1, -1):
            return False
        if cp.generator in f.conjugator.names():
            return False
        for name in f.conjugator.names():
            env.get(name)
    return True


def verify_certificate(cp: ConjugateProduct, env: Environment,
                       target: GroupElement) -> bool:
    """Structural scan plus exact evaluation against the target."""
    if not scan_conjugate_form(cp, env):
        return False
    return cp.evaluate(env) == target


# -- certificate files -------------------------------------------------------


def certificate_to_dict(cp: ConjugateProduct, env: Environment,
                        target: GroupElement, trace: dict | None = None) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "backend": format_backend(env.backend),
        "environment": {name: format_element(elem) for name, elem in env.items()},
        "generator": cp.generator,
        "factors": [{"conjugator": [[n, e] for n, e in f.conjugator.tokens],
                     "sign": f.sign} for f in cp.factors],
        "target": format_element(target),
        "trace": trace or {},
    }


def certificate_from_dict(data: dict) -> tuple[ConjugateProduct, Environment, GroupElement]:
    try:
        if data["format_version"] != FORMAT_VERSION:
            raise MalformedInput(f"unsupported format_version {data['format_version']!r}")
        backend = parse_backend(data["backend"])
        env = Environment(backend, {name: parse_element(enc)
                                    for name, enc in data["environment"].items()})
        factors = tuple(
            ConjugateFactor(GroupWord(tuple((n, int(e)) for n, e in f["conjugator"])),
                            int(f["sign"]))
            for f in data["factors"])
        cp = ConjugateProduct(data["generator"], factors)
        target = parse_element(data["target"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad certificate payload: {exc}") from exc
    return cp, env, target


def dump_certificate(cp: ConjugateProduct, env: Environment,
                     target: GroupElement, trace: dict | None = None) -> str:
    return json.dumps(certificate_to_dict(cp, env, target, trace),
                      sort_keys=True, indent=2) + "\n"


def load_certificate(text: str) -> tuple[ConjugateProduct, Environment, GroupElement]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"certificate is not valid JSON: {exc}") from exc
    return certificate_from_dict(data)
