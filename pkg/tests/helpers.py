"""Shared test utilities: randomized instance generation and an
automaton-membership check built only from the primitive operations."""

from __future__ import annotations

import random

from pfsm import build_pfsm, epsilon_closure, step
from pfsm.automaton import Automaton
from pfsm.compile import compile_nfa, nfa_to_dfa
from pfsm.syntax import (ByteClass, Literal, Node, Opt, Plus, Star,
                         alternation, concat)

FIG1_PATTERNS = ["a*c", "ac", "a(ca)*b"]
FIG1_INPUT = b"aacacab"
FIG2_MATCHES = {
    ("a*c", 0, 2), ("a*c", 1, 2), ("ac", 1, 2), ("a*c", 2, 2),
    ("a*c", 3, 4), ("ac", 3, 4), ("a*c", 4, 4),
    ("a(ca)*b", 1, 6), ("a(ca)*b", 3, 6), ("a(ca)*b", 5, 6),
}


def nfa_accepts(a: Automaton, s: bytes) -> bool:
    """Membership by direct closure/step simulation of the automaton."""
    current = epsilon_closure(a, {a.initial})
    for byte in s:
        current = epsilon_closure(a, step(a, current, byte))
        if not current:
            return False
    return bool(current & a.finals)


def all_strings(alphabet: list[int], max_len: int):
    """Every byte string over the alphabet up to max_len, shortest first."""
    layer = [b""]
    yield b""
    for _ in range(max_len):
        layer = [s + bytes([b]) for s in layer for b in alphabet]
        yield from layer


def gen_ast(rng: random.Random, alphabet: list[int], depth: int) -> Node:
    """Random tree over {literals, classes, |, concat, *, +, ?}."""
    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.8:
            return Literal(rng.choice(alphabet))
        k = rng.randint(1, len(alphabet))
        return ByteClass(frozenset(rng.sample(alphabet, k)))
    kind = rng.randrange(5)
    if kind == 0:
        return concat([gen_ast(rng, alphabet, depth - 1)
                       for _ in range(rng.randint(2, 3))])
    if kind == 1:
        return alternation([gen_ast(rng, alphabet, depth - 1)
                            for _ in range(rng.randint(2, 3))])
    if kind == 2:
        return Star(gen_ast(rng, alphabet, depth - 1))
    if kind == 3:
        return Plus(gen_ast(rng, alphabet, depth - 1))
    return Opt(gen_ast(rng, alphabet, depth - 1))


def gen_alphabet(rng: random.Random, max_size: int = 4) -> list[int]:
    size = rng.randint(2, max_size)
    return [ord("a") + i for i in range(size)]


def gen_instance(rng: random.Random, *, max_patterns: int = 4, depth: int = 5,
                 max_input: int = 64, forms=("dfa", "nfa", "mixed"),
                 max_alphabet: int = 4):
    """A random (pfsm, [(label id, ast)], input, form) quadruple."""
    alphabet = gen_alphabet(rng, max_alphabet)
    n_patterns = rng.randint(1, max_patterns)
    asts = [gen_ast(rng, alphabet, depth) for _ in range(n_patterns)]
    form = rng.choice(forms)
    machines = []
    for i, ast in enumerate(asts):
        nfa = compile_nfa(ast)
        if form == "dfa" or (form == "mixed" and rng.random() < 0.5):
            machines.append((f"p{i}", nfa_to_dfa(nfa)))
        else:
            machines.append((f"p{i}", nfa))
    p = build_pfsm(machines)
    labeled = [(p.labels.id_of(f"p{i}"), ast) for i, ast in enumerate(asts)]
    data = bytes(rng.choice(alphabet) for _ in range(rng.randint(0, max_input)))
    return p, labeled, data, form


def build_fig1(form: str = "dfa"):
    from pfsm.compile import compile_pattern
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_pfsm([(pat, compile_pattern(pat, form))
                           for pat in FIG1_PATTERNS])


def build_fig1_mixed():
    from pfsm.compile import compile_pattern
    forms = ["dfa", "nfa", "dfa"]
    return build_pfsm([(pat, compile_pattern(pat, f))
                       for pat, f in zip(FIG1_PATTERNS, forms)])


def match_texts(matches, pfsm) -> set[tuple[str, int, int]]:
    return {(pfsm.label_text(m.label), m.start, m.end) for m in matches}
