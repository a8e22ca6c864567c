"""The union machine: many labeled pattern automata behind one ancillary
initial state, with live add/remove.

The ancillary initial state has one epsilon edge per registered pattern,
each to that pattern's entry state. Every structural change bumps the
generation counter and produces a new Pfsm value; state ids of surviving
patterns never change, so a scanner holding an active set across an update
can reconcile cheaply (or detect the mismatch and abort).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automaton import (Automaton, AutomatonFormatError, LabelRegistry,
                        dump_lines, make_automaton, parse_lines, validate)


class DuplicateLabelError(ValueError):
    pass


class UnknownLabelError(KeyError):
    pass


@dataclass(frozen=True)
class PatternEntry:
    label_id: int
    label: str
    entry: int
    owned: frozenset[int]
    deterministic: bool

    @property
    def n_states(self) -> int:
        return len(self.owned)


@dataclass
class Pfsm:
    automaton: Automaton
    labels: LabelRegistry
    directory: dict[int, PatternEntry]
    generation: int = 0
    next_state_id: int = field(default=0)

    @property
    def initial(self) -> int:
        return self.automaton.initial

    def label_text(self, label_id: int) -> str:
        return self.labels.text(label_id)

    def live_labels(self) -> list[int]:
        return sorted(self.directory)


def _copy_automaton(a: Automaton) -> Automaton:
    return Automaton(
        set(a.states), a.initial,
        {s: {b: set(t) for b, t in table.items()}
         for s, table in a.byte_transitions.items()},
        {s: set(t) for s, t in a.epsilon_transitions.items()},
        set(a.finals), dict(a.final_labels), a.deterministic)


def _graft(dst: Automaton, src: Automaton, offset: int, label_id: int) -> frozenset[int]:
    """Copy src into dst with state ids shifted by offset; finals relabeled.
    Returns the grafted state ids."""
    for s in src.states:
        dst.states.add(s + offset)
    for s, table in src.byte_transitions.items():
        shifted = dst.byte_transitions.setdefault(s + offset, {})
        for byte, succ in table.items():
            shifted.setdefault(byte, set()).update(t + offset for t in succ)
    for s, succ in src.epsilon_transitions.items():
        dst.epsilon_transitions.setdefault(s + offset, set()).update(
            t + offset for t in succ)
    for f in src.finals:
        dst.finals.add(f + offset)
        dst.final_labels[f + offset] = label_id
    return frozenset(s + offset for s in src.states)


def build_pfsm(patterns: list[tuple[str, Automaton]]) -> Pfsm:
    """Assemble pattern machines into a union machine.

    Each machine must have dense state ids 0..n-1 and a single initial
    state (Automaton always has exactly one, so the real precondition is
    density, which compile_nfa/nfa_to_dfa guarantee).
    """
    labels = LabelRegistry()
    ancillary = 0
    union = Automaton({ancillary}, ancillary, {}, {}, set(), {}, False)
    directory: dict[int, PatternEntry] = {}
    next_id = 1
    for label, machine in patterns:
        if label in labels and labels.id_of(label) in directory:
            raise DuplicateLabelError(f"duplicate label {label!r}")
        lid = labels.intern(label)
        owned = _graft(union, machine, next_id, lid)
        entry = machine.initial + next_id
        union.epsilon_transitions.setdefault(ancillary, set()).add(entry)
        directory[lid] = PatternEntry(lid, label, entry, owned,
                                      machine.compute_deterministic())
        next_id += len(machine.states)
    union.deterministic = union.compute_deterministic()
    return Pfsm(union, labels, directory, generation=0, next_state_id=next_id)


def add_pattern(p: Pfsm, label: str, machine: Automaton) -> Pfsm:
    """New generation with the pattern appended. Existing state ids unchanged."""
    if label in p.labels and p.labels.id_of(label) in p.directory:
        raise DuplicateLabelError(f"duplicate label {label!r}")
    union = _copy_automaton(p.automaton)
    labels = p.labels.copy()
    lid = labels.intern(label)
    base = p.next_state_id
    # Grafting assumes dense source ids; renumber defensively.
    machine = _densify(machine)
    owned = _graft(union, machine, base, lid)
    entry = machine.initial + base
    union.epsilon_transitions.setdefault(union.initial, set()).add(entry)
    union.deterministic = union.compute_deterministic()
    directory = dict(p.directory)
    directory[lid] = PatternEntry(lid, label, entry, owned,
                                  machine.compute_deterministic())
    return Pfsm(union, labels, directory, p.generation + 1,
                base + len(machine.states))


def remove_pattern(p: Pfsm, label: str) -> Pfsm:
    """New generation with the pattern's states and edges removed.
    Surviving state ids are unchanged; removed ids are never reused."""
    if label not in p.labels or p.labels.id_of(label) not in p.directory:
        raise UnknownLabelError(label)
    lid = p.labels.id_of(label)
    entry = p.directory[lid]
    union = _copy_automaton(p.automaton)
    for s in entry.owned:
        union.states.discard(s)
        union.byte_transitions.pop(s, None)
        union.epsilon_transitions.pop(s, None)
        union.finals.discard(s)
        union.final_labels.pop(s, None)
    q0_eps = union.epsilon_transitions.get(union.initial, set())
    q0_eps.discard(entry.entry)
    union.deterministic = union.compute_deterministic()
    directory = dict(p.directory)
    del directory[lid]
    return Pfsm(union, p.labels.copy(), directory, p.generation + 1,
                p.next_state_id)


def _densify(a: Automaton) -> Automaton:
    """Renumber states to dense ids 0..n-1 (order-preserving)."""
    order = sorted(a.states)
    if order == list(range(len(order))):
        return a
    remap = {s: i for i, s in enumerate(order)}
    return make_automaton(
        range(len(order)), remap[a.initial],
        {remap[s]: {b: {remap[t] for t in succ} for b, succ in table.items()}
         for s, table in a.byte_transitions.items()},
        {remap[s]: {remap[t] for t in succ}
         for s, succ in a.epsilon_transitions.items()},
        {remap[f] for f in a.finals},
        {remap[f]: lab for f, lab in a.final_labels.items()})


def extract_pattern(p: Pfsm, label_id: int) -> Automaton:
    """The stand-alone machine of one pattern, renumbered to dense ids.
    Finals carry label 0 (single-pattern convention)."""
    if label_id not in p.directory:
        raise UnknownLabelError(p.labels.text(label_id)
                                if label_id < len(p.labels) else label_id)
    entry = p.directory[label_id]
    a = p.automaton
    order = sorted(entry.owned)
    remap = {s: i for i, s in enumerate(order)}
    return make_automaton(
        range(len(order)), remap[entry.entry],
        {remap[s]: {b: {remap[t] for t in succ}
                    for b, succ in a.byte_transitions.get(s, {}).items()}
         for s in order if a.byte_transitions.get(s)},
        {remap[s]: {remap[t] for t in a.epsilon_transitions[s]}
         for s in order if a.epsilon_transitions.get(s)},
        {remap[f] for f in a.finals if f in entry.owned},
        {remap[f]: 0 for f in a.finals if f in entry.owned})


def validate_pfsm(p: Pfsm) -> list[str]:
    """Automaton invariants plus union-machine bookkeeping invariants."""
    problems = validate(p.automaton)
    a = p.automaton
    seen: set[int] = set()
    for lid, entry in p.directory.items():
        if entry.owned & seen:
            problems.append(f"pattern {entry.label!r} shares states with another pattern")
        seen |= entry.owned
        if entry.entry not in entry.owned:
            problems.append(f"pattern {entry.label!r} entry state not owned")
        for f in entry.owned & a.finals:
            if a.final_labels.get(f) != lid:
                problems.append(f"final {f} labeled {a.final_labels.get(f)}, owner is {lid}")
    if seen | {a.initial} != a.states:
        problems.append("pattern directory does not partition the non-initial states")
    if a.byte_transitions.get(a.initial):
        problems.append("ancillary initial state has byte transitions")
    q0_eps = a.epsilon_transitions.get(a.initial, set())
    entries = {e.entry for e in p.directory.values()}
    if q0_eps != entries:
        problems.append("ancillary epsilon edges do not match pattern entries")
    return problems


def dump_pfsm_lines(p: Pfsm) -> list[str]:
    lines = dump_lines(p.automaton, p.labels.text)
    for lid in sorted(p.directory):
        entry = p.directory[lid]
        lines.append(f"pattern {entry.label} {entry.entry}")
    return lines


def load_pfsm_lines(lines) -> Pfsm:
    """Load a union machine from its interchange dump.

    Also accepts a plain single-automaton dump without `pattern` lines when
    the initial state has no byte transitions and only epsilon fan-out, in
    which case each epsilon target is treated as a pattern entry (externally
    produced machines). Otherwise the whole automaton is wrapped as a single
    pattern.
    """
    a, final_texts, extra = parse_lines(lines)
    problems = validate(a)
    if problems:
        raise AutomatonFormatError("; ".join(problems))

    declared: list[tuple[str, int]] = []
    for line in extra:
        tokens = line.split()
        if tokens[0] != "pattern":
            raise AutomatonFormatError(f"unknown directive {tokens[0]!r}")
        if len(tokens) < 3:
            raise AutomatonFormatError(f"malformed pattern line {line!r}")
        declared.append((" ".join(tokens[1:-1]), int(tokens[-1])))

    if declared:
        return _assemble_from_directory(a, final_texts, declared)
    # No directory: wrap the automaton as one pattern under label "m0"
    # (or its sole final label text when unambiguous).
    texts = sorted(set(final_texts.values()))
    label = texts[0] if len(texts) == 1 else "m0"
    return build_pfsm([(label, _densify(a))])


def _assemble_from_directory(a: Automaton, final_texts: dict[int, str],
                             declared: list[tuple[str, int]]) -> Pfsm:
    q0 = a.initial
    labels = LabelRegistry()
    directory: dict[int, PatternEntry] = {}
    # Ownership is reachability from the entry state, excluding q0.
    for label, entry_state in declared:
        if label in labels:
            raise AutomatonFormatError(f"duplicate pattern label {label!r}")
        lid = labels.intern(label)
        owned = _reachable(a, entry_state) - {q0}
        sub_det = _subgraph_deterministic(a, owned)
        directory[lid] = PatternEntry(lid, label, entry_state, frozenset(owned), sub_det)
    # Re-key final labels onto registry ids.
    final_labels = {}
    for f, text in final_texts.items():
        if text not in labels:
            raise AutomatonFormatError(f"final {f} labeled {text!r} which has no pattern line")
        final_labels[f] = labels.id_of(text)
    a = make_automaton(a.states, a.initial, a.byte_transitions,
                       a.epsilon_transitions, a.finals, final_labels)
    p = Pfsm(a, labels, directory, generation=0,
             next_state_id=max(a.states) + 1 if a.states else 1)
    problems = validate_pfsm(p)
    if problems:
        raise AutomatonFormatError("; ".join(problems))
    return p


def _reachable(a: Automaton, start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        succ: set[int] = set(a.epsilon_transitions.get(s, ()))
        for targets in a.byte_transitions.get(s, {}).values():
            succ |= targets
        for t in succ:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def _subgraph_deterministic(a: Automaton, owned: set[int]) -> bool:
    for s in owned:
        if a.epsilon_transitions.get(s):
            return False
        for succ in a.byte_transitions.get(s, {}).values():
            if len(succ) > 1:
                return False
    return True


def dump_pfsm(p: Pfsm) -> str:
    return "\n".join(dump_pfsm_lines(p)) + "\n"


def load_pfsm(text: str) -> Pfsm:
    return load_pfsm_lines(text.splitlines())
