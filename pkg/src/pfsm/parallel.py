"""Partitioned matching: split by pattern or by input segment.

Every strategy produces exactly the match set of a single-worker run.
Workers share only the immutable machine generation (and, for data
partitioning, the read-only input); the only inter-worker traffic is
carried active sets (chained mode) and match batches to the collector.

The default executor is a deterministic sequential scheduler; "threads"
runs real worker threads (the kernel path releases the GIL).
"""

from __future__ import annotations

import queue
import threading
from dataclasses import dataclass

from .engine import ActiveSet, Match, find_matches, run_segment
from .union import Pfsm, build_pfsm, extract_pattern


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class PartitionPlan:
    strategy: str                          # "regex" | "lazy" | "chained"
    workers: int
    assignment: tuple[tuple[int, int], ...] | None = None  # (label id, worker)
    cuts: tuple[int, ...] | None = None    # ascending interior cut points

    def assignment_map(self) -> dict[int, int]:
        return dict(self.assignment or ())


def regex_plan(p: Pfsm, workers: int) -> PartitionPlan:
    """Round-robin assignment of the live labels."""
    labels = p.live_labels()
    return PartitionPlan("regex", workers,
                         assignment=tuple((lid, i % workers)
                                          for i, lid in enumerate(labels)))


def data_plan(strategy: str, n: int, workers: int) -> PartitionPlan:
    """Evenly cut [0, n) into `workers` contiguous segments."""
    if strategy not in ("lazy", "chained"):
        raise PlanError(f"not a data strategy: {strategy!r}")
    workers = min(workers, n) if n else 1
    cuts = tuple(n * k // workers for k in range(1, workers))
    return PartitionPlan(strategy, workers, cuts=cuts)


def segments(plan: PartitionPlan, n: int) -> list[tuple[int, int]]:
    """Inclusive (lo, hi) bounds of each worker's segment."""
    cuts = plan.cuts or ()
    if any(not 0 < c < n for c in cuts) or list(cuts) != sorted(set(cuts)):
        raise PlanError(f"malformed cuts {cuts} for input of length {n}")
    bounds = [0, *cuts, n]
    return [(bounds[k], bounds[k + 1] - 1) for k in range(len(bounds) - 1)]


def _check_assignment(p: Pfsm, plan: PartitionPlan) -> dict[int, list[int]]:
    amap = plan.assignment_map()
    missing = [lid for lid in p.live_labels() if lid not in amap]
    if missing:
        names = ", ".join(p.label_text(lid) for lid in missing)
        raise PlanError(f"unassigned labels: {names}")
    by_worker: dict[int, list[int]] = {}
    for lid, w in amap.items():
        if not 0 <= w < plan.workers:
            raise PlanError(f"worker {w} out of range")
        by_worker.setdefault(w, []).append(lid)
    return by_worker


def run_regex_partitioned(p: Pfsm, data: bytes, plan: PartitionPlan, *,
                          executor: str = "serial",
                          backend: str = "auto") -> list[Match]:
    """Each worker scans the full input with only its assigned patterns."""
    if plan.strategy != "regex":
        raise PlanError(f"plan strategy is {plan.strategy!r}, expected 'regex'")
    by_worker = _check_assignment(p, plan)

    def scan(label_ids: list[int]) -> list[Match]:
        sub = build_pfsm([(p.label_text(lid), extract_pattern(p, lid))
                          for lid in sorted(label_ids)])
        found = find_matches(sub, data, backend=backend)
        # Sub-machine label ids are local; map back through the label text.
        return [Match(p.labels.id_of(sub.label_text(m.label)), m.start, m.end)
                for m in found]

    batches = _run_tasks([lambda ids=ids: scan(ids)
                          for _, ids in sorted(by_worker.items())], executor)
    return _merge(batches)


def run_lazy_partitioned(p: Pfsm, data: bytes, plan: PartitionPlan, *,
                         executor: str = "serial",
                         backend: str = "auto") -> list[Match]:
    """Each worker starts matches only inside its segment but keeps
    consuming input until the end or until nothing is active."""
    if plan.strategy != "lazy":
        raise PlanError(f"plan strategy is {plan.strategy!r}, expected 'lazy'")
    if not data:
        return []
    segs = segments(plan, len(data))

    def scan(lo: int, hi: int) -> list[Match]:
        out: list[Match] = []
        run_segment(p, data[lo:], (lo, hi), None, out.append, base=lo,
                    backend=backend)
        return out

    batches = _run_tasks([lambda lo=lo, hi=hi: scan(lo, hi)
                          for lo, hi in segs], executor)
    return _merge(batches)


def run_chained_partitioned(p: Pfsm, data: bytes, plan: PartitionPlan, *,
                            executor: str = "serial",
                            backend: str = "auto") -> list[Match]:
    """Each worker matches within its segment; active states at the segment
    boundary are carried to the next worker until the chain drains."""
    if plan.strategy != "chained":
        raise PlanError(f"plan strategy is {plan.strategy!r}, expected 'chained'")
    if not data:
        return []
    segs = segments(plan, len(data))
    if executor == "threads":
        return _chained_threads(p, data, segs, backend)

    # Sequential chain: seeding a segment pass with the carried set is
    # equivalent to running the reinitialization pass and the carried
    # continuation passes separately and uniting their outputs.
    out: list[Match] = []
    carry: ActiveSet | None = None
    for lo, hi in segs:
        _, carry = run_segment(p, data[lo:hi + 1], (lo, hi), carry,
                               out.append, base=lo, backend=backend)
    return _merge([out])


def _chained_threads(p: Pfsm, data: bytes, segs, backend) -> list[Match]:
    """Multi-round chained execution: every worker first scans its own
    segment, then replays each carried set it receives, forwarding the
    resulting carried sets until its predecessor signals completion."""
    n_workers = len(segs)
    inboxes = [queue.Queue() for _ in range(n_workers)]
    batches: list[list[Match]] = [[] for _ in range(n_workers)]
    errors: list[BaseException] = []

    def send(k: int, item):
        if k < n_workers:
            inboxes[k].put(item)

    def worker(k: int):
        lo, hi = segs[k]
        seg = data[lo:hi + 1]
        out = batches[k]
        try:
            _, carry = run_segment(p, seg, (lo, hi), None, out.append,
                                   base=lo, backend=backend)
            if carry.tags:
                send(k + 1, carry)
            if k > 0:
                while True:
                    item = inboxes[k].get()
                    if item is None:
                        break
                    _, carry = run_segment(p, seg, None, item, out.append,
                                           base=lo, backend=backend)
                    if carry.tags:
                        send(k + 1, carry)
        except BaseException as exc:  # surface worker failures to the caller
            errors.append(exc)
        finally:
            send(k + 1, None)

    threads = [threading.Thread(target=worker, args=(k,), daemon=True)
               for k in range(n_workers)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    if errors:
        raise errors[0]
    return _merge(batches)


def run_partitioned(p: Pfsm, data: bytes, plan: PartitionPlan, *,
                    executor: str = "serial",
                    backend: str = "auto") -> list[Match]:
    runner = {"regex": run_regex_partitioned,
              "lazy": run_lazy_partitioned,
              "chained": run_chained_partitioned}[plan.strategy]
    return runner(p, data, plan, executor=executor, backend=backend)


def _run_tasks(tasks, executor: str) -> list[list[Match]]:
    if executor == "serial":
        return [task() for task in tasks]
    if executor == "threads":
        results: list = [None] * len(tasks)
        errors: list[BaseException] = []

        def call(i, task):
            try:
                results[i] = task()
            except BaseException as exc:
                errors.append(exc)

        threads = [threading.Thread(target=call, args=(i, t), daemon=True)
                   for i, t in enumerate(tasks)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        if errors:
            raise errors[0]
        return results
    raise ValueError(f"unknown executor {executor!r}")


def _merge(batches: list[list[Match]]) -> list[Match]:
    merged = set()
    for batch in batches:
        merged.update(batch)
    return sorted(merged, key=lambda m: (m.end, m.start, m.label))
