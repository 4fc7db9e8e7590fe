"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` to see the lines inline; the
terminal summary repeats them in any case.
"""

import itertools
import os
import random
import subprocess
import sys
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS, GOLDEN, ROOT
from generators import random_digraph, valid_model
from minimal_models import MINIMAL, entity_count
from oracles import TRUTH_TABLE, cycles_by_path_search, cycles_by_permutation
from istarc.dsl import format_model, parse
from istarc.exporters import from_interchange, to_interchange
from istarc.model import ActorKind, ElementKind, LinkKind, Model, Refinement, RefinementOperator, structurally_equal
from istarc.validator import check_link_matrix, simple_cycles, validate
from test_views import check_laws


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, detail


@pytest.mark.criterion("corpus validity")
def test_corpus_validity():
    text = (CORPUS / "travel.istar").read_text(encoding="utf-8")
    start = time.perf_counter()
    model, warnings = parse(text, "travel.istar")
    diags = validate(model)
    elapsed = time.perf_counter() - start
    errors = [d for d in diags if d.is_error]
    report(
        "corpus validity",
        not errors and not warnings and elapsed < 1.0,
        f"{len(errors)} errors, {len(warnings)} warnings, {elapsed * 1000:.1f} ms",
    )


@pytest.mark.criterion("constraint coverage")
def test_constraint_coverage():
    passed = []
    for code in (f"E{i:03d}" for i in range(1, 17)):
        model = MINIMAL[code]
        if entity_count(model) <= 6 and [d.code for d in validate(model)] == [code]:
            passed.append(code)
    report("constraint coverage", len(passed) == 16, f"{len(passed)}/16 codes isolated")


@pytest.mark.criterion("matrix exhaustiveness")
def test_matrix_exhaustiveness():
    combos = list(itertools.product(ElementKind, ElementKind, LinkKind))
    mismatches = [
        c for c in combos if check_link_matrix(*c) != (TRUTH_TABLE[c[0].value, c[1].value] == c[2].value)
    ]
    permitted = sum(check_link_matrix(*c) for c in combos)
    report(
        "matrix exhaustiveness",
        len(combos) == 64 and not mismatches and permitted == 16,
        f"{len(combos)} combinations, {len(mismatches)} mismatches against the table, "
        f"{permitted} permitted (criterion expects 16)",
    )


@pytest.mark.criterion("cycle oracle")
def test_cycle_oracle():
    mismatches = checked = 0
    for n in range(0, 5):
        pairs = list(itertools.product(range(n), repeat=2))
        for mask in range(1 << len(pairs)):
            edges = [p for i, p in enumerate(pairs) if mask >> i & 1]
            graph = {v: [w for u, w in edges if u == v] for v in range(n)}
            checked += 1
            if {tuple(c) for c in simple_cycles(graph)} != cycles_by_permutation(range(n), edges):
                mismatches += 1
    exhaustive = checked
    rng = random.Random(20240517)
    for _ in range(1000):
        graph = random_digraph(rng, rng.randint(5, 10))
        found = simple_cycles(graph)
        checked += 1
        if len(found) != len({tuple(c) for c in found}) or {tuple(c) for c in found} != cycles_by_path_search(graph):
            mismatches += 1
    report(
        "cycle oracle",
        mismatches == 0,
        f"{exhaustive} exhaustive + {checked - exhaustive} random digraphs, {mismatches} mismatches",
    )


@pytest.mark.criterion("round-trips")
def test_round_trips():
    rng = random.Random(99)
    dsl_fail = json_fail = 0
    for _ in range(500):
        m = valid_model(rng)
        if not structurally_equal(parse(format_model(m))[0], m):
            dsl_fail += 1
        if not structurally_equal(from_interchange(to_interchange(m)), m):
            json_fail += 1
    report(
        "round-trips",
        dsl_fail == json_fail == 0,
        f"500 models, {dsl_fail} DSL failures, {json_fail} interchange failures",
    )


@pytest.mark.criterion("view laws")
def test_view_laws(travel_model):
    rng = random.Random(7)
    models = [travel_model] + [valid_model(rng) for _ in range(100)]
    failures = []
    for i, m in enumerate(models):
        try:
            check_laws(m)
        except AssertionError:
            failures.append(i)
    report("view laws", not failures, f"corpus + 100 random models, {len(failures)} failures")


def _arity_accepted(n: int, op: RefinementOperator) -> bool:
    m = Model()
    a = m.add_actor("a", ActorKind.ROLE)
    parent = m.add_element(a, "p", ElementKind.GOAL)
    kids = tuple(m.add_element(a, f"c{i}", ElementKind.TASK) for i in range(n))
    raw = Model.from_entities(m.actors.values(), m.elements.values(), refinements=[Refinement("R1", op, parent, kids)])
    built = Model.from_entities(m.actors.values(), m.elements.values())
    try:
        built.add_refinement(parent, kids, op)
        constructed = True
    except Exception:
        constructed = False
    validated = validate(raw) == []
    assert constructed == validated
    return validated


@settings(max_examples=80, deadline=None, derandomize=True)
@given(st.integers(1, 8), st.sampled_from(list(RefinementOperator)))
def _arity_property(n, op):
    assert _arity_accepted(n, op) == (op is RefinementOperator.OR or n >= 2)


@pytest.mark.criterion("refinement arity")
def test_refinement_arity():
    exhaustive = all(
        _arity_accepted(n, op) == (op is RefinementOperator.OR or n >= 2)
        for n in range(1, 9)
        for op in RefinementOperator
    )
    try:
        _arity_property()
        prop = True
    except AssertionError:
        prop = False
    and1 = not _arity_accepted(1, RefinementOperator.AND)
    or1 = _arity_accepted(1, RefinementOperator.OR)
    report(
        "refinement arity",
        exhaustive and prop and and1 and or1,
        f"AND/1 rejected={and1}, OR/1 accepted={or1}, arities 1-8 exhaustive={exhaustive}, property={prop}",
    )


def _istarc(*args):
    env = dict(os.environ, NO_COLOR="1")
    return subprocess.run(
        [sys.executable, "-m", "istarc", *args],
        cwd=ROOT,
        capture_output=True,
        env=env,
    )


@pytest.mark.criterion("CLI contract")
def test_cli_contract():
    scenarios = {
        "valid corpus": (["check", "corpus/travel.istar"], 0, "cli_valid.out"),
        "E002 cycle file": (["check", "corpus/bad_isa_cycle.istar"], 1, "cli_cycle.out"),
        "missing file": (["check", "corpus/missing.istar"], 2, "cli_missing.err"),
    }
    problems = []
    for label, (argv, code, gold) in scenarios.items():
        proc = _istarc(*argv)
        stream = proc.stderr if gold.endswith(".err") else proc.stdout
        if os.environ.get("ISTARC_REGEN_GOLDEN") == "1":
            (GOLDEN / gold).write_bytes(stream)
        if proc.returncode != code:
            problems.append(f"{label}: exit {proc.returncode} != {code}")
        if stream != (GOLDEN / gold).read_bytes():
            problems.append(f"{label}: output differs from golden")
    runs = [_istarc("check", "--diagnostics", "machine", "corpus/bad_isa_cycle.istar").stdout for _ in range(2)]
    if runs[0] != runs[1] or not runs[0]:
        problems.append("machine diagnostics differ between runs")
    report(
        "CLI contract",
        not problems,
        "; ".join(problems) or "exit codes 0/1/2 match goldens, machine output byte-stable",
    )
