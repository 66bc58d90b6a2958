import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foliagraph import (
    CutGraph,
    FreeCircle,
    Merge,
    NotSortableError,
    Split,
    StuckError,
    builtin,
    complexity,
    contiguous,
    cut,
    harmonize,
    is_calabi,
    isomorphic,
    reduce_once,
    reglue,
    sort_events,
    validate,
)
from foliagraph.reduction import RegluingError, replay, validate_cut

from graphgen import random_non_calabi_graph, random_valid_graph


def test_cut_dumbbell_matches_hand_replay():
    c = cut(builtin("dumbbell"), Fraction(0))
    assert len(c.bottom) == len(c.top) == 2
    assert len(c.events) == 2
    split, merge = c.events
    assert isinstance(split, Split) and isinstance(merge, Merge)
    p, q = c.bottom
    # The split consumes one bottom strand, the merge eats one split
    # output together with the other bottom strand.
    assert split.input == p
    p1, p2 = split.outputs
    assert set(merge.inputs) == {p1, q}
    r = merge.output
    assert set(c.top) == {p2, r}
    assert c.glue_map == {p2: p, r: q}


def test_cut_theta_single_strand():
    c = cut(builtin("theta"), Fraction(0))
    assert len(c.bottom) == 1 and len(c.top) == 1
    assert isinstance(c.events[0], Split) and isinstance(c.events[1], Merge)


def test_cut_rejects_free_circle_and_singular_angle():
    with pytest.raises(ValueError):
        cut(builtin("free-circle(2)"), Fraction(0))
    with pytest.raises(ValueError):
        cut(builtin("theta"), Fraction(1, 4))


def test_sort_dumbbell_one_rewrite():
    c = cut(builtin("dumbbell"), Fraction(0))
    sorted_cut, rewrites = sort_events(c)
    assert rewrites == 1
    merge, split = sorted_cut.events
    assert isinstance(merge, Merge) and isinstance(split, Split)
    # Case (ii): merge the split's input with the other bottom strand,
    # then split into the original outward strands.
    assert set(merge.inputs) == set(c.bottom)
    assert set(split.outputs) == set(c.top)
    assert sorted_cut.bottom == c.bottom
    assert sorted_cut.top == c.top
    assert sorted_cut.glue == c.glue


def test_sort_already_sorted_is_identity():
    c = cut(builtin("dumbbell"), Fraction(0))
    once, _ = sort_events(c)
    twice, rewrites = sort_events(once)
    assert rewrites == 0
    assert twice.events == once.events


def test_sort_single_strand_bubble_not_sortable():
    c = cut(builtin("theta"), Fraction(0))
    with pytest.raises(NotSortableError) as exc:
        sort_events(c)
    assert exc.value.live == 1


def test_sort_borrows_smallest_strand():
    # A bubble beside a parallel strand is sortable via the borrow rule.
    word = (Split(0, (2, 3)), Merge((2, 3), 4))
    c = CutGraph((0, 1), (4, 1), word, ((4, 0), (1, 1)), "bubble", Fraction(0))
    validate_cut(c)
    sorted_cut, rewrites = sort_events(c)
    assert rewrites == 1
    merge, split = sorted_cut.events
    assert merge.inputs == (0, 1)
    assert split.outputs == (4, 1)
    levels = replay(sorted_cut.bottom, sorted_cut.events)
    assert levels[1] == frozenset({merge.output})


def test_reglue_sorted_dumbbell_is_theta():
    c, _ = sort_events(cut(builtin("dumbbell"), Fraction(0)))
    g = reglue(c)
    assert validate(g).ok
    assert isomorphic(g, builtin("theta"))
    assert complexity(g)[0] == 1


def test_reglue_roundtrip_without_sorting():
    for name in ("dumbbell", "theta"):
        g = builtin(name)
        assert isomorphic(reglue(cut(g, Fraction(0))), g)


def test_reglue_vertex_free_cut():
    c = CutGraph((0, 1, 2), (0, 1, 2), (), ((0, 1), (1, 2), (2, 0)), "cover", Fraction(0))
    fc = reglue(c)
    assert fc == FreeCircle("cover-reglued", 3)
    # Two orbits cannot reassemble into one connected object.
    c2 = CutGraph((0, 1), (0, 1), (), ((0, 0), (1, 1)), "split-cover", Fraction(0))
    with pytest.raises(RegluingError):
        reglue(c2)


def test_reduce_once_dumbbell():
    g = reduce_once(builtin("dumbbell"))
    assert isomorphic(g, builtin("theta"))
    assert complexity(g)[0] == 1


def test_reduce_once_rejects_calabi_input():
    with pytest.raises(ValueError):
        reduce_once(builtin("theta"))


def test_harmonize_fixed_points():
    th = builtin("theta")
    result, trace = harmonize(th)
    assert result == th and trace.steps == ()
    fc = builtin("free-circle(4)")
    result, trace = harmonize(fc)
    assert result == fc and trace.steps == ()


def test_harmonize_dumbbell():
    result, trace = harmonize(builtin("dumbbell"))
    assert len(trace.steps) == 1
    assert isomorphic(result, builtin("theta"))
    step = trace.steps[0]
    assert (step.cut_angle, step.complexity_before, step.complexity_after) == (0, 2, 1)
    assert step.rewrites == 1


MULTISTEP_FIXTURE = """\
graph slow
  vertex m0 MERGE 4/17
  vertex s0 SPLIT 9/17
  edge e0 m0.out0 -> m0.in0 winding 1
  edge e1 s0.out0 -> m0.in1 winding 2
  edge e2 s0.out1 -> s0.in0 winding 1
end
"""


def test_harmonize_multi_step():
    # A heavily wound two-vertex graph needs three reductions: 4 -> 3 -> 2 -> 1.
    from foliagraph import parse

    g = parse(MULTISTEP_FIXTURE)
    assert validate(g).ok and not is_calabi(g).verdict
    result, trace = harmonize(g)
    assert [(s.complexity_before, s.complexity_after) for s in trace.steps] == [
        (4, 3),
        (3, 2),
        (2, 1),
    ]
    assert isomorphic(result, builtin("theta"))
    assert contiguous(g, result)


def test_contiguous():
    assert contiguous(builtin("dumbbell"), builtin("theta"))
    assert not contiguous(builtin("theta"), builtin("free-circle(1)"))
    g = builtin("dumbbell")
    assert contiguous(g, g)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_roundtrip_at_random_regular_angle(seed):
    rng = random.Random(seed)
    g = random_valid_graph(rng, max_pairs=4)
    angles = {v.angle for v in g.vertices}
    while True:
        a = Fraction(rng.randrange(1, 997), 997)
        if a not in angles:
            break
    assert isomorphic(reglue(cut(g, a)), g)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_sort_preserves_interface_and_counting(seed):
    rng = random.Random(seed)
    g = random_non_calabi_graph(rng, max_pairs=4)
    k, witness = complexity(g)
    c = cut(g, witness)
    assert len(c.bottom) == k
    try:
        sorted_cut, _ = sort_events(c)
    except NotSortableError:
        assert k <= c.merge_count()
        return
    assert sorted_cut.bottom == c.bottom
    assert sorted_cut.top == c.top
    assert sorted_cut.glue == c.glue
    assert sorted_cut.merge_count() == c.merge_count()
    assert sorted_cut.split_count() == c.split_count()
    kinds = [type(e) for e in sorted_cut.events]
    assert kinds == sorted(kinds, key=lambda t: t is Split)
    # Separator level: everything merged, nothing split yet.
    levels = replay(sorted_cut.bottom, sorted_cut.events)
    separator = levels[sorted_cut.merge_count()]
    assert len(separator) == len(c.bottom) - c.merge_count() >= 1
    if c.events:
        assert len(separator) < len(c.bottom)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_reduce_once_contract(seed):
    rng = random.Random(seed)
    g = random_non_calabi_graph(rng, max_pairs=5)
    before, _ = complexity(g)
    try:
        g2 = reduce_once(g)
    except StuckError:
        assert before <= g.merge_count()
        return
    assert validate(g2).ok
    assert complexity(g2)[0] < before
    assert contiguous(g, g2)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_harmonize_contract(seed):
    rng = random.Random(seed)
    g = random_non_calabi_graph(rng, max_pairs=5)
    before, _ = complexity(g)
    try:
        result, trace = harmonize(g)
    except StuckError:
        return
    assert is_calabi(result).verdict
    assert contiguous(g, result)
    assert 1 <= len(trace.steps) <= before
    pairs = [(s.complexity_before, s.complexity_after) for s in trace.steps]
    assert all(a > b for a, b in pairs)
    assert all(pairs[i][1] == pairs[i + 1][0] for i in range(len(pairs) - 1))
