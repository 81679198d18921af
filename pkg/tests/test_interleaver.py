import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from golden import DP3, FIRST_STEP_SLOTS, GOLDEN_DISPERSION, GOLDEN_SEQUENCE
from intrablock.interleaver import (
    ALL_OBJECTIVES,
    DispersionObjective,
    Scope,
    approximate_sequence,
    approximate_sequence_steps,
    block_sequence,
    counts,
    dispersion,
    fine_tune,
    from_string,
    is_valid,
    positions,
    slip,
    to_string,
    tuned_sequence,
    worst_sequence,
)

allocs = st.lists(st.integers(0, 7), min_size=1, max_size=7).filter(lambda t: sum(t) > 0)


def test_objective_parsing_and_names():
    obj = DispersionObjective.parse("allpairs:neg_pe2")
    assert obj == DispersionObjective(Scope.ALL_PAIRS, "neg_pe", 2.0)
    assert obj.name == "allpairs:neg_pe2"
    assert DispersionObjective.parse("Neighb:LN").name == "neighb:ln"
    assert len(ALL_OBJECTIVES) == 8 and len(set(ALL_OBJECTIVES)) == 8
    with pytest.raises(ValueError):
        DispersionObjective.parse("neighb")
    with pytest.raises(ValueError):
        DispersionObjective(Scope.NEIGHB, "sqrt")
    with pytest.raises(ValueError):
        DispersionObjective(Scope.NEIGHB, "neg_pe", 0.0)


def test_kernels():
    assert DispersionObjective(kernel="neg_pe", n=2).g(2) == -0.25
    assert DispersionObjective(kernel="ln").g(math.e) == pytest.approx(1.0)
    assert DispersionObjective(kernel="atan").g(1) == pytest.approx(math.pi / 4)


def test_dispersion_by_hand():
    seq = (1, 2, 1, 1, 2)
    pe1_all = DispersionObjective(Scope.ALL_PAIRS, "neg_pe", 1)
    pe1_nb = DispersionObjective(Scope.NEIGHB, "neg_pe", 1)
    # batch 1 at 1,3,4; batch 2 at 2,5
    assert dispersion(seq, pe1_all) == pytest.approx(-(1 / 2 + 1 / 3 + 1 / 1) - 1 / 3)
    assert dispersion(seq, pe1_nb) == pytest.approx(-(1 / 2 + 1) - 1 / 3)
    assert dispersion((1,), pe1_all) == 0.0
    assert dispersion((), pe1_nb) == 0.0


def test_string_round_trip():
    assert to_string((1, 2, 3)) == "123"
    assert from_string("123") == (1, 2, 3)
    assert to_string((1, 12)) == "1,12"
    assert from_string("1,12") == (1, 12)


def test_slip_ties_go_left():
    free = [False] * 6
    assert slip(2.5, free) == 2
    assert slip(2.51, free) == 3
    taken = [False, True, True, False, False, False]
    assert slip(2.5, taken) == 1
    assert slip(2.6, taken) == 4
    assert slip(0.2, free) == 1 and slip(9.0, free) == 6
    with pytest.raises(ValueError):
        slip(1.0, [True, True])


def test_golden_sequence():
    assert to_string(approximate_sequence((6, 5, 4, 3, 3, 2, 2, 2))) == GOLDEN_SEQUENCE


def test_first_outer_step_places_largest_batch():
    first = next(approximate_sequence_steps((6, 5, 4, 3, 3, 2, 2, 2)))
    assert positions(first, 1) == FIRST_STEP_SLOTS
    assert set(first) == {0, 1}


def test_zero_batches_are_dropped_and_labels_kept():
    seq = approximate_sequence((3, 0, 2))
    assert counts(seq, 3) == (3, 0, 2)
    assert approximate_sequence((0, 0, 1)) == (3,)


def test_single_packet_batches_fill_leftmost():
    assert approximate_sequence((1, 1, 1)) == (1, 2, 3)


@pytest.mark.parametrize("alloc", list(GOLDEN_DISPERSION))
def test_golden_approximation_and_fine_tune(alloc):
    seq = approximate_sequence(alloc)
    for obj, a1, a2 in zip(ALL_OBJECTIVES, GOLDEN_DISPERSION[alloc]["alg1"], GOLDEN_DISPERSION[alloc]["alg2"]):
        assert dispersion(seq, obj) == pytest.approx(a1, abs=DP3), obj.name
        assert dispersion(fine_tune(seq, obj), obj) == pytest.approx(a2, abs=DP3), obj.name


@settings(max_examples=100, deadline=None)
@given(allocs)
def test_generators_produce_valid_sequences(alloc):
    assert is_valid(approximate_sequence(alloc), alloc)
    assert is_valid(worst_sequence(alloc), alloc)
    for step in approximate_sequence_steps(alloc):
        assert len(step) == sum(alloc)
        assert all(step.count(k) in (0, alloc[k - 1]) for k in range(1, len(alloc) + 1))


@settings(max_examples=60, deadline=None)
@given(allocs, st.sampled_from(ALL_OBJECTIVES), st.randoms(use_true_random=False))
def test_fine_tune_improves_and_stops_at_local_optimum(alloc, obj, rnd):
    start = list(worst_sequence(alloc))
    rnd.shuffle(start)
    tuned = fine_tune(start, obj)
    assert is_valid(tuned, alloc)
    assert dispersion(tuned, obj) >= dispersion(start, obj)
    # no adjacent swap improves the result
    for i in range(len(tuned) - 1):
        swapped = list(tuned)
        swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
        assert not dispersion(swapped, obj) > dispersion(tuned, obj)


def _reference_fine_tune(seq, obj):
    f = list(seq)
    current = dispersion(f, obj)
    i = 0
    while i < len(f) - 1:
        if f[i] != f[i + 1]:
            f[i], f[i + 1] = f[i + 1], f[i]
            trial = dispersion(f, obj)
            if trial > current:
                current = trial
                i = 0
                continue
            f[i], f[i + 1] = f[i + 1], f[i]
        i += 1
    return tuple(f)


@settings(max_examples=80, deadline=None)
@given(allocs, st.sampled_from(ALL_OBJECTIVES), st.randoms(use_true_random=False))
def test_fine_tune_equals_plain_rescanning_search(alloc, obj, rnd):
    start = list(worst_sequence(alloc))
    rnd.shuffle(start)
    assert fine_tune(start, obj) == _reference_fine_tune(start, obj)


def test_reference_sequences():
    assert block_sequence(3, 2) == (1, 2, 3, 1, 2, 3)
    assert block_sequence(2, 0) == ()
    assert worst_sequence((2, 0, 1)) == (1, 1, 3)
    with pytest.raises(ValueError):
        block_sequence(0, 1)


def test_tuned_sequence_is_memoised_fine_tune():
    obj = ALL_OBJECTIVES[0]
    assert tuned_sequence((5, 3, 3, 5), obj) == fine_tune(approximate_sequence((5, 3, 3, 5)), obj)
