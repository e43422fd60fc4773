"""Diff kernel: minimality, run shape, tie placement, kernel parity."""

from __future__ import annotations

import random

import pytest

from linefix.linediff import KERNEL_BACKEND, available_kernels, edit_runs
from tests.helpers import lcs_length, random_pair

KERNELS = sorted(available_kernels())


def _changed_counts(runs):
    deleted = sum(a_end - a_start for a_start, a_end, _, _ in runs)
    inserted = sum(b_end - b_start for _, _, b_start, b_end in runs)
    return deleted, inserted


def test_identical_inputs_no_runs():
    assert edit_runs(["a", "b"], ["a", "b"]) == []
    assert edit_runs([], []) == []


def test_pure_insertion():
    assert edit_runs(["a", "c"], ["a", "b", "c"]) == [(1, 1, 1, 2)]


def test_pure_deletion():
    assert edit_runs(["a", "b", "c"], ["a", "c"]) == [(1, 2, 1, 1)]


def test_replacement():
    assert edit_runs(["1", "2", "3"], ["1", "9", "3"]) == [(1, 2, 1, 2)]


def test_empty_sides():
    assert edit_runs([], ["a", "b"]) == [(0, 0, 0, 2)]
    assert edit_runs(["a", "b"], []) == [(0, 2, 0, 0)]


def test_adjacent_changes_merge_into_one_run():
    runs = edit_runs(["a", "x", "y", "d"], ["a", "p", "q", "r", "d"])
    assert runs == [(1, 3, 1, 4)]


def test_runs_separated_by_unchanged_line():
    runs = edit_runs(["a", "x", "b", "y", "c"], ["a", "X", "b", "Y", "c"])
    assert runs == [(1, 2, 1, 2), (3, 4, 3, 4)]


@pytest.mark.parametrize(
    "a,b,expected",
    [
        # repeated lines: the change lands at the earliest position
        (["a", "a"], ["a"], [(0, 1, 0, 0)]),
        (["a"], ["a", "a"], [(0, 0, 0, 1)]),
        (["", "x", ""], [""], [(0, 2, 0, 0)]),
        (["{", "}", "{", "}"], ["{", "}"], [(0, 2, 0, 0)]),
    ],
)
def test_ambiguity_resolves_earliest(a, b, expected):
    assert edit_runs(a, b) == expected


@pytest.mark.parametrize("kernel_name", KERNELS)
def test_minimality_against_dp_oracle(kernel_name):
    kernel = available_kernels()[kernel_name]
    rng = random.Random(0xD1FF)
    for case_no in range(250):
        before, after = random_pair(rng, case_no)
        a, b = list(before.lines), list(after.lines)
        runs = edit_runs(a, b, kernel=kernel)
        deleted, inserted = _changed_counts(runs)
        lcs = lcs_length(a, b)
        assert deleted == len(a) - lcs, (a, b, runs)
        assert inserted == len(b) - lcs, (a, b, runs)


def test_run_shape_invariants():
    rng = random.Random(0xA11)
    for case_no in range(250):
        before, after = random_pair(rng, case_no)
        runs = edit_runs(list(before.lines), list(after.lines))
        prev_a = prev_b = -1
        for a_start, a_end, b_start, b_end in runs:
            assert 0 <= a_start <= a_end
            assert 0 <= b_start <= b_end
            assert a_end > a_start or b_end > b_start  # no empty runs
            # ascending with at least one unchanged line between runs
            assert a_start > prev_a and b_start > prev_b
            prev_a, prev_b = a_end, b_end


@pytest.mark.skipif(
    "compiled" not in KERNELS, reason="compiled kernel not built"
)
def test_kernels_agree_exactly():
    kernels = available_kernels()
    rng = random.Random(0xC0DE)
    for case_no in range(400):
        before, after = random_pair(rng, case_no)
        a, b = list(before.lines), list(after.lines)
        runs = {
            name: edit_runs(a, b, kernel=k) for name, k in kernels.items()
        }
        assert runs["python"] == runs["compiled"], (a, b)


def test_backend_reports_an_available_kernel():
    assert KERNEL_BACKEND in available_kernels()
