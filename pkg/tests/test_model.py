import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sparse_iroa.model import (
    DimensionError,
    InputError,
    Problem,
    ProblemFormatError,
    SparseSignal,
    format_problem,
    load_problem,
    parse_problem,
    relative_error,
    save_problem,
)

finite = st.just(0.0) | st.floats(1e-3, 1e3) | st.floats(-1e3, -1e-3)


def test_relative_error_examples():
    assert relative_error([1, 2], [1, 2]) == 0
    assert relative_error([0, 0], [3, 4]) == 1
    assert relative_error([1, 0, 0], [0, 0, 0]) == 1


def test_relative_error_length_mismatch():
    with pytest.raises(DimensionError):
        relative_error([1, 2], [1, 2, 3])


@given(arrays(float, 6, elements=finite), arrays(float, 6, elements=finite),
       st.floats(1e-3, 1e3) | st.floats(-1e3, -1e-3))
def test_relative_error_properties(a, b, c):
    e = relative_error(a, b)
    assert e >= 0
    assert (e == 0) == bool(np.array_equal(a, b)) or not np.any(b)
    if np.any(b):
        assert relative_error(c * a, c * b) == pytest.approx(e, rel=1e-12)


def test_problem_validation():
    with pytest.raises(InputError):
        Problem(np.array([[np.nan]]), np.array([1.0]))
    with pytest.raises(DimensionError):
        Problem(np.eye(2), np.ones(3))
    with pytest.raises(DimensionError):
        Problem(np.eye(2), np.ones(2), ground_truth=np.ones(3))


def test_problem_is_read_only():
    p = Problem(np.eye(2), np.ones(2))
    with pytest.raises(ValueError):
        p.phi[0, 0] = 5.0
    with pytest.raises(ValueError):
        p.b[0] = 5.0


def test_problem_copies_inputs():
    phi = np.eye(2)
    p = Problem(phi, np.ones(2))
    phi[0, 0] = 9.0
    assert p.phi[0, 0] == 1.0


def test_sparse_signal_invariants():
    s = SparseSignal(np.array([0.0, 2.0, 0.0, -1.0]), [3, 1])
    assert list(s.support) == [1, 3]
    assert s.sparsity_k == 2
    with pytest.raises(InputError):
        SparseSignal(np.array([0.0, 2.0]), [0, 1])


def test_text_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    phi = rng.standard_normal((3, 5))
    truth = np.array([0, 1.0 / 3.0, 0, -2e-17, 0])
    p = Problem(phi, phi @ truth, truth)
    path = tmp_path / "p.txt"
    save_problem(p, path)
    q = load_problem(path)
    assert np.array_equal(q.phi, p.phi)
    assert np.array_equal(q.b, p.b)
    assert np.array_equal(q.ground_truth, p.ground_truth)
    assert format_problem(q) == format_problem(p)


def test_text_format_layout():
    text = format_problem(Problem(np.array([[1.0, 0.5]]), np.array([2.0])))
    assert text == "1 2\n1.0 0.5\n2.0\n"


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("2 2\n1 0\n0 1\n1\n", 4),
        ("2 2\n1 0\n0 x\n1 1\n", 3),
        ("two 2\n", 1),
        ("1 1\n1\n1\nextra: 3\n", 4),
        ("1 2\n1 2\n3\ntruth: 1\n", 4),
    ],
)
def test_parse_errors_carry_line_numbers(text, lineno):
    with pytest.raises(ProblemFormatError) as info:
        parse_problem(text)
    assert info.value.lineno == lineno
    assert f"line {lineno}" in str(info.value)


def test_digest_tracks_content():
    a = Problem(np.eye(2), np.array([1.0, 2.0]))
    b = Problem(np.eye(2), np.array([1.0, 2.0]))
    c = Problem(np.eye(2), np.array([1.0, 2.5]))
    assert a.digest() == b.digest() != c.digest()
