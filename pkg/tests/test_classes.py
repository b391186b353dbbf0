import pytest
from hypothesis import given, settings, strategies as st

from pseudocube import (CapExceeded, ClassFormatError, HypothesisClass,
                        parse_class, parse_class_json, project, random_class,
                        serialize_class, serialize_class_json)


def make(n, k, pats):
    return HypothesisClass.from_patterns(n, k, pats)


class TestConstruction:
    def test_validates_lengths_and_ranges(self):
        with pytest.raises(ValueError):
            make(2, 3, [(0, 0, 0)])
        with pytest.raises(ValueError):
            make(2, 3, [(0, 3)])
        with pytest.raises(ValueError):
            make(0, 3, [])
        with pytest.raises(ValueError):
            make(2, 1, [])

    def test_empty_is_flagged(self):
        h = make(2, 3, [])
        assert h.is_empty and len(h) == 0

    def test_duplicates_collapse_via_set_semantics(self):
        h = make(1, 2, [(0,), (0,), (1,)])
        assert len(h) == 2


class TestParsing:
    def test_basic_file(self):
        h = parse_class("n=2 k=3\n0 0\n1 2\n")
        assert (h.n, h.k) == (2, 3)
        assert h.patterns == {(0, 0), (1, 2)}

    def test_comments_and_blank_lines(self):
        h = parse_class("# a comment\n\nn=2 k=3  # header\n0 0\n# mid\n1 2\n")
        assert len(h) == 2

    def test_label_out_of_range_reports_line(self):
        with pytest.raises(ClassFormatError, match="line 2.*out of range"):
            parse_class("n=2 k=3\n0 5\n")

    def test_wrong_row_length(self):
        with pytest.raises(ClassFormatError, match="expected 2 labels"):
            parse_class("n=2 k=3\n0 0 1\n")

    def test_duplicate_row_rejected(self):
        with pytest.raises(ClassFormatError, match="duplicate"):
            parse_class("n=2 k=3\n0 0\n0 0\n")

    def test_malformed_header(self):
        with pytest.raises(ClassFormatError, match="header"):
            parse_class("n=2\n0 0\n")
        with pytest.raises(ClassFormatError):
            parse_class("0 0\n")

    def test_json_form(self):
        h = parse_class('{"n":2,"k":3,"patterns":[[0,0],[1,2]]}')
        assert h == parse_class("n=2 k=3\n0 0\n1 2\n")
        with pytest.raises(ClassFormatError):
            parse_class_json('{"n":2,"k":3,"patterns":[[0,0],[0,0]]}')

    def test_round_trip_is_canonical_identity(self):
        text = "n=2 k=3\n1 2\n0 0\n"
        canonical = "n=2 k=3\n0 0\n1 2\n"
        assert serialize_class(parse_class(text)) == canonical
        assert parse_class(serialize_class(parse_class(text))) == parse_class(text)
        j = serialize_class_json(parse_class(text))
        assert serialize_class_json(parse_class(j)) == j


class TestProject:
    def test_first_coordinate(self):
        h = make(2, 2, [(0, 0), (0, 1), (1, 0)])
        assert project(h, (0,)).patterns == {(0,), (1,)}

    def test_identity_projection(self):
        h = make(3, 2, [(0, 0, 1), (1, 1, 0)])
        assert project(h, (0, 1, 2)) == h

    def test_duplicate_collapse(self):
        h = make(2, 2, [(0, 0), (0, 1)])
        assert project(h, (0,)).patterns == {(0,)}

    def test_errors(self):
        h = make(2, 2, [(0, 0)])
        with pytest.raises(ValueError):
            project(h, ())
        with pytest.raises(ValueError):
            project(h, (0, 2))
        with pytest.raises(ValueError):
            project(h, (1, 0))


class TestRandomClass:
    def test_density_one_is_full_cube(self):
        h = random_class(2, 3, 1.0, seed=1)
        assert len(h) == 9

    def test_density_zero_is_empty(self):
        assert random_class(2, 3, 0.0, seed=1).is_empty

    def test_same_seed_same_class(self):
        a = random_class(2, 3, 0.5, seed=7)
        b = random_class(2, 3, 0.5, seed=7)
        assert a == b
        c = random_class(2, 3, 0.5, seed=8)
        assert a != c  # overwhelmingly likely under a 9-cell cube

    def test_cap(self):
        with pytest.raises(CapExceeded):
            random_class(30, 3, 0.5, seed=0, cap=2 ** 10)

    def test_density_range_validated(self):
        with pytest.raises(ValueError):
            random_class(2, 3, 1.5, seed=0)
        with pytest.raises(ValueError):
            random_class(2, 3, -0.1, seed=0)


# property tests: round trips and projection laws on arbitrary small classes

small_classes = st.integers(1, 4).flatmap(
    lambda n: st.integers(2, 4).flatmap(
        lambda k: st.builds(
            lambda cells: (n, k, cells),
            st.lists(st.integers(0, k ** n - 1), min_size=1, max_size=12, unique=True))))


def decode(n, k, cells):
    pats = []
    for c in cells:
        p = []
        for _ in range(n):
            p.append(c % k)
            c //= k
        pats.append(tuple(p))
    return HypothesisClass.from_patterns(n, k, pats)


@settings(max_examples=60, deadline=None)
@given(small_classes)
def test_serialize_parse_round_trip(spec):
    h = decode(*spec)
    assert parse_class(serialize_class(h)) == h
    assert parse_class_json(serialize_class_json(h)) == h


@settings(max_examples=60, deadline=None)
@given(small_classes, st.data())
def test_projection_composition_and_size(spec, data):
    h = decode(*spec)
    s = tuple(sorted(data.draw(
        st.sets(st.integers(0, h.n - 1), min_size=1, max_size=h.n))))
    t_prime = tuple(sorted(data.draw(
        st.sets(st.integers(0, len(s) - 1), min_size=1, max_size=len(s)))))
    assert len(project(h, s)) <= len(h)
    composed = project(project(h, s), t_prime)
    direct = project(h, tuple(s[i] for i in t_prime))
    assert composed == direct
