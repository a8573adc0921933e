"""Tests for MovieLens ingestion."""

import numpy as np
import pytest

from drsub.errors import InvalidParameterError, MovieLensFormatError
from drsub.functions import LogDiversityUtility
from drsub.movielens import ingest_movielens, read_movies, read_ratings, shared_genre_mask, synthetic_movielens


@pytest.fixture
def movielens_files(tmp_path):
    """Three movies and three users in the 1M format."""
    ratings = tmp_path / "ratings.dat"
    ratings.write_text(
        "1::10::5::978300760\n"
        "1::20::3::978302109\n"
        "1::30::1::978301968\n"
        "2::10::4::978300275\n"
        "2::20::2::978824291\n"
        "3::10::2::978302268\n",
        encoding="latin-1",
    )
    movies = tmp_path / "movies.dat"
    movies.write_text(
        "10::Toy Story (1995)::Action|Comedy\n"
        "20::Jumanji (1995)::Comedy\n"
        "30::Heat (1995)::Drama\n",
        encoding="latin-1",
    )
    return ratings, movies


def test_ingest_selects_top_movies_and_users(movielens_files):
    """Test selection by rating count and the rescaled weights."""
    extract = ingest_movielens(*movielens_files, n_movies=2, n_users=2, seed=0)
    assert extract.movie_ids == [10, 20]
    assert extract.user_ids == [1, 2]
    np.testing.assert_allclose(extract.weights, [[1.0, 0.6], [0.8, 0.4]])
    assert extract.titles == ["Toy Story (1995)", "Jumanji (1995)"]


def test_ingest_missing_rating_is_zero(movielens_files):
    """Test that unrated movies get weight 0."""
    extract = ingest_movielens(*movielens_files, n_movies=3, n_users=3)
    assert extract.movie_ids == [10, 20, 30]
    assert extract.user_ids == [1, 2, 3]
    assert extract.weights[1][2] == 0.0
    assert extract.weights[2] == [0.4, 0.0, 0.0]


def test_pair_penalties_follow_genres(movielens_files):
    """Test θ is symmetric, in [-1, 0], and zero across unrelated genres."""
    extract = ingest_movielens(*movielens_files, n_movies=3, n_users=3, seed=5)
    for theta in np.asarray(extract.pair_penalties):
        np.testing.assert_array_equal(theta, theta.T)
        assert np.all((theta >= -1.0) & (theta <= 0.0))
        assert theta[0, 2] == 0.0
        assert theta[1, 2] == 0.0
        assert np.all(np.diag(theta) == 0.0)


def test_shared_genre_mask():
    """Test the genre overlap mask."""
    mask = shared_genre_mask([["Action", "Comedy"], ["Comedy"], ["Drama"]])
    np.testing.assert_array_equal(mask, [[False, True, False], [True, False, False], [False, False, False]])


def test_malformed_line_reports_line_number(tmp_path):
    """Test that format errors carry the offending line."""
    ratings = tmp_path / "ratings.dat"
    ratings.write_text("1::10::5::978300760\n1::20::3\n", encoding="latin-1")
    with pytest.raises(MovieLensFormatError) as excinfo:
        read_ratings(ratings)
    assert excinfo.value.line_number == 2


def test_rating_out_of_range(tmp_path):
    """Test that ratings outside 1..5 are rejected."""
    ratings = tmp_path / "ratings.dat"
    ratings.write_text("1::10::7::978300760\n", encoding="latin-1")
    with pytest.raises(MovieLensFormatError):
        read_ratings(ratings)


def test_too_many_requested(movielens_files):
    """Test that asking for more movies or users than exist raises."""
    with pytest.raises(InvalidParameterError):
        ingest_movielens(*movielens_files, n_movies=4)
    with pytest.raises(InvalidParameterError):
        ingest_movielens(*movielens_files, n_movies=2, n_users=4)


def test_digest_is_deterministic(movielens_files):
    """Test that the same inputs give the same digest."""
    first = ingest_movielens(*movielens_files, n_movies=2, n_users=2, seed=1)
    second = ingest_movielens(*movielens_files, n_movies=2, n_users=2, seed=1)
    assert first.digest() == second.digest()
    assert first.digest() != ingest_movielens(*movielens_files, n_movies=2, n_users=2, seed=2).digest()


def test_synthetic_extract_shapes():
    """Test the synthetic stand-in for the data files."""
    extract = synthetic_movielens(n_movies=6, n_users=8, seed=3)
    assert extract.n_movies == 6
    assert extract.n_users == 8
    weights = np.asarray(extract.weights)
    assert weights.shape == (8, 6)
    assert np.all((weights >= 0.0) & (weights <= 1.0))
    functions = extract.functions()
    assert len(functions) == 8
    assert all(isinstance(f, LogDiversityUtility) for f in functions)
    assert synthetic_movielens(n_movies=6, n_users=8, seed=3).digest() == extract.digest()


def test_extra_field_reports_line_number(tmp_path):
    """Test that a line with five fields is rejected."""
    ratings = tmp_path / "ratings.dat"
    ratings.write_text("1::10::5::978300760::9\n1::20::3::978302109\n", encoding="latin-1")
    with pytest.raises(MovieLensFormatError) as excinfo:
        read_ratings(ratings)
    assert excinfo.value.line_number == 1


def test_blank_lines_keep_line_numbers(tmp_path):
    """Test that blank lines are skipped but still counted."""
    ratings = tmp_path / "ratings.dat"
    ratings.write_text("1::10::5::978300760\n\n1::20::x::978302109\n", encoding="latin-1")
    with pytest.raises(MovieLensFormatError) as excinfo:
        read_ratings(ratings)
    assert excinfo.value.line_number == 3


def test_read_ratings_types(movielens_files):
    """Test the parsed columns and integer dtypes."""
    ratings = read_ratings(movielens_files[0])
    assert list(ratings.columns) == ["user_id", "movie_id", "rating", "timestamp"]
    assert len(ratings) == 6
    assert ratings["rating"].tolist() == [5, 3, 1, 4, 2, 2]
    assert ratings["timestamp"].dtype == "int64"


def test_movie_titles_are_literal(tmp_path):
    """Test that titles are not treated as missing values or quoted fields."""
    movies = tmp_path / "movies.dat"
    movies.write_text('1::NA::Drama\n2::"Quoted" Title (1999)::Comedy|Drama\n', encoding="latin-1")
    frame = read_movies(movies)
    assert frame["movie_id"].tolist() == [1, 2]
    assert frame["title"].tolist() == ["NA", '"Quoted" Title (1999)']
    assert frame["genres"].tolist() == [["Drama"], ["Comedy", "Drama"]]
