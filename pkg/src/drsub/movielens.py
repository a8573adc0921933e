"""MovieLens-1M ingestion and the recommendation utilities built from it."""

from pathlib import Path
import csv
import hashlib
import logging
import re

import numpy as np
import pandas as pd
from pydantic import BaseModel

from .errors import InvalidParameterError, MovieLensFormatError
from .functions import LogDiversityUtility

logger = logging.getLogger(__name__)

MAX_RATING = 5


def _first_line(mask: pd.Series) -> int:
    return int(mask.idxmax()) + 1


def _read_table(path: Path, columns: list[str]) -> pd.DataFrame:
    """Read a ``::``-delimited file into string columns, checking the field count.

    Blank lines are kept while parsing so that row i is line i + 1, then dropped.
    """
    try:
        frame = pd.read_csv(
            path,
            sep="::",
            engine="python",
            header=None,
            dtype=str,
            encoding="latin-1",
            quoting=csv.QUOTE_NONE,
            keep_default_na=False,
            skip_blank_lines=False,
        )
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=columns)
    except pd.errors.ParserError as e:
        found = re.search(r"line (\d+)", str(e))
        raise MovieLensFormatError(
            f"Expected {len(columns)} '::'-separated fields", path=path, line_number=int(found.group(1)) if found else 0
        ) from e

    missing = frame.isna() | (frame == "")
    frame = frame[~missing.all(axis=1)]
    missing = missing.loc[frame.index]
    if frame.shape[1] > len(columns):
        extra = ~missing.iloc[:, len(columns) :].all(axis=1)
        if extra.any():
            raise MovieLensFormatError(
                f"Expected {len(columns)} '::'-separated fields", path=path, line_number=_first_line(extra)
            )
        frame = frame.iloc[:, : len(columns)]
    frame = frame.reindex(columns=range(len(columns)))
    short = frame.isna().any(axis=1)
    if short.any():
        raise MovieLensFormatError(
            f"Expected {len(columns)} '::'-separated fields", path=path, line_number=_first_line(short)
        )
    frame.columns = columns
    return frame


def _integers(frame: pd.DataFrame, columns: list[str], path: Path) -> pd.DataFrame:
    numbers = frame[columns].apply(pd.to_numeric, errors="coerce")
    bad = numbers.isna().any(axis=1) | (numbers % 1 != 0).any(axis=1)
    if bad.any():
        line = _first_line(bad)
        raise MovieLensFormatError(f"Non-integer field in {frame.loc[line - 1].tolist()}", path=path, line_number=line)
    return numbers.astype("int64")


def read_ratings(path: Path) -> pd.DataFrame:
    """Parse ``UserID::MovieID::Rating::Timestamp`` lines."""
    columns = ["user_id", "movie_id", "rating", "timestamp"]
    ratings = _integers(_read_table(path, columns), columns, path)
    outside = ~ratings["rating"].between(1, MAX_RATING)
    if outside.any():
        line = _first_line(outside)
        raise MovieLensFormatError(
            f"Rating {ratings['rating'].loc[line - 1]} outside 1..5", path=path, line_number=line
        )
    return ratings.reset_index(drop=True)


def read_movies(path: Path) -> pd.DataFrame:
    """Parse ``MovieID::Title::Genres`` lines; genres are ``|``-separated."""
    frame = _read_table(path, ["movie_id", "title", "genres"])
    movies = _integers(frame, ["movie_id"], path)
    movies["title"] = frame["title"]
    movies["genres"] = frame["genres"].str.split("|").map(lambda genres: [g for g in genres if g])
    return movies.reset_index(drop=True)


def _top_ids(ids: pd.Series, count: int, what: str) -> list[int]:
    """Ids with the most occurrences; ties go to the smaller id."""
    counts = ids.value_counts().rename_axis("id").reset_index(name="n")
    counts = counts.sort_values(["n", "id"], ascending=[False, True], kind="mergesort")
    if len(counts) < count:
        raise InvalidParameterError(f"only {len(counts)} {what} available, {count} requested")
    return [int(i) for i in counts["id"].head(count)]


class MovieLensExtract(BaseModel):
    """Users x movies slice with rescaled ratings and per-user pair penalties.

    Movies are ordered by rating count and users by their count over the
    selected movies (ties by id); the user order is the arrival order.
    """

    movie_ids: list[int]
    titles: list[str]
    genres: list[list[str]]
    user_ids: list[int]
    # weights[t][i] = rating / 5, or 0 when user t did not rate movie i
    weights: list[list[float]]
    pair_penalties: list[list[list[float]]]
    seed: int

    @property
    def n_movies(self) -> int:
        return len(self.movie_ids)

    @property
    def n_users(self) -> int:
        return len(self.user_ids)

    def functions(self, scale: float = 5.0) -> list[LogDiversityUtility]:
        """One log-diversity utility per user."""
        return [LogDiversityUtility(w, theta, scale) for w, theta in zip(self.weights, self.pair_penalties)]

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form."""
        return hashlib.sha256(self.model_dump_json().encode("utf-8")).hexdigest()


def shared_genre_mask(genres: list[list[str]]) -> np.ndarray:
    """mask[i, j] is True when movies i ≠ j share a genre."""
    n = len(genres)
    sets = [set(g) for g in genres]
    mask = np.array([[i != j and bool(sets[i] & sets[j]) for j in range(n)] for i in range(n)])
    return mask.reshape(n, n)


def sample_pair_penalties(mask: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` symmetric matrices with U[-1, 0] entries on the masked pairs, 0 elsewhere."""
    n = mask.shape[0]
    draws = rng.uniform(-1.0, 0.0, size=(count, n, n))
    upper = np.triu(draws, 1)
    symmetric = upper + np.transpose(upper, (0, 2, 1))
    return np.where(mask[None, :, :], symmetric, 0.0)


def _build_extract(
    movies: pd.DataFrame,
    user_ids: list[int],
    ratings: pd.DataFrame,
    seed: int,
) -> MovieLensExtract:
    matrix = (
        ratings.pivot_table(index="user_id", columns="movie_id", values="rating", aggfunc="last")
        .reindex(index=user_ids, columns=movies["movie_id"].tolist())
        .fillna(0.0)
        / MAX_RATING
    )
    genres = [list(g) for g in movies["genres"]]
    rng = np.random.default_rng(seed)
    thetas = sample_pair_penalties(shared_genre_mask(genres), len(user_ids), rng)
    return MovieLensExtract(
        movie_ids=[int(m) for m in movies["movie_id"]],
        titles=[str(t) for t in movies["title"]],
        genres=genres,
        user_ids=user_ids,
        weights=matrix.to_numpy(dtype=float).tolist(),
        pair_penalties=thetas.tolist(),
        seed=seed,
    )


def ingest_movielens(
    ratings_path: Path,
    movies_path: Path,
    n_movies: int = 17,
    n_users: int = 100,
    seed: int = 0,
) -> MovieLensExtract:
    """Select the most-rated movies, then the most active users over them.

    Args:
        ratings_path: ratings.dat of the 1M release
        movies_path: movies.dat of the 1M release
        n_movies: Movies to keep
        n_users: Users to keep
        seed: Seed for the pair penalties

    Raises:
        MovieLensFormatError: Malformed line, with its line number
        InvalidParameterError: Fewer movies or users than requested
    """
    ratings = read_ratings(Path(ratings_path))
    catalog = read_movies(Path(movies_path)).set_index("movie_id")

    movie_ids = _top_ids(ratings["movie_id"], n_movies, "movies")
    missing = [m for m in movie_ids if m not in catalog.index]
    if missing:
        raise InvalidParameterError("rated movies missing from the movies file", movie_ids=missing)
    selected = ratings[ratings["movie_id"].isin(movie_ids)]
    user_ids = _top_ids(selected["user_id"], n_users, "users")
    selected = selected[selected["user_id"].isin(user_ids)]

    movies = catalog.loc[movie_ids].reset_index()
    logger.info("MovieLens extract: %d movies x %d users", n_movies, n_users)
    return _build_extract(movies, user_ids, selected, seed)


def synthetic_movielens(
    n_movies: int = 17,
    n_users: int = 100,
    n_genres: int = 5,
    seed: int = 0,
    rating_probability: float = 0.6,
) -> MovieLensExtract:
    """Extract with MovieLens-like structure, for runs without the data files.

    Every movie gets one or two of ``n_genres`` genres and each user rates
    each movie with probability ``rating_probability``, uniformly in 1..5.
    """
    if n_genres < 1:
        raise InvalidParameterError("n_genres must be >= 1", n_genres=n_genres)
    rng = np.random.default_rng([seed, 1])
    names = [f"genre{g}" for g in range(n_genres)]
    genres = [
        sorted(rng.choice(names, size=int(rng.integers(1, min(2, n_genres) + 1)), replace=False).tolist())
        for _ in range(n_movies)
    ]
    movies = pd.DataFrame(
        {"movie_id": np.arange(1, n_movies + 1), "title": [f"Movie {i}" for i in range(1, n_movies + 1)], "genres": genres}
    )
    rated = rng.random((n_users, n_movies)) < rating_probability
    values = rng.integers(1, MAX_RATING + 1, size=(n_users, n_movies))
    users, movie_index = np.nonzero(rated)
    ratings = pd.DataFrame(
        {"user_id": users + 1, "movie_id": movie_index + 1, "rating": values[users, movie_index]}
    )
    return _build_extract(movies, list(range(1, n_users + 1)), ratings, seed)
