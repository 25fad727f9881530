# Standard Library Imports
import sqlite3
import threading
from abc import ABC, abstractmethod
from pathlib import Path
from typing import List, Optional, Tuple

# Third-Party Imports
import pandas as pd  # For sampling rows into dataframes

# Local Application Imports
from sql_assistant.exception.custom_exception import DatasetError
from sql_assistant.logger import GLOBAL_LOGGER as log

SQLITE_HEADER = b"SQLite format 3\x00"


def _sample_frame(frame: pd.DataFrame, limit: int, seed: Optional[int]) -> pd.DataFrame:
    """
    Reduce a frame to at most ``limit`` rows.

    Without a seed the first rows are kept; with a seed a reproducible random
    subset is drawn and returned in original row order.
    """
    if len(frame) <= limit:
        return frame.reset_index(drop=True)
    if seed is None:
        return frame.head(limit).reset_index(drop=True)
    return frame.sample(n=limit, random_state=seed).sort_index().reset_index(drop=True)


class DatasetAdapter(ABC):
    """
    Read-only access to the tables of a dataset.

    Implementations return row samples as pandas DataFrames whose cells are
    strings or ``None`` (NULL), so profiling sees values the way they are stored.
    """

    name: str = "dataset"

    @abstractmethod
    def list_tables(self) -> List[str]:
        """Return the table names in a stable order."""

    @abstractmethod
    def table_columns(self, table: str) -> List[Tuple[str, Optional[str]]]:
        """Return ``(column, declared_type)`` pairs; the type is None when unknown."""

    @abstractmethod
    def row_count(self, table: str) -> int:
        """Return the number of rows in ``table``."""

    @abstractmethod
    def sample_rows(self, table: str, limit: int, seed: Optional[int] = None) -> pd.DataFrame:
        """Return up to ``limit`` rows of ``table``."""

    def close(self) -> None:
        """Release any underlying resources."""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()


class SQLiteDatasetAdapter(DatasetAdapter):
    """
    Dataset adapter over a single-file SQLite database.

    The connection is shared by profiling threads and serialized with a lock.
    """

    def __init__(self, path: str | Path):
        """
        Open the database file read-only.

        Args:
            path (str | Path): Location of the SQLite file.

        Raises:
            DatasetError: If the file cannot be opened as a database.
        """
        self.path = Path(path)
        self.name = str(self.path)
        self._lock = threading.Lock()
        if not self.path.is_file():
            raise DatasetError(f"SQLite file not found: {self.path}")
        try:
            self._conn = sqlite3.connect(f"file:{self.path.as_posix()}?mode=ro", uri=True, check_same_thread=False)
            self._conn.execute("SELECT name FROM sqlite_master LIMIT 1").fetchall()
        except sqlite3.Error as e:
            raise DatasetError(f"Cannot open SQLite database {self.path}: {e}", e) from e
        log.info("Opened SQLite dataset", path=str(self.path))

    @staticmethod
    def _quote(name: str) -> str:
        return '"' + name.replace('"', '""') + '"'

    def _query(self, sql: str, params: tuple = ()) -> list:
        with self._lock:
            try:
                return self._conn.execute(sql, params).fetchall()
            except sqlite3.Error as e:
                raise DatasetError(f"Query failed on {self.path}: {e}", e) from e

    def list_tables(self) -> List[str]:
        rows = self._query(
            "SELECT name FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite_%' ORDER BY rowid"
        )
        return [row[0] for row in rows]

    def table_columns(self, table: str) -> List[Tuple[str, Optional[str]]]:
        rows = self._query(f"PRAGMA table_info({self._quote(table)})")
        return [(row[1], row[2] or None) for row in rows]

    def row_count(self, table: str) -> int:
        return int(self._query(f"SELECT COUNT(*) FROM {self._quote(table)}")[0][0])

    def sample_rows(self, table: str, limit: int, seed: Optional[int] = None) -> pd.DataFrame:
        """
        Sample rows of ``table``.

        Args:
            table (str): Table to read.
            limit (int): Maximum number of rows.
            seed (Optional[int]): None keeps the first rows; an int draws a reproducible sample.

        Returns:
            pd.DataFrame: Cells as strings, NULL as None.

        Raises:
            DatasetError: If the table cannot be read.
        """
        # a table no larger than the limit is read in full
        query = f"SELECT * FROM {self._quote(table)}"
        if seed is None:
            query += f" LIMIT {int(limit)}"
        with self._lock:
            try:
                frame = pd.read_sql_query(query, self._conn, dtype=object)
            except Exception as e:
                raise DatasetError(f"Cannot read table {table} from {self.path}: {e}", e) from e
        frame = _sample_frame(frame, limit, seed)
        return frame.astype(object).where(frame.notna(), None).map(lambda v: v if v is None else str(v))

    def close(self) -> None:
        with self._lock:
            self._conn.close()


class CsvDirectoryAdapter(DatasetAdapter):
    """
    Dataset adapter over a directory of CSV files, one file per table.

    The first row holds the column names; an empty cell is NULL.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.name = str(self.directory)
        if not self.directory.is_dir():
            raise DatasetError(f"CSV directory not found: {self.directory}")
        self._files = {p.stem: p for p in sorted(self.directory.glob("*.csv"))}
        self._cache: dict[str, pd.DataFrame] = {}
        self._lock = threading.Lock()
        log.info("Opened CSV dataset", path=str(self.directory), tables=len(self._files))

    def _load(self, table: str) -> pd.DataFrame:
        with self._lock:
            if table not in self._cache:
                path = self._files.get(table)
                if path is None:
                    raise DatasetError(f"No CSV file for table {table} in {self.directory}")
                try:
                    frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
                except Exception as e:
                    raise DatasetError(f"Cannot read {path}: {e}", e) from e
                self._cache[table] = frame.where(frame != "", None)
            return self._cache[table]

    def list_tables(self) -> List[str]:
        return list(self._files)

    def table_columns(self, table: str) -> List[Tuple[str, Optional[str]]]:
        return [(str(column), None) for column in self._load(table).columns]

    def row_count(self, table: str) -> int:
        return len(self._load(table))

    def sample_rows(self, table: str, limit: int, seed: Optional[int] = None) -> pd.DataFrame:
        return _sample_frame(self._load(table), limit, seed)


def open_dataset(path: str | Path) -> DatasetAdapter:
    """
    Open a dataset, detecting its format from the path.

    Args:
        path (str | Path): A SQLite file or a directory of CSV files.

    Returns:
        DatasetAdapter: The matching adapter.

    Raises:
        DatasetError: If the path is neither.
    """
    path = Path(path)
    if path.is_dir():
        return CsvDirectoryAdapter(path)
    if path.is_file():
        with open(path, "rb") as f:
            header = f.read(len(SQLITE_HEADER))
        if header == SQLITE_HEADER:
            return SQLiteDatasetAdapter(path)
        raise DatasetError(f"Not a SQLite database: {path}")
    raise DatasetError(f"Dataset not found: {path}")
