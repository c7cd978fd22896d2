"""Store handle: engine/session management and schema version stamping."""
import enum
import logging
import threading
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Union

from sqlalchemy import create_engine, inspect
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import Session, sessionmaker
from sqlalchemy.pool import StaticPool

from src.core.errors import ReadOnlyStore, SchemaVersionMismatch, StorageFailure
from .models import SCHEMA_VERSION, Base, SchemaInfo


logger = logging.getLogger(__name__)

MEMORY = ":memory:"


class StoreMode(str, enum.Enum):
    READ_ONLY = "read_only"
    READ_WRITE = "read_write"


class StoreHandle:
    """
    A single-file ledger database.

    Concurrent reads are fine; writes go through `writing()`, which holds the
    handle's lock, so one handle serializes its writers. No cross-process
    locking is attempted.
    """

    def __init__(self, location: Union[str, Path], mode: StoreMode = StoreMode.READ_WRITE):
        self.location = str(location)
        self.mode = StoreMode(mode)
        self._lock = threading.Lock()
        self.engine = self._create_engine()
        self.SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=self.engine)
        self._check_schema()

    def _create_engine(self):
        if self.location == MEMORY:
            # StaticPool shares the one in-memory database across threads
            return create_engine(
                "sqlite://",
                connect_args={"check_same_thread": False},
                poolclass=StaticPool,
            )
        path = Path(self.location).resolve()
        if self.mode == StoreMode.READ_ONLY:
            if not path.exists():
                raise StorageFailure(f"store not found: {self.location}")
            url = f"sqlite:///file:{path}?mode=ro&uri=true"
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            url = f"sqlite:///{path}"
        return create_engine(url, connect_args={"check_same_thread": False})

    def _check_schema(self) -> None:
        try:
            tables = set(inspect(self.engine).get_table_names())
            if self.mode == StoreMode.READ_WRITE and not tables:
                Base.metadata.create_all(bind=self.engine)
                with self.session() as db:
                    db.add(SchemaInfo(key="schema_version", value=SCHEMA_VERSION))
                    db.commit()
                logger.info(f"Initialized store {self.location} (schema {SCHEMA_VERSION})")
                return
            if SchemaInfo.__tablename__ not in tables:
                raise SchemaVersionMismatch(f"{self.location} is not a ledger store")
            with self.session() as db:
                stamp = db.get(SchemaInfo, "schema_version")
            if stamp is None or stamp.value != SCHEMA_VERSION:
                found = stamp.value if stamp else "none"
                raise SchemaVersionMismatch(
                    f"{self.location}: schema version {found}, expected {SCHEMA_VERSION}"
                )
        except SQLAlchemyError as e:
            raise StorageFailure(f"cannot open store {self.location}: {e}") from e

    @contextmanager
    def session(self) -> Iterator[Session]:
        """Get a database session."""
        db = self.SessionLocal()
        try:
            yield db
        finally:
            db.close()

    @contextmanager
    def writing(self) -> Iterator[Session]:
        """Session for writes, serialized by the handle's lock."""
        if self.mode != StoreMode.READ_WRITE:
            raise ReadOnlyStore(f"store {self.location} is open read-only")
        with self._lock:
            with self.session() as db:
                try:
                    yield db
                except SQLAlchemyError as e:
                    db.rollback()
                    raise StorageFailure(f"write to {self.location} failed: {e}") from e

    def close(self) -> None:
        self.engine.dispose()

    def __enter__(self) -> "StoreHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def open_store(location: Union[str, Path], mode: StoreMode = StoreMode.READ_WRITE) -> StoreHandle:
    """Open (and for read_write, create if needed) the store at `location`."""
    return StoreHandle(location, mode)
