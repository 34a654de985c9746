"""Observation fetch client: the interface, plus a local-directory backend.

Live scraping of remote repositories is out of scope; the pipeline consumes
local manifests. The interface exists so a real API client can slot in:
request = (species, qualities, page), response = a page of SampleRecords.
"""

from __future__ import annotations

from pathlib import Path
from typing import Protocol

from ..errors import PreconditionError
from .manifest import DEFAULT_QUALITIES, SampleRecord, read_manifest_file

DEFAULT_PAGE_SIZE = 50


class ObservationFetcher(Protocol):
    def fetch(self, species: str, qualities=DEFAULT_QUALITIES, page: int = 0
              ) -> list[SampleRecord]:
        """One page of records for a species, filtered by quality grade."""
        ...


class LocalDirectoryFetcher:
    """Serves pages out of manifest files under a local directory.

    Reads `<root>/<species>.jsonl` when present, falling back to filtering a
    shared `<root>/manifest.jsonl`. Page order is the file order, so paging
    is deterministic.
    """

    def __init__(self, root, page_size: int = DEFAULT_PAGE_SIZE):
        self.root = Path(root)
        if not self.root.is_dir():
            raise PreconditionError(f"{root} is not a directory")
        if page_size < 1:
            raise PreconditionError("page_size must be at least 1")
        self.page_size = page_size

    def _records_for(self, species: str) -> list[SampleRecord]:
        per_species = self.root / f"{species}.jsonl"
        if per_species.exists():
            return read_manifest_file(per_species)
        shared = self.root / "manifest.jsonl"
        if shared.exists():
            return [r for r in read_manifest_file(shared) if r.species == species]
        return []

    def fetch(self, species: str, qualities=DEFAULT_QUALITIES, page: int = 0
              ) -> list[SampleRecord]:
        if page < 0:
            raise PreconditionError("page must be >= 0")
        matching = [r for r in self._records_for(species) if r.quality in qualities]
        start = page * self.page_size
        return matching[start:start + self.page_size]
