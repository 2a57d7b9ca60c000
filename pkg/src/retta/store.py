"""Project persistence.

One directory per project holding versioned JSON files: ``project.json``
(workflow state), ``result.json`` (analysis output, byte-stable for a
given seed), and ``timings.json`` (wall-clock per stage, kept apart so
result files from identical runs compare byte-identical).  A memory store
with the same surface backs tests and throwaway runs.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .errors import IntegrityError, NotFoundError

STORE_ENV_VAR = "RETTA_STORE"
PROJECT_FILE_VERSION = 1
RESULT_FILE_VERSION = 1


def stable_json(payload: dict) -> str:
    """Deterministic serialization: sorted keys, fixed separators."""
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n"


class FileProjectStore:
    """Directory-per-project store rooted at ``root``."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _dir(self, project_id: str) -> Path:
        return self.root / project_id

    def _write(self, path: Path, text: str):
        # write-and-rename so a crash never leaves a half-written record
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _read(self, path: Path, expected_version: int) -> dict:
        if not path.exists():
            raise NotFoundError(f"no such record: {path}")
        try:
            payload = json.loads(path.read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise IntegrityError(f"{path}: corrupt record: {exc.msg}")
        if not isinstance(payload, dict) or payload.get("version") != expected_version:
            raise IntegrityError(f"{path}: unsupported record version")
        return payload

    def save_project(self, project_id: str, record: dict):
        self._dir(project_id).mkdir(parents=True, exist_ok=True)
        self._write(
            self._dir(project_id) / "project.json",
            stable_json({"version": PROJECT_FILE_VERSION, "project": record}),
        )

    def load_project(self, project_id: str) -> dict:
        path = self._dir(project_id) / "project.json"
        if not path.exists():
            raise NotFoundError(f"unknown project {project_id!r}")
        return self._read(path, PROJECT_FILE_VERSION)["project"]

    def save_result(self, project_id: str, result_record: dict, timings: dict):
        directory = self._dir(project_id)
        directory.mkdir(parents=True, exist_ok=True)
        self._write(
            directory / "result.json",
            stable_json({"version": RESULT_FILE_VERSION, "result": result_record}),
        )
        self._write(directory / "timings.json", stable_json({"timings": timings}))

    def load_result(self, project_id: str) -> dict:
        path = self._dir(project_id) / "result.json"
        if not path.exists():
            raise NotFoundError(f"project {project_id!r} has no result")
        return self._read(path, RESULT_FILE_VERSION)["result"]

    def load_timings(self, project_id: str) -> dict:
        path = self._dir(project_id) / "timings.json"
        if not path.exists():
            return {}
        return json.loads(path.read_text("utf-8")).get("timings", {})

    def result_path(self, project_id: str) -> Path:
        return self._dir(project_id) / "result.json"

    def artifact_path(self, project_id: str, name: str) -> Path:
        """Path for an extra per-project artifact (e.g. the model dump)."""
        directory = self._dir(project_id)
        directory.mkdir(parents=True, exist_ok=True)
        return directory / name

    def list_ids(self) -> list[str]:
        return sorted(
            p.name for p in self.root.iterdir() if (p / "project.json").exists()
        )


class MemoryProjectStore:
    """Same surface as the file store, held in dictionaries."""

    def __init__(self):
        self.projects: dict[str, str] = {}
        self.results: dict[str, str] = {}
        self.timings: dict[str, dict] = {}

    def save_project(self, project_id: str, record: dict):
        self.projects[project_id] = stable_json(
            {"version": PROJECT_FILE_VERSION, "project": record}
        )

    def load_project(self, project_id: str) -> dict:
        if project_id not in self.projects:
            raise NotFoundError(f"unknown project {project_id!r}")
        return json.loads(self.projects[project_id])["project"]

    def save_result(self, project_id: str, result_record: dict, timings: dict):
        self.results[project_id] = stable_json(
            {"version": RESULT_FILE_VERSION, "result": result_record}
        )
        self.timings[project_id] = dict(timings)

    def load_result(self, project_id: str) -> dict:
        if project_id not in self.results:
            raise NotFoundError(f"project {project_id!r} has no result")
        return json.loads(self.results[project_id])["result"]

    def load_timings(self, project_id: str) -> dict:
        return self.timings.get(project_id, {})

    def list_ids(self) -> list[str]:
        return sorted(self.projects)
