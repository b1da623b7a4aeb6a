import contextlib
import contextvars
import time
import uuid
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from logger import LOGGER


@dataclass
class RunState:
    # Run identifiers
    run_id: str = field(default_factory=lambda: str(uuid.uuid4()))
    config: Dict[str, Any] = field(default_factory=dict)

    # Stage timings in seconds, in the order the stages ran
    stages: Dict[str, float] = field(default_factory=dict)

    # Per-class selections: class id, kind, multiplicity, dofs, selected, infinite, tolerance
    selections: List[dict] = field(default_factory=list)

    # Conditions worth surfacing in the report
    warnings: List[str] = field(default_factory=list)

    # Metadata
    started_at: float = field(default_factory=time.time)


# ContextVar holds a RunState per thread/task
run_context: contextvars.ContextVar[Optional[RunState]] = contextvars.ContextVar("run_context", default=None)


class ContextManager:
    """Tracks the experiment run executing in the current context"""

    @staticmethod
    def _get_state() -> RunState:
        state = run_context.get()
        if state is None:
            raise RuntimeError("Run state not initialized")
        return state

    @staticmethod
    def _set_state(state: Optional[RunState]):
        run_context.set(state)

    @staticmethod
    def active() -> bool:
        return run_context.get() is not None

    @staticmethod
    def reset():
        """Close the current run without storing it"""
        state = run_context.get()
        if state is not None:
            LOGGER.debug(f"Run {state.run_id} closed")
        run_context.set(None)

    # --- Run lifecycle ---

    @staticmethod
    def start_run(config: Optional[Dict[str, Any]] = None, run_id: Optional[str] = None) -> str:
        state = RunState(config=dict(config or {}))
        if run_id:
            state.run_id = run_id
        ContextManager._set_state(state)
        LOGGER.info(f"Run {state.run_id} started")
        return state.run_id

    @staticmethod
    def elapsed() -> float:
        return time.time() - ContextManager._get_state().started_at

    # --- Stages ---

    @staticmethod
    @contextlib.contextmanager
    def record_stage(name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            seconds = time.perf_counter() - start
            state = run_context.get()
            if state is not None:
                state.stages[name] = state.stages.get(name, 0.0) + seconds
            LOGGER.info(f"{name} done in {seconds:.2f}s")

    # --- Selections and warnings ---

    @staticmethod
    def record_selection(record: dict):
        state = run_context.get()
        if state is not None:
            state.selections.append(dict(record))

    @staticmethod
    def add_warning(message: str):
        state = run_context.get()
        if state is not None and message not in state.warnings:
            state.warnings.append(message)

    # --- Finalization ---

    @staticmethod
    def finalize_run(report, db_manager=None) -> Optional[int]:
        """Attach stage timings and warnings to the report and persist it when a database is configured"""
        state = ContextManager._get_state()
        report.run_id = state.run_id
        report.stages = dict(state.stages)
        report.warnings = list(dict.fromkeys(list(report.warnings) + state.warnings))
        if not report.class_selections:
            report.class_selections = list(state.selections)

        if db_manager is None:
            from database.models import get_db_manager

            db_manager = get_db_manager()

        record_id = None
        if db_manager is not None:
            record_id = db_manager.create_run(report)
            LOGGER.info(f"Run {state.run_id} stored as record {record_id}")

        ContextManager._set_state(None)
        return record_id
