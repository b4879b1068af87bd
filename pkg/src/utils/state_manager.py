"""Checkpoint state for resumable experiment sweeps."""

import json
import time
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Set, Tuple

from pydantic import BaseModel, Field

from src.models.experiment import TrialRow
from src.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_SAVE_EVERY = 20


class SweepState(BaseModel):
    """Model for sweep checkpoint data."""

    session_id: str = Field(..., description="Unique session identifier")
    spec_hash: str = Field(..., description="Hash of the ExperimentSpec this state belongs to")
    total_trials: int = Field(..., ge=0, description="Trials in the whole grid")
    completed: List[TrialRow] = Field(default_factory=list, description="Finished trial rows")
    session_start_time: str = Field(..., description="Session start time (ISO format)")
    last_update_time: str = Field(..., description="Last update time (ISO format)")


class StateManager:
    """Persists completed trial rows so an interrupted sweep can resume."""

    def __init__(self, state_file_path: str, save_every: int = DEFAULT_SAVE_EVERY):
        """Initialize state manager.

        Args:
            state_file_path: Path to state file
            save_every: Recorded trials between automatic checkpoint writes
        """
        self.state_file_path = Path(state_file_path)
        self.save_every = max(1, save_every)
        self.current_state: Optional[SweepState] = None
        self._keys: Set[Tuple[int, int]] = set()
        self._unsaved = 0
        self.session_id = self._generate_session_id()

        logger.info(f"StateManager initialized with state file: {self.state_file_path}")

    def _generate_session_id(self) -> str:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        return f"session_{timestamp}_{hash(time.time()) % 10000:04d}"

    def initialize_state(self, spec_hash: str, total_trials: int) -> SweepState:
        """Start a fresh checkpoint for a sweep.

        Args:
            spec_hash: ExperimentSpec.spec_hash() of the sweep
            total_trials: Number of (cell, trial) pairs in the grid

        Returns:
            Initialized SweepState
        """
        now = datetime.now().isoformat()
        self.current_state = SweepState(
            session_id=self.session_id,
            spec_hash=spec_hash,
            total_trials=total_trials,
            session_start_time=now,
            last_update_time=now,
        )
        self._keys = set()
        self._unsaved = 0
        logger.info(f"Initialized new sweep state for {total_trials} trials")
        return self.current_state

    def load_state(self) -> SweepState:
        """Load checkpoint from file.

        Raises:
            FileNotFoundError: If state file doesn't exist
            ValueError: If state file is corrupted
        """
        if not self.state_file_path.exists():
            raise FileNotFoundError(f"State file not found: {self.state_file_path}")
        try:
            with open(self.state_file_path, "r", encoding="utf-8") as f:
                state_data = json.load(f)
            self.current_state = SweepState.model_validate(state_data)
        except (json.JSONDecodeError, ValueError) as e:
            error_msg = f"State file is corrupted: {e}"
            logger.error(error_msg)
            raise ValueError(error_msg) from e

        self._keys = {(row.cell, row.trial) for row in self.current_state.completed}
        self._unsaved = 0
        logger.info(
            "Loaded sweep state",
            session_id=self.current_state.session_id,
            completed=len(self.current_state.completed),
            total=self.current_state.total_trials,
        )
        return self.current_state

    def save_state(self) -> bool:
        """Write the checkpoint atomically (temp file, then rename).

        Returns:
            True if saved successfully, False otherwise
        """
        if not self.current_state:
            logger.warning("No current state to save")
            return False
        try:
            self.current_state.last_update_time = datetime.now().isoformat()
            self.state_file_path.parent.mkdir(parents=True, exist_ok=True)

            temp_file = self.state_file_path.with_suffix(".tmp")
            with open(temp_file, "w", encoding="utf-8") as f:
                json.dump(self.current_state.model_dump(mode="json"), f, indent=2)
            temp_file.replace(self.state_file_path)
            self._unsaved = 0

            logger.debug(f"State saved successfully to {self.state_file_path}")
            return True
        except OSError as e:
            logger.error(f"Failed to save state: {e}")
            return False

    def record_trial(self, row: TrialRow) -> bool:
        """Add a finished row; the checkpoint is rewritten every save_every new rows.

        Returns:
            False if there is no state or the (cell, trial) pair is already recorded
        """
        if not self.current_state:
            logger.warning("No current state to update")
            return False
        key = (row.cell, row.trial)
        if key in self._keys:
            return False
        self._keys.add(key)
        self.current_state.completed.append(row)
        self._unsaved += 1
        if self._unsaved >= self.save_every:
            self.save_state()
        return True

    def flush(self) -> bool:
        """Write rows recorded since the last save, if any."""
        if not self._unsaved:
            return True
        return self.save_state()

    def completed_keys(self) -> Set[Tuple[int, int]]:
        return set(self._keys)

    def completed_rows(self) -> Dict[Tuple[int, int], TrialRow]:
        if not self.current_state:
            return {}
        return {(row.cell, row.trial): row for row in self.current_state.completed}

    def validate_configuration(self, spec_hash: str) -> bool:
        """True if the loaded checkpoint belongs to the given spec."""
        if not self.current_state:
            return True
        if self.current_state.spec_hash != spec_hash:
            logger.warning("Experiment spec has changed since the checkpoint was written")
            return False
        return True

    def can_resume(self, spec_hash: str) -> bool:
        """Whether a checkpoint for this spec exists and still has trials left."""
        if not self.state_file_path.exists():
            logger.debug("No state file found for resumption")
            return False
        try:
            self.load_state()
        except ValueError as e:
            logger.warning(f"Cannot resume sweep: {e}")
            return False
        if not self.validate_configuration(spec_hash):
            return False
        remaining = self.current_state.total_trials - len(self.current_state.completed)
        if remaining <= 0:
            logger.info("All trials already completed, no resumption needed")
        else:
            logger.info(f"Can resume sweep: {remaining} trials remaining")
        return True

    def get_completion_percentage(self) -> float:
        if not self.current_state or self.current_state.total_trials == 0:
            return 0.0
        return len(self.current_state.completed) / self.current_state.total_trials * 100

    def get_processing_summary(self) -> Dict[str, Any]:
        if not self.current_state:
            return {}
        completed = len(self.current_state.completed)
        return {
            "session_id": self.current_state.session_id,
            "spec_hash": self.current_state.spec_hash,
            "total_trials": self.current_state.total_trials,
            "completed_trials": completed,
            "remaining_trials": self.current_state.total_trials - completed,
            "completion_percentage": self.get_completion_percentage(),
            "session_start_time": self.current_state.session_start_time,
            "last_update_time": self.current_state.last_update_time,
        }

    def cleanup_state(self) -> bool:
        """Move the checkpoint aside after a completed sweep.

        Returns:
            True if cleanup successful, False otherwise
        """
        try:
            if self.state_file_path.exists():
                backup_path = self.state_file_path.with_suffix(".completed")
                self.state_file_path.replace(backup_path)
                logger.info(f"State file backed up to {backup_path} and cleaned up")
            return True
        except OSError as e:
            logger.error(f"Failed to cleanup state file: {e}")
            return False
