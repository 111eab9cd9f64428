"""Subprocess execution of candidate code with timeout and output capture.

Program failure is data, not an exception: only a misconfigured runner
(missing interpreter) raises.  Each run gets a fresh temp working
directory and a scrubbed environment; this is hygiene, not a security
sandbox.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass

ENV_ALLOWLIST = ("PATH", "HOME", "LANG", "LC_ALL", "TMPDIR", "PYTHONPATH")


class RunnerError(RuntimeError):
    """The runner itself is misconfigured (e.g. interpreter not found)."""


@dataclass
class RunnerConfig:
    interpreter: str = sys.executable
    timeout: float = 10.0
    output_cap: int = 65536  # bytes kept per stream


@dataclass
class ExecutionResult:
    status: int
    stdout: str
    stderr: str
    wall_time: float
    timed_out: bool = False


def _truncate(data: bytes | None, cap: int) -> str:
    if not data:
        return ""
    return data[:cap].decode("utf-8", errors="replace")


def execute_candidate(candidate, config: RunnerConfig | None = None) -> ExecutionResult:
    """Run the candidate's extracted code block in a subprocess."""
    config = config or RunnerConfig()
    if shutil.which(config.interpreter) is None:
        raise RunnerError(f"interpreter not found: {config.interpreter!r}")
    env = {k: os.environ[k] for k in ENV_ALLOWLIST if k in os.environ}
    with tempfile.TemporaryDirectory(prefix="optfolio-run-") as workdir:
        script = os.path.join(workdir, "candidate.py")
        with open(script, "w", encoding="utf-8") as fh:
            fh.write(candidate.code)
        start = time.monotonic()
        try:
            proc = subprocess.run(
                [config.interpreter, script],
                cwd=workdir,
                env=env,
                capture_output=True,
                timeout=config.timeout,
            )
            return ExecutionResult(
                status=proc.returncode,
                stdout=_truncate(proc.stdout, config.output_cap),
                stderr=_truncate(proc.stderr, config.output_cap),
                wall_time=time.monotonic() - start,
                timed_out=False,
            )
        except subprocess.TimeoutExpired as exc:
            return ExecutionResult(
                status=-1,
                stdout=_truncate(exc.stdout, config.output_cap),
                stderr=_truncate(exc.stderr, config.output_cap),
                wall_time=time.monotonic() - start,
                timed_out=True,
            )
