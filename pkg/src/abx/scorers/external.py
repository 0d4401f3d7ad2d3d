"""Out-of-process scorer speaking line-delimited JSON over stdin/stdout.

The child process is started once and scored in batches.  One request per
line: ``{"id": <int>, "s": ..., "v": ..., "o": ...}``; a blank line marks
end-of-batch.  The child answers each request with one line
``{"id": <int>, "logit": <float>}``, in any order, flushing as it goes.

A batch is all-or-nothing: any timeout, malformed response, or child death
raises (and poisons the adapter -- the child is terminated) rather than
returning partial scores.  The batch timeout comes from the
``ABX_EXTERNAL_TIMEOUT_MS`` environment variable (default 60000) unless
given explicitly.
"""

from __future__ import annotations

import json
import math
import os
import queue
import shlex
import subprocess
import threading
import time
from typing import Optional, Sequence, Union

from ..abstraction import Event

TIMEOUT_ENV_VAR = "ABX_EXTERNAL_TIMEOUT_MS"
DEFAULT_TIMEOUT_MS = 60_000


class ExternalScorerError(RuntimeError):
    """Base class for failures of the external scoring child."""


class ProtocolViolation(ExternalScorerError):
    """The child sent something the wire protocol does not allow."""

    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"child output line {lineno}: {reason}: {line!r}")
        self.lineno = lineno
        self.line = line


class ChildExited(ExternalScorerError):
    """The child process exited while responses were still owed."""

    def __init__(self, returncode: Optional[int], outstanding: int):
        super().__init__(
            f"scorer process exited (returncode={returncode}) "
            f"with {outstanding} response(s) outstanding"
        )
        self.returncode = returncode


class BatchTimeout(ExternalScorerError):
    def __init__(self, timeout_ms: int, outstanding: int):
        super().__init__(
            f"no response within {timeout_ms} ms ({outstanding} outstanding)"
        )
        self.timeout_ms = timeout_ms


def batch_timeout_ms(override: Optional[int] = None) -> int:
    if override is not None:
        value = override
    else:
        raw = os.environ.get(TIMEOUT_ENV_VAR)
        if raw is None:
            return DEFAULT_TIMEOUT_MS
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(
                f"{TIMEOUT_ENV_VAR} must be an integer, got {raw!r}"
            ) from None
    if value <= 0:
        raise ValueError(f"batch timeout must be positive, got {value}")
    return value


def encode_request(request_id: int, event: Event) -> str:
    return json.dumps(
        {"id": request_id, "s": event.subject, "v": event.verb, "o": event.object},
        ensure_ascii=False,
    )


def decode_response(line: str, lineno: int) -> tuple[int, float]:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolViolation(lineno, line, f"invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise ProtocolViolation(lineno, line, "response is not a JSON object")
    if "error" in obj:
        raise ProtocolViolation(lineno, line, f"child reported error: {obj['error']}")
    rid = obj.get("id")
    logit = obj.get("logit")
    if not isinstance(rid, int) or isinstance(rid, bool):
        raise ProtocolViolation(lineno, line, "missing or non-integer 'id'")
    if isinstance(logit, bool) or not isinstance(logit, (int, float)):
        raise ProtocolViolation(lineno, line, "missing or non-numeric 'logit'")
    if not math.isfinite(logit):
        raise ProtocolViolation(lineno, line, f"non-finite logit {logit!r}")
    return rid, float(logit)


_EOF = object()


def _late_returncode(proc: subprocess.Popen, timeout: float = 1.0) -> Optional[int]:
    """Exit code of a child that just closed its pipes.

    The stdout EOF can arrive a moment before the process is reapable, so a
    bare poll() would often report None; a short wait gets the real code.
    """
    try:
        return proc.wait(timeout=timeout)
    except subprocess.TimeoutExpired:
        return proc.poll()


class ExternalScorer:
    """Scorer adapter around a child process; see module docstring.

    Usable as a context manager.  ``logit``/``logit_batch`` are serialized
    with a lock, so concurrent callers won't interleave batches -- but the
    child itself is a single stream, hence ``concurrent_safe = False``.
    """

    deterministic = False
    concurrent_safe = False

    def __init__(
        self,
        command: Union[str, Sequence[str]],
        timeout_ms: Optional[int] = None,
    ):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.command:
            raise ValueError("external scorer command is empty")
        self.timeout_ms = batch_timeout_ms(timeout_ms)
        self.name = "external:" + " ".join(self.command)
        self._proc: Optional[subprocess.Popen] = None
        self._lines: queue.Queue = queue.Queue()
        self._reader: Optional[threading.Thread] = None
        self._next_id = 0
        self._lineno = 0
        self._lock = threading.Lock()

    # -- lifecycle ----------------------------------------------------

    def _ensure_started(self) -> None:
        if self._proc is not None:
            return
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=None,  # child diagnostics pass through
                text=True,
                encoding="utf-8",
                bufsize=1,  # line buffered
            )
        except OSError as exc:
            raise ExternalScorerError(
                f"could not start scorer process {self.command!r}: {exc}"
            ) from exc
        self._lines = queue.Queue()
        self._reader = threading.Thread(
            target=self._drain_stdout, args=(self._proc, self._lines), daemon=True
        )
        self._reader.start()

    @staticmethod
    def _drain_stdout(proc: subprocess.Popen, out: queue.Queue) -> None:
        assert proc.stdout is not None
        for line in proc.stdout:
            out.put(line)
        out.put(_EOF)

    def close(self) -> None:
        proc, self._proc = self._proc, None
        if proc is None:
            return
        try:
            if proc.stdin is not None:
                proc.stdin.close()
            proc.terminate()
            proc.wait(timeout=5)
        except (OSError, subprocess.TimeoutExpired):
            proc.kill()
            proc.wait()

    def __enter__(self) -> "ExternalScorer":
        self._ensure_started()
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    # -- scoring ------------------------------------------------------

    def logit(self, event: Event) -> float:
        return self.logit_batch([event])[0]

    def logit_batch(self, events: Sequence[Event]) -> list[float]:
        if not events:
            return []
        with self._lock:
            self._ensure_started()
            try:
                return self._run_batch(events)
            except ExternalScorerError:
                self.close()  # poison: next batch gets a fresh child
                raise

    def _run_batch(self, events: Sequence[Event]) -> list[float]:
        assert self._proc is not None and self._proc.stdin is not None
        ids = range(self._next_id, self._next_id + len(events))
        self._next_id += len(events)
        payload = "".join(
            encode_request(rid, event) + "\n" for rid, event in zip(ids, events)
        )
        try:
            self._proc.stdin.write(payload + "\n")  # trailing blank line ends the batch
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError):
            raise ChildExited(_late_returncode(self._proc), len(events)) from None

        by_id: dict[int, float] = {}
        wanted = set(ids)
        deadline = time.monotonic() + self.timeout_ms / 1000.0
        while wanted:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise BatchTimeout(self.timeout_ms, len(wanted))
            try:
                item = self._lines.get(timeout=remaining)
            except queue.Empty:
                raise BatchTimeout(self.timeout_ms, len(wanted)) from None
            if item is _EOF:
                raise ChildExited(_late_returncode(self._proc), len(wanted))
            self._lineno += 1
            line = item.rstrip("\n")
            if not line.strip():
                continue  # stray blank line between responses is tolerated
            rid, logit = decode_response(line, self._lineno)
            if rid not in wanted:
                reason = "duplicate response id" if rid in by_id else "unexpected response id"
                raise ProtocolViolation(self._lineno, line, reason)
            wanted.discard(rid)
            by_id[rid] = logit
        return [by_id[rid] for rid in ids]
