"""Log module implementing segmented execution traces.

The Log class filters trace messages by segment name and by the nesting
level of the segments. Checks open a segment ("axioms", "reduction",
"haar", "verify", ...) and emit lazily formatted messages inside it.
The class uses a Singleton pattern.
"""

import sys
import threading
from typing import Callable, ClassVar, Optional, TextIO


class ANSIColor:
    """ANSI color codes for terminal output."""

    GREEN: ClassVar[str] = "\033[32m"
    RED: ClassVar[str] = "\033[31m"
    YELLOW: ClassVar[str] = "\033[33m"
    RESET: ClassVar[str] = "\033[0m"

    @classmethod
    def green(cls, text: str) -> str:
        return f"{cls.GREEN}{text}{cls.RESET}"

    @classmethod
    def red(cls, text: str) -> str:
        return f"{cls.RED}{text}{cls.RESET}"

    @classmethod
    def yellow(cls, text: str) -> str:
        return f"{cls.YELLOW}{text}{cls.RESET}"

    @classmethod
    def status(cls, status: str) -> str:
        """Color a check status word: PASS green, FAIL red, anything else yellow."""
        if status == "PASS":
            return cls.green(status)
        if status == "FAIL":
            return cls.red(status)
        return cls.yellow(status)


class Log:
    """Singleton class for segmented execution trace logging.

    Nothing is printed while the level is 0 (the default). Each thread keeps
    its own segment stack.
    """

    _instance: ClassVar[Optional["Log"]] = None
    _lock: ClassVar[threading.Lock] = threading.Lock()

    _level: ClassVar[int] = 0
    _local: ClassVar[threading.local] = threading.local()
    _segments: ClassVar[list[str]] = []
    _stream: ClassVar[Optional[TextIO]] = None

    def __new__(cls) -> "Log":
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
        return cls._instance

    @classmethod
    def get_level(cls) -> int:
        return cls._level

    @classmethod
    def stack(cls) -> list[str]:
        """The open segments of the calling thread, outermost first."""
        stack: Optional[list[str]] = getattr(cls._local, "stack", None)
        if stack is None:
            stack = cls._local.stack = []
        return stack

    @classmethod
    def set_level(cls, level: int) -> None:
        """Set the maximum nesting level that should be shown."""
        cls._level = max(0, level)

    @classmethod
    def set_segments(cls, segments: list[str]) -> None:
        """Only show messages from these segments (and the segments nested in them)."""
        cls._segments = list(segments)

    @classmethod
    def set_stream(cls, stream: Optional[TextIO]) -> None:
        """Redirect trace output; None means sys.stderr."""
        cls._stream = stream

    @classmethod
    def reset(cls) -> None:
        with cls._lock:
            cls._level = 0
            cls._local = threading.local()
            cls._segments = []
            cls._stream = None

    @classmethod
    def enter(cls, segment: str, message: str) -> None:
        """Open a new segment."""
        if cls._level == 0:
            return
        cls.stack().append(segment)
        cls.msg(lambda: f">> [{segment}] {message}")

    @classmethod
    def exit(cls, segment: str, message: Optional[str] = None) -> None:
        """Close a segment and every segment opened inside it."""
        if cls._level == 0:
            return
        if message:
            cls.msg(lambda: f"<< [{segment}] {message}")
        stack = cls.stack()
        if segment in stack:
            while stack:
                if stack.pop() == segment:
                    break

    @classmethod
    def msg(cls, message_func: Callable[[], str]) -> None:
        """Show a message within the active segment; the callable runs only if shown."""
        if cls._level == 0:
            return

        stack = cls.stack()
        offset = 0
        if cls._segments:
            for position, segment in enumerate(stack):
                if segment in cls._segments:
                    offset = position
                    break
            else:
                return

        depth = len(stack) - offset
        if depth < cls._level:
            print(" " * depth + message_func(), file=cls._stream or sys.stderr)


def get_logger() -> Log:
    """Return the Log singleton instance."""
    return Log()
