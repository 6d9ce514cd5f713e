"""
Console Output Module
=====================

Emoji-prefixed, colorized status lines and progress bars.

Library code reports through ``console`` instead of printing directly, so the
CLI can silence everything (tests, worker processes) with ``set_verbose(False)``.
"""

from typing import Iterable, Optional, TypeVar

from colorama import Fore, Style, init as colorama_init
from tqdm import tqdm

T = TypeVar('T')

colorama_init(autoreset=True)

_VERBOSE = False


def set_verbose(enabled: bool) -> None:
    """Turn console output on or off for the whole process."""
    global _VERBOSE
    _VERBOSE = bool(enabled)


def is_verbose() -> bool:
    return _VERBOSE


class Console:
    """Thin wrapper around print with the status vocabulary used by the CLI."""

    def _emit(self, icon: str, color: str, message: str) -> None:
        if _VERBOSE:
            print(f"{color}{icon} {message}{Style.RESET_ALL}")

    def step(self, message: str) -> None:
        self._emit("🔧", Fore.CYAN, message)

    def info(self, message: str) -> None:
        self._emit("📊", "", message)

    def success(self, message: str) -> None:
        self._emit("✅", Fore.GREEN, message)

    def warning(self, message: str) -> None:
        self._emit("⚠️ ", Fore.YELLOW, message)

    def error(self, message: str) -> None:
        # errors are always shown
        print(f"{Fore.RED}❌ {message}{Style.RESET_ALL}")

    def rule(self, width: int = 60) -> None:
        if _VERBOSE:
            print("=" * width)


console = Console()


def progress(items: Iterable[T], desc: str, total: Optional[int] = None) -> Iterable[T]:
    """Wrap an iterable in a tqdm bar when verbose."""
    return tqdm(items, desc=desc, total=total, disable=not _VERBOSE, leave=False)
