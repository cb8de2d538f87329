"""
Colored status output for SigShape.
Everything goes to stderr so stdout only ever carries data.
"""

import os
import sys

# Global variable to track color support
COLOR_ENABLED = False


def _init_colors():
    """Initialize colorama, falling back to plain text."""
    try:
        from colorama import just_fix_windows_console, Fore, Style
        just_fix_windows_console()
        return Fore, Style, True
    except ImportError:
        class DummyColors:
            RED = GREEN = YELLOW = CYAN = WHITE = MAGENTA = BLUE = ""

        class DummyStyle:
            BRIGHT = DIM = RESET_ALL = ""

        return DummyColors(), DummyStyle(), False


Fore, Style, _AVAILABLE = _init_colors()


def set_color(enabled: bool = None):
    """Turn color on or off; by default on only when stderr is a terminal."""
    global COLOR_ENABLED
    if enabled is None:
        enabled = sys.stderr.isatty() and 'NO_COLOR' not in os.environ
    COLOR_ENABLED = bool(enabled) and _AVAILABLE


set_color()


def _colorize(text: str, color_code: str) -> str:
    """Apply color to text if colors are enabled."""
    if COLOR_ENABLED:
        return f"{color_code}{text}{Style.RESET_ALL}"
    return text


def _emit(text: str):
    print(text, file=sys.stderr)


def _print_colored(symbol: str, message: str, color_code: str):
    """Print colored message with symbol."""
    colored_symbol = _colorize(symbol, color_code + Style.BRIGHT)
    _emit(f"{colored_symbol} {message}")


def get_color(color_name: str) -> str:
    """Returns the ANSI code for a given color name."""
    if not COLOR_ENABLED:
        return ""

    color_map = {
        'red': Fore.RED,
        'green': Fore.GREEN,
        'yellow': Fore.YELLOW,
        'cyan': Fore.CYAN,
        'magenta': Fore.MAGENTA,
        'reset': Style.RESET_ALL,
        'dim': Style.DIM
    }
    return color_map.get(color_name.lower(), "")


def print_progress(message: str):
    _emit(_colorize(f"→ {message}", Style.DIM))


# Shortcuts for common patterns
def success(msg: str):
    _print_colored("✓", msg, Fore.GREEN)


def error(msg: str):
    _print_colored("✗", msg, Fore.RED)


def warning(msg: str):
    _print_colored("⚠", msg, Fore.YELLOW)


def info(msg: str):
    _print_colored("ℹ", msg, Fore.CYAN)
