import shutil
import sys
from typing import Iterable

from sigshape.utils.colors import get_color

MAX_WIDTH = 78


def get_terminal_width():
    """Gets the box width, capped so reports stay readable in wide terminals."""
    return min(shutil.get_terminal_size((80, 20)).columns, MAX_WIDTH)


def _out(text: str):
    print(text, file=sys.stderr)


def print_header(title: str):
    """Prints the top of a report box."""
    width = get_terminal_width()
    box_color = get_color('cyan')
    reset_color = get_color('reset')

    title_text = f" {title} "
    _out(box_color + '┌' + '─' * (width - 2) + '┐' + reset_color)
    _out(box_color + '│' + reset_color + title_text.center(width - 2) + box_color + '│' + reset_color)
    _out(box_color + '├' + '─' * (width - 2) + '┤' + reset_color)


def print_content_line(line: str):
    """Prints one line inside the box, truncated to fit."""
    width = get_terminal_width()
    box_color = get_color('cyan')
    reset_color = get_color('reset')

    cleaned_line = line.rstrip()[:width - 4]
    formatted_line = f" {cleaned_line.ljust(width - 4)} "
    _out(box_color + '│' + reset_color + formatted_line + box_color + '│' + reset_color)


def print_footer():
    width = get_terminal_width()
    _out(get_color('cyan') + '└' + '─' * (width - 2) + '┘' + get_color('reset'))


def print_boxed_output(title: str, output_lines: Iterable[str]):
    """Prints a list of lines inside a styled box."""
    print_header(title)
    for line in output_lines:
        print_content_line(line)
    print_footer()
