"""
Terminal UI: rich tables and the interactive shell's prompt.

Main Classes:
    ShellPrompt: Line input with history and completion
"""

from .display import (
    show_commands,
    show_counters,
    show_history,
    show_listing,
    show_rows,
    show_trace,
    show_welcome,
)
from .prompt import USING_PROMPT_TOOLKIT, USING_READLINE, ShellPrompt, console, get_input_method_info

__all__ = [
    # Primary classes
    "ShellPrompt",
    "console",
    # Display
    "show_rows",
    "show_listing",
    "show_counters",
    "show_trace",
    "show_welcome",
    "show_commands",
    "show_history",
    # Input capabilities
    "get_input_method_info",
    "USING_PROMPT_TOOLKIT",
    "USING_READLINE",
]
