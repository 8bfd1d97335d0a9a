"""
Terminal input for the fabric shell, with history and completion.
"""

from typing import List

from rich.console import Console

USING_PROMPT_TOOLKIT = False
USING_READLINE = False

try:
    from prompt_toolkit import prompt
    from prompt_toolkit.auto_suggest import AutoSuggestFromHistory
    from prompt_toolkit.completion import WordCompleter
    from prompt_toolkit.history import InMemoryHistory
    from prompt_toolkit.shortcuts import CompleteStyle

    USING_PROMPT_TOOLKIT = True
except ImportError:
    pass

if not USING_PROMPT_TOOLKIT:
    try:
        import readline

        USING_READLINE = True
    except ImportError:
        pass

console = Console()

SHELL_WORDS = [
    "AAP",
    "AP",
    *(f"B{i}" for i in range(16)),
    "C0",
    "C1",
    "inc",
    "dec",
    "ripple",
    "resolve",
    "add",
    "load",
    "read",
    "digits",
    "emit",
    "rows",
    "stats",
    "help",
    "clear",
    "history",
    "quit",
    "exit",
]

HISTORY_LIMIT = 100


class ShellPrompt:
    """
    Line input with completion over shell verbs and row addresses.

    Multi-line μProgram listings are entered by ending a line with a
    backslash; continuation lines are joined with newlines.
    """

    def __init__(self, words: List[str] = SHELL_WORDS):
        self.history: List[str] = []
        if USING_PROMPT_TOOLKIT:
            self.pt_history = InMemoryHistory()
            self.completer = WordCompleter(words, ignore_case=True)
        elif USING_READLINE:
            readline.parse_and_bind("tab: complete")

            def complete(text, state):
                matches = [w for w in words if w.lower().startswith(text.lower())]
                return matches[state] if state < len(matches) else None

            readline.set_completer(complete)

    def _read(self, text: str, first: bool) -> str:
        if USING_PROMPT_TOOLKIT and first:
            return prompt(
                text,
                history=self.pt_history,
                completer=self.completer,
                complete_style=CompleteStyle.READLINE_LIKE,
                auto_suggest=AutoSuggestFromHistory(),
                enable_history_search=True,
            )
        if USING_PROMPT_TOOLKIT:
            return prompt(text)
        console.print(text, end="")
        return console.input() if USING_READLINE else input()

    def get_input(self, prompt_text: str = "jc") -> str:
        try:
            lines = [self._read(f"{prompt_text}> ", True)]
            while lines[-1].rstrip().endswith("\\"):
                lines[-1] = lines[-1].rstrip()[:-1]
                lines.append(self._read("... ", False))
        except EOFError:
            raise KeyboardInterrupt() from None
        result = "\n".join(lines).strip()
        if result and result not in self.history:
            self.history.append(result)
            if len(self.history) > HISTORY_LIMIT:
                self.history.pop(0)
            if USING_READLINE:
                readline.add_history(result)
        return result


def get_input_method_info() -> str:
    if USING_PROMPT_TOOLKIT:
        return "Enhanced input with prompt_toolkit"
    if USING_READLINE:
        return "Using readline for history"
    return "Basic input (install prompt_toolkit for completion)"
