from dataclasses import dataclass
from typing import Callable, Optional

COMMAND_REGISTRY: dict[str, "Command"] = {}


@dataclass(frozen=True)
class Command:
    name: str
    handler: Callable
    help: str = ""
    configure: Optional[Callable] = None


def register_command(name: str, help: str = "", configure: Optional[Callable] = None):
    """
    Decorator to register a CLI subcommand.

    ``name`` may be two words (``"lbm run"``) to nest the command under a group.
    The handler takes ``(args, app_config)`` and returns a JSON-ready summary.
    """

    def decorator(func):
        COMMAND_REGISTRY[name] = Command(name=name, handler=func, help=help, configure=configure)
        return func

    return decorator
