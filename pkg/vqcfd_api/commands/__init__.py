from vqcfd_api.commands import lbm, performance, pqc, serve, vqcfd  # noqa: F401  (registers the subcommands)
from vqcfd_api.commands.registry import COMMAND_REGISTRY, register_command

__all__ = ["COMMAND_REGISTRY", "register_command"]
