"""Subcommand coroutines. Each module exposes ``async def run(*, ..., logger)``."""

COMMANDS = {
    "synth": "commands.synth",
    "train": "commands.train",
    "eval": "commands.evaluate",
    "verify": "commands.verify",
    "axis-demo": "commands.axis_demo",
}
