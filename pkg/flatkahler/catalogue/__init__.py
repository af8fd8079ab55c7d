import os
from .fourfold import ParametricZ3Fourfold
from .chw import ParametricCHW
from .fivefold import ParametricFivefold
from .extension import ParametricProductExtension


SPEC_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "specs")


def spec_path(name: str) -> str:
    """Path of a shipped spec file, given with or without extension."""
    if not name.endswith(".yaml"):
        name += ".yaml"
    path = os.path.join(SPEC_DIR, name)
    if not os.path.exists(path):
        raise FileNotFoundError(f"No shipped spec named {name}.")
    return path


def shipped_specs():
    """Names of the shipped spec files."""
    return sorted(f[:-5] for f in os.listdir(SPEC_DIR) if f.endswith(".yaml"))
