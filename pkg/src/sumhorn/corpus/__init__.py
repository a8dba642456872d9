"""Bundled benchmark programs (``*.imp``), safe versions and buggy twins."""

from importlib import resources


def names() -> list[str]:
    return sorted(p.name[:-4] for p in resources.files(__name__).iterdir() if p.name.endswith(".imp"))


def safe_names() -> list[str]:
    return [n for n in names() if not n.endswith("_bug")]


def bug_names() -> list[str]:
    return [n for n in names() if n.endswith("_bug")]


def source(name: str) -> str:
    return resources.files(__name__).joinpath(name + ".imp").read_text()


def path(name: str) -> str:
    return str(resources.files(__name__).joinpath(name + ".imp"))
