from abc import abstractmethod
from typing import Any, Dict
from flatkahler.family import FlatKahlerFamily
from flatkahler.groups import DEFAULT_BOUND


class AbstractGenerator:
    """Abstract Generator Interface."""

    @abstractmethod
    def __init__(self, **kwargs) -> None:
        pass

    @abstractmethod
    def create_instance(self) -> FlatKahlerFamily:
        pass


class Generator(AbstractGenerator):
    """Parametric generator of flat Kahler families.

    Subclasses set their parameters as attributes before calling
    ``super().__init__(**kwargs)``, so keyword arguments override them.
    """

    name = "family"

    def __init__(self, **kwargs) -> None:
        self.verbosity = getattr(self, "verbosity", 0)
        self.bound = getattr(self, "bound", DEFAULT_BOUND)
        self.processes = getattr(self, "processes", 1)

        for item in kwargs:
            if item.startswith("_"):
                raise AttributeError(f"Cannot override private attribute {item}.")
            setattr(self, item, kwargs[item])

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v!r}" for k, v in self.parameters().items())
        return f"{type(self).__name__}({params})"

    def parameters(self) -> Dict[str, Any]:
        """The current generator parameters."""
        return {k: v for k, v in vars(self).items() if not k.startswith("_")}

    def new_family(self, name: str = None) -> FlatKahlerFamily:
        """An empty family configured from the generator settings."""
        family = FlatKahlerFamily()
        family.configure(
            name=name or self.name,
            verbosity=self.verbosity,
            bound=self.bound,
            processes=self.processes,
        )
        return family
