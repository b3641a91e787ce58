class ConfigurationError(ValueError):
    """Invalid model parameters, pricing or scenario settings."""


class ScenarioParseError(ConfigurationError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class BudgetExceededError(RuntimeError):
    """The exhaustive solver would enumerate more leaves than allowed."""


class InfeasibleInstanceError(RuntimeError):
    """No allocation satisfies every patient's latency bound."""
