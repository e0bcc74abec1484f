"""Exception hierarchy and process exit codes.

Every error the CLI can surface maps to one of the exit codes below so
that shell scripts driving the tool can branch on failure class.
"""


class BurgerKitchenError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(BurgerKitchenError):
    """Invalid, out-of-range, or unknown configuration."""

    exit_code = 2


class ContractError(BurgerKitchenError):
    """A caller violated an API precondition (e.g. stepping a terminal state)."""

    exit_code = 1


class NumericFault(BurgerKitchenError):
    """NaN/Inf appeared where finite numbers are required; aborts the run."""

    exit_code = 3


class ProtocolError(BurgerKitchenError):
    """Malformed response or bad status from the remote evaluator endpoint.

    Distinct from a timeout: timeouts degrade to an unshaped fallback
    verdict, protocol errors abort the run.
    """

    exit_code = 4


class MalformedPromptError(BurgerKitchenError):
    """Prompt string does not match the evaluator prompt template."""

    exit_code = 1


class CheckpointError(BurgerKitchenError):
    """Corrupt, truncated, or schema-incompatible checkpoint file."""

    exit_code = 1


EXIT_OK = 0
EXIT_CONFIG = ConfigError.exit_code
EXIT_NUMERIC = NumericFault.exit_code
EXIT_PROTOCOL = ProtocolError.exit_code
