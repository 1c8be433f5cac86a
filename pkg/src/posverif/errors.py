"""Exception types shared across the package."""


class PosverifError(Exception):
    """Base class for all package errors."""


class CapacityExceeded(PosverifError):
    """A state would hold more qubits than the dense engine allows."""


class DuplicateRegister(PosverifError):
    pass


class UnknownRegister(PosverifError):
    pass


class LengthMismatch(PosverifError):
    pass


class WrongStateShape(PosverifError):
    """State registers do not match what the operation expects."""


class RegisterViolation(PosverifError):
    """A scoped party touched a register outside its grant."""


class InvalidN(PosverifError):
    pass


class TagMismatch(PosverifError):
    """Answer kind does not match the challenge branch."""


class KTooLarge(PosverifError):
    pass


class NotClassicalTape(PosverifError):
    """Compiler input keeps quantum state on the far side."""


class BudgetExceeded(PosverifError):
    """Attack needs more shared entanglement than its budget allows."""


class InvalidTrials(PosverifError):
    pass


class SimulationStarted(PosverifError):
    """Structural change attempted after the event loop began."""


class ConfigInvalid(PosverifError):
    pass


class UnknownStrategy(PosverifError):
    pass


class UnknownAttack(PosverifError):
    pass
