"""Exception hierarchy shared by all modules."""


class LorentzGeoError(Exception):
    """Base class for all errors raised by lorentzgeo."""


class StepFailure(LorentzGeoError, RuntimeError):
    """The adaptive step controller underflowed or ran out of steps."""


class InitialConstraintViolated(LorentzGeoError, ValueError):
    """Initial state is off the mass shell H = -1/2."""


class ModelMismatch(LorentzGeoError, ValueError):
    """A world line is being post-processed with a different field model."""


class NonTimelikeInitial(LorentzGeoError, ValueError):
    pass


class InvalidPolarization(LorentzGeoError, ValueError):
    pass


class WrongModelKind(LorentzGeoError, ValueError):
    pass


class UnsupportedOrbitClass(LorentzGeoError, ValueError):
    pass


class DegenerateMonodromy(LorentzGeoError, ArithmeticError):
    """|phi| = 1 within tolerance: parabolic case, no Floquet decomposition."""


class DecompositionIdentityViolated(LorentzGeoError, RuntimeError):
    pass


class InsufficientData(LorentzGeoError, ValueError):
    pass


class ConfigError(LorentzGeoError, ValueError):
    pass
