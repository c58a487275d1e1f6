"""Exception types.  Each carries the CLI exit code it maps to."""


class ConicZerosError(Exception):
    exit_code = 1


class MalformedFormError(ConicZerosError, ValueError):
    exit_code = 2


class AnisotropicFormError(ConicZerosError):
    exit_code = 3


class SingularFormError(ConicZerosError, ValueError):
    exit_code = 4


class ImprimitiveFormError(ConicZerosError, ValueError):
    exit_code = 4


class FactoringError(ConicZerosError):
    exit_code = 5


class OracleMismatchError(ConicZerosError):
    exit_code = 6
