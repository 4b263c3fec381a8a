from . import ast
from .parser import ParseError, parse
from .pretty import pretty
from .typecheck import Diag, TypecheckError, typecheck, typecheck_strict, validate_typed
