from .expr import ParseError, parse_expr
from .main import main, run
from .problem import ProblemError, ProblemFile, parse_problem, parse_problem_text
