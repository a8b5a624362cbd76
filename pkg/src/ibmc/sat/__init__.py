from .dimacs import DimacsError, load_solver, parse_dimacs, write_dimacs
from .solver import Solver, SolverError, luby

__all__ = ["Solver", "SolverError", "luby", "DimacsError", "parse_dimacs", "write_dimacs", "load_solver"]
