"""Near-group fusion categories: solving the defining equations, building the
modular data of their doubles, and comparing against closed-form families."""

__version__ = "0.1.0"
