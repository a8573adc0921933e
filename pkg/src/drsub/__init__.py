"""Online DR-submodular maximization.

Online learners for monotone (strongly) DR-submodular utilities in the
adversarial, random-order and i.i.d. models, with offline comparators,
property checkers and a benchmark CLI.
"""

__version__ = "0.1.0"
