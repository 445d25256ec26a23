"""Toolkit for a pair of substructural lambda calculi.

The package implements two call-by-value calculi sharing one term
language: a linear calculus (variables of linear type are used exactly
once) and an affine calculus (at most once).  It provides:

- concrete/abstract syntax with capture-avoiding substitution (`syntax`)
- algorithmic type checking for both disciplines (`typecheck`)
- a fuel-bounded big-step evaluator (`evaluator`)
- semantic values and fuel-indexed computations (`domains`)
- a compositional denotational backend in which lambdas are always
  defined values (`denote_standard`)
- a strict function-space backend that collapses on the affine calculus
  (`denote_naive`)
- a random well-typed term generator, named program corpus, property
  suites, and a CLI (`generate`, `corpus`, `suites`, `cli`)
"""

__version__ = "0.1.0"
