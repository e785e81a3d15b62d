"""guidecheck: region-indexed trace-effect inference for a small class-based language.

The analyzer infers, per method signature (class, receiver region, method,
argument regions), the finite traces a call may emit when it terminates or
throws, and the infinite traces it may emit when it diverges.  Effects are
checked against a guideline given as an automaton read both as an NFA over
finite words and as a Büchi automaton over infinite words.  A reference
interpreter provides ground truth for the finite/divergent behaviours.
"""

__version__ = "0.1.0"
