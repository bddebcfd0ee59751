"""
skeinlab core package.

Exact algebra for the skein module computations of the (3,3,3,3)-pretzel link
exterior. The command-line harness in `skeinlab_cli` drives the verifiers
defined here.

Key modules include:
-   `algebra`: multivariate Laurent polynomials over Q(q^1/2, K) and the substitution
    homomorphisms.
-   `families`: the gamma, eta, c and lambda polynomial families and their identities.
-   `calculus`: formal elements, axioms and the identity-modulo-axioms decision.
-   `reduction`: oriented rewriting, relation derivations and the quotient basis.
-   `character`: cyclotomic arithmetic and the trace-free character checks.
-   `manifest`: JSON manifests of declarative identity checks.
-   `config`: centralized run configuration.
"""

__version__ = "0.1.0"
