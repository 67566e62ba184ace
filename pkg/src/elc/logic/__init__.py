"""Formulas, their interpretation in structures, and satisfaction."""
from .semantics import (Options, SchemaTruncated, interpret, interpret_term, satisfies, satisfies_at,
                        satisfies_bang_sequent, satisfies_limit_sequent, satisfies_sequent,
                        satisfies_sequent_pointwise, stabilize_disjunction)
from .schema import is_model, model_report
from .syntax import (And, Apply, Compose, Context, Eq, Exists, Formula, Or, OrSchema, Pair, Reindex, Rel,
                     Schema, Sequent, Theory, Unique)
