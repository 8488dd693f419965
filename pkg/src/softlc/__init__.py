"""Soft lambda-calculus toolkit.

Terms with a bang modality and multiplexed lets, a reduction engine
whose every sequence is bounded by a concrete polynomial certificate,
the weight/measure machinery behind those bounds, an affine type
checker with second-order and fix-point formulas, and encoded-data
demos (unary integers, counted lists, sorting, mapping) driven from a
bundled definition library.
"""

from __future__ import annotations

import sys

from .analysis import TermInfo, alpha_eq, analyze, rank, substitute
from .errors import SlcError
from .formulas import Formula, show_type
from .generators import enumerate_terms, random_corpus, random_term
from .metrics import (Certificate, MetricSnapshot, certificate, check_step,
                      key_lemma_check, measure, nlet, snapshot, weight)
from .parser import SourceModule, link_module, parse
from .reduction import (Step, Trace, all_sequences, canonical_key, contract,
                        normalize, redexes, step)
from .stdlib import (decode_counted, decode_list, encode_counted,
                     encode_list, numeral, run_map, run_sort, stdlib_env,
                     stdlib_terms)
from .syntax import (Abs, App, Bang, Case, Fold, Gen, Inl, Inr, Inst,
                     LetBang, LetPair, Pair, PlainLet, Term, Unfold, Unit,
                     Var, erase_markers, expand_plain_let, redex_rule,
                     show_term, subterm_at)
from .typecheck import Context, Judgement, check, check_module, infer

# Linked programs carry long application spines (unary counters), and the
# tree walks here are recursive; leave headroom beyond the interpreter
# default for large slack values.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
