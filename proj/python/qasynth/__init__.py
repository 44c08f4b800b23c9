# SPDX-License-Identifier: Apache-2.0
"""IDE code question-answering data synthesis.

Thin wrapper over the C++ extension. Structured values come back as dicts.
"""

import json as _json

from . import _qasynth
from ._qasynth import LabelError, PlanError, ProfileError, accuracy5, distribution_distance, final_score, psr, ur

__all__ = [
    "LabelError",
    "PlanError",
    "ProfileError",
    "accuracy5",
    "analyze",
    "apply_deductions",
    "deduction_table",
    "distribution_distance",
    "final_score",
    "judge",
    "make_plan",
    "parse_score",
    "plan",
    "produce",
    "profile_from_labels",
    "psr",
    "report",
    "rule_labels",
    "ur",
]


def rule_labels(interaction):
    """Labels on the seven rule dimensions for one interaction dict."""
    return _json.loads(_qasynth.rule_labels(_json.dumps(interaction)))


def profile_from_labels(label_sets):
    return _json.loads(_qasynth.profile_from_labels(_json.dumps(label_sets)))


def make_plan(profile, total, seed):
    return _json.loads(_qasynth.make_plan(_json.dumps(profile), total, seed))


def deduction_table():
    return _json.loads(_qasynth.deduction_table())


def apply_deductions(response, context, finish="complete"):
    """Fired deductions for a response.

    `context` keys: scene, intent, selected_code, required_locale and,
    optionally, sentinels.
    """
    return _json.loads(_qasynth.apply_deductions(response, finish, _json.dumps(context)))


def parse_score(reply):
    """(score, rationale), or None when the reply is unusable."""
    return _qasynth.parse_score(reply)


def analyze(logs, out, pool=""):
    return _json.loads(_qasynth.analyze(str(logs), str(out), str(pool)))


def plan(profile, total, seed, out):
    return _json.loads(_qasynth.plan(str(profile), total, seed, str(out)))


def produce(plan, corpus, pool, seed, out_dir, work_root="", jobs=1):
    return _qasynth.produce(str(plan), str(corpus), str(pool), seed, str(out_dir), str(work_root), jobs)


def judge(traces, pool, out_dir, jobs=1):
    return _qasynth.judge(str(traces), str(pool), str(out_dir), jobs)


def report(dataset, scorecards, plan):
    return _json.loads(_qasynth.report(str(dataset), str(scorecards), str(plan)))
