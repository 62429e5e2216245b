import itertools

import pytest

from connexive import principles
from connexive.formula import metavariables, parse_schema, render
from connexive.matrix import BUILTIN_NAMES, MatrixLogic, builtin
from connexive.principles import (
    CO_UNSAT,
    FAILS,
    HOLDS,
    NOT_APPLICABLE,
    RULE,
    UNSAT,
    VALIDITY,
    check_all,
    check_principle,
    classify,
)
from connexive.semantics import schema_satisfiable, schemata_co_satisfiable
from test_semantics import naive


def brute_status(m: MatrixLogic, p) -> str:
    """Independent verdict: plain loops over assignments with the naive evaluator."""
    if p.needs - m.signature:
        return NOT_APPLICABLE
    if p.structural:
        return HOLDS
    names = sorted({v for s in p.payload for v in metavariables(s)})
    rows = [dict(zip(names, r)) for r in itertools.product(range(m.n), repeat=len(names))]
    des = m.designated

    def d(s, env):
        return naive(m, s, env) in des

    if p.kind == VALIDITY:
        ok = all(d(p.schema, e) for e in rows)
    elif p.kind == UNSAT:
        ok = not any(d(s, e) for s in p.payload for e in rows)
    elif p.kind == CO_UNSAT:
        ok = not any(all(d(s, e) for s in p.payload) for e in rows)
    else:
        ok = all(d(p.conclusion, e) for e in rows if all(d(s, e) for s in p.premises))
    return HOLDS if ok else FAILS


class TestCatalog:
    def test_ids_unique(self):
        ids = [p.id for p in principles.catalog()]
        assert len(ids) == len(set(ids))

    def test_display_forms(self):
        assert render(principles.get("SA2").schema) == "(~A -> A) -> B"
        assert render(principles.get("S_BOT_B1").schema, arrow_parens=True) == "(A -> B) -> ((A -> ~B) -> bot)"
        assert render(principles.get("ECF_ARROW").schema) == "A -> ~A -> bot"

    def test_unknown(self):
        with pytest.raises(KeyError):
            principles.get("NOPE")

    def test_rules(self):
        mp = principles.get("MP")
        assert mp.kind == RULE
        assert [render(s) for s in mp.premises] == ["A", "A -> B"]
        assert principles.get("SUB").structural


class TestAgainstBruteForce:
    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_every_principle(self, name):
        m = builtin(name)
        for p in principles.catalog():
            assert check_principle(m, p).status == brute_status(m, p), p.id


class TestCC1:
    def setup_method(self):
        self.m = builtin("cc1_bot")

    def test_classification(self):
        r = classify(self.m)
        assert r.weakly_connexive and r.strongly_connexive and r.super_bot_connexive
        assert not r.super_connexive and not r.super_bot_without_at_bt

    def test_sa1_counterexample(self):
        v = check_principle(self.m, "SA1")
        assert v.status == FAILS
        assert v.counterexample.labelled(self.m)["assignment"] == {"A": "1", "B": "1"}

    def test_explosion_split(self):
        assert check_principle(self.m, "ECF_AND").holds
        v = check_principle(self.m, "ECF_ARROW")
        assert v.status == FAILS
        ce = v.counterexample.labelled(self.m)
        assert ce["assignment"] == {"A": "2"}
        assert ce["values"]["A -> ~A -> bot"] == "3"

    def test_bridge_ingredients(self):
        assert check_principle(self.m, "NEG_BOT").holds
        assert check_principle(self.m, "CONTRA").holds
        assert check_principle(self.m, "MP").holds
        assert check_principle(self.m, "DNE").holds

    def test_json(self):
        doc = classify(self.m).to_json(self.m)
        assert doc["labels"]["strongly_connexive"] is True
        assert doc["principles"]["SA1"]["counterexample"]["assignment"] == {"A": "1", "B": "1"}
        assert doc["principles"]["UNSAT1"] == {"verdict": "holds", "kind": "unsat"}


class TestOtherBuiltins:
    def test_ecf_three(self):
        m = builtin("ecf_three")
        for pid in ("ECF_ARROW", "ECF_AND", "S_BOT_A1", "S_BOT_A2", "S_BOT_B1", "S_BOT_B2"):
            assert check_principle(m, pid).holds, pid
        assert check_principle(m, "DNE").status == FAILS
        assert classify(m).super_bot_connexive

    def test_sa2_three(self):
        m = builtin("sa2_three")
        assert check_principle(m, "SA2").holds
        assert check_principle(m, "MP").holds
        dne = check_principle(m, "DNE")
        assert dne.status == FAILS
        assert dne.counterexample.labelled(m)["assignment"] == {"A": "0"}

    def test_sa2_three_missing_connectives(self):
        verdicts = check_all(builtin("sa2_three"))
        for pid in ("ABELARD", "SUPER_ABELARD", "S_BOT_ABELARD", "ECF_AND", "ADJ"):
            assert verdicts[pid].status == NOT_APPLICABLE
        assert verdicts["ABELARD"].missing == ("and",)
        assert verdicts["EFQ"].missing == ("bot",)
        assert not classify(builtin("sa2_three")).super_bot_connexive

    def test_classical_not_connexive(self):
        r = classify(builtin("classical"))
        assert not r.weakly_connexive
        assert check_principle(builtin("classical"), "AT1").status == FAILS

    def test_bicond_is_super_bot_only(self):
        m = builtin("classical_bicond")
        assert classify(m).weakly_connexive
        assert check_principle(m, "S_BOT_A1").holds
        assert check_principle(m, "MP").holds


# ---------------------------------------------------------------- semantic meta-theorem

_VARIANTS = [
    ("S_BOT_A1", UNSAT, ["A -> ~A"]),
    ("S_BOT_A2", UNSAT, ["~A -> A"]),
    ("S_BOT_B1", CO_UNSAT, ["A -> B", "A -> ~B"]),
    ("S_BOT_B2", CO_UNSAT, ["A -> ~B", "A -> B"]),
]


def _unsat_conclusion(m, kind, texts) -> bool:
    schemas = [parse_schema(t) for t in texts]
    if kind == UNSAT:
        return not any(schema_satisfiable(m, s) for s in schemas)
    return not schemata_co_satisfiable(m, schemas)


def _meta_holds(m) -> tuple[int, bool]:
    """(number of variants whose hypotheses hold, whether all such conclusions hold)."""
    if not check_principle(m, "MP").holds:
        return 0, True
    hits, ok = 0, True
    for pid, kind, texts in _VARIANTS:
        if check_principle(m, pid).holds:
            hits += 1
            ok = ok and _unsat_conclusion(m, kind, texts)
    return hits, ok


def _neg_imp_bot(n, designated, neg, imp, bot):
    return MatrixLogic("m", tuple(str(i) for i in range(n)), frozenset(designated), neg=neg, imp=imp, bot=bot)


def test_meta_theorem_exhaustive_n2():
    total = hits = 0
    for d in ({0}, {1}):
        bot = 1 - next(iter(d))
        for neg in itertools.product(range(2), repeat=2):
            for cells in itertools.product(range(2), repeat=4):
                imp = (cells[:2], cells[2:])
                h, ok = _meta_holds(_neg_imp_bot(2, d, neg, imp, bot))
                assert ok
                total += 1
                hits += h
    assert total == 128
    assert hits > 0


# the 10^4-matrix sample at n=3 runs in test_acceptance (criterion 7)
