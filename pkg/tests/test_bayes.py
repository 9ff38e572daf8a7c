import json
import os
from fractions import Fraction as Fr

import pytest

from plog.bayes import (
    BayesNet, all_interventions, cbn_violations, check_cbn_theorem, dump_net, engine_table,
    formula_table, interventional_distribution, is_causal_network, joint_to_net, load_net,
    net_from_dict, net_to_plog, plog_text, to_fraction,
)
from plog.errors import NetError
from plog.semantics import prob

from conftest import NETS, load

T, F_ = "true", "false"


def rat():
    return load_net(os.path.join(NETS, "rat.json"))


def test_to_fraction():
    assert to_fraction("0.8") == Fr(4, 5)
    assert to_fraction(0.1) == Fr(1, 10)
    assert to_fraction("3/7") == Fr(3, 7)
    with pytest.raises(NetError):
        to_fraction("x")


def test_rat_net_program_matches_the_hand_written_one():
    prog = net_to_plog(rat())
    pairs = [("a", "arsenic"), ("d", "death"), ("a & d", "arsenic & death"),
             ("~a & d", "~arsenic & death")]
    for f, g in pairs:
        assert prob(prog, f) == prob(load("rat"), g)


def test_plog_text():
    text = plog_text(rat())
    assert "random(a)." in text
    assert "pr(d |c ~a) = 1/10." in text


def test_non_boolean_variables_get_a_sort():
    b = BayesNet({"x": [1, 2, 3]}, {"x": []},
                 {"x": {(): {1: Fr(1, 2), 2: Fr(1, 4), 3: Fr(1, 4)}}})
    text = plog_text(b)
    assert "x_values = {1, 2, 3}." in text
    assert prob(net_to_plog(b), "x = 2") == Fr(1, 4)


def test_json_round_trip():
    b = rat()
    assert net_from_dict(json.loads(dump_net(b))) == b


@pytest.mark.parametrize("data,msg", [
    ({"variables": {"a": [T, F_]}, "parents": {"a": ["a"]},
      "cpt": {"a": {T: {T: "1"}, F_: {T: "1"}}}}, "cycle"),
    ({"variables": {"a": [T, F_]}, "parents": {},
      "cpt": {"a": {"": {T: "1/2", F_: "1/3"}}}}, "sums to"),
    ({"variables": {"a": [T, F_], "b": [T, F_]}, "parents": {"b": ["a"]},
      "cpt": {"a": {"": {T: "1"}}, "b": {T: {T: "1"}}}}, "lacks the row"),
    ({"variables": {"A": [T]}, "parents": {}, "cpt": {"A": {"": {T: "1"}}}}, "identifier"),
])
def test_invalid_nets(data, msg):
    with pytest.raises(NetError, match=msg):
        net_from_dict(data)


def test_all_interventions_of_rat():
    b = rat()
    rs = all_interventions(b.domains)
    assert len(rs) == 9
    assert all(check_cbn_theorem(b, r) for r in rs)


def test_engine_table_rows():
    b = rat()
    assert engine_table(b, {}) == {(T, T): Fr(8, 25), (T, F_): Fr(2, 25),
                                  (F_, T): Fr(3, 50), (F_, F_): Fr(27, 50)}
    assert engine_table(b, {"d": T}) == {(T, T): Fr(2, 5), (T, F_): 0,
                                        (F_, T): Fr(3, 5), (F_, F_): 0}
    assert engine_table(b, {"a": F_}) == {(T, T): 0, (T, F_): 0,
                                         (F_, T): Fr(1, 10), (F_, F_): Fr(9, 10)}


def test_generated_distribution_is_compatible_with_its_graph():
    b = rat()
    pstar = interventional_distribution(b)
    assert is_causal_network(b.domains, b.parents, pstar)


def test_reversed_graph_fails_compatibility():
    b = rat()
    pstar = interventional_distribution(b)
    viol = cbn_violations(b.domains, {"a": ["d"], "d": []}, pstar)
    hit = [v for v in viol if v.condition == 3 and v.intervention == (("a", T),)
           and v.variable == "d" and v.lhs == Fr(4, 5)]
    assert hit and hit[0].rhs == Fr(19, 50)


def test_joint_to_net_uses_full_prefixes():
    b = rat()
    joint = {k: v for k, v in formula_table(b, {}).items()}
    net = joint_to_net(b.domains, joint)
    assert net.parents == {"a": [], "d": ["a"]}
    assert formula_table(net, {}) == joint
    assert all(check_cbn_theorem(net, r) for r in all_interventions(net.domains))


def test_unknown_intervention_value():
    with pytest.raises(NetError):
        formula_table(rat(), {"a": "maybe"})
