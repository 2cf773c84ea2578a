import json

import numpy as np
import pytest

from gifs_lab import io as gio
from gifs_lab.balanced import materialize_net
from gifs_lab.extension import extend_system
from gifs_lab.metric import CompactNet
from gifs_lab.systems import hutchinson_step, hutchinson_step_inf
from gifs_lab.witness import build_union_system, build_witness_system


def round_trip(sys):
    return gio.system_from_dict(json.loads(gio.dumps(gio.system_to_dict(sys))))


def test_inf_systems_round_trip(tree, witness, net3):
    union = build_union_system(tree, CompactNet(np.array([[5.0]])), 0.3)
    ext = extend_system(build_witness_system(tree, dim=2), 0.5, 2)
    net2d = materialize_net(tree, 3, 2)
    for sys, S in [(witness, net3), (union, net3.union(union.extra)), (ext, net2d)]:
        back = round_trip(sys)
        assert [f.lip for f in back.maps] == [f.lip for f in sys.maps]
        assert hutchinson_step_inf(back, S).same_points(hutchinson_step_inf(sys, S))


def test_finite_systems_from_json():
    cantor = gio.system_from_dict(gio.cantor_ifs_dict())
    S = hutchinson_step(cantor, CompactNet(np.array([[0.0], [1.0]])))
    assert len(S) == 4
    avg = gio.system_from_dict(gio.averaging_gifs_dict())
    assert avg.order == 2 and avg.contraction == 0.5


def test_rejects_unknown_kinds(witness):
    with pytest.raises(ValueError):
        gio.system_from_dict({"kind": "other", "maps": []})
    d = gio.system_to_dict(witness)
    d["maps"][0]["type"] = "mystery"
    with pytest.raises(ValueError):
        gio.system_from_dict(d)
