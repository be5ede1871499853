import io
import json

import pytest

from diopkit.cli.grammar import ArityRangeError, ParseError, format_presentation, parse
from diopkit.cli.main import BUILTINS, builtin_text, run
from diopkit.diopcore.presentation import QUADRATIC_SLOTS
from diopkit.koszul.dual import relation_isomorphic

HEADER = """name toy
gen l (1,2) dim=1 act_out=[] act_in=[[-1]]
gen d (2,1) dim=1 act_out=[[-1]] act_in=[]
"""


def call(*argv, tmp_path=None):
    out, err = io.StringIO(), io.StringIO()
    extra = ["--cache", str(tmp_path / "cache")] if tmp_path else ["--no-cache"]
    code = run(list(argv) + extra, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def rows(stdout, title=None):
    doc = json.loads(stdout)
    assert doc["schema"] == "diopkit.report/1"
    t = next(t for t in doc["tables"] if title is None or t["title"] == title)
    return {r[0]: dict(zip(t["columns"], r)) for r in t["rows"]}


def test_bilie_file_relation_dims():
    p = parse(builtin_text("bilie"))
    assert p.relation_dims() == {(1, 3): 1, (3, 1): 1, (2, 2): 1}
    assert [r.name for r in p.named] == ["jacobi", "cojacobi", "drinfeld"]


def test_no_relations_is_free():
    p = parse(HEADER)
    assert all(p.relations[s].dim == 0 for s in QUADRATIC_SLOTS)


def test_arity_range_error_points_at_index():
    text = HEADER + "rel (1,3) = comp(l,3,1,l)\n"
    with pytest.raises(ArityRangeError) as exc:
        parse(text)
    assert exc.value.line == 4 and exc.value.token == "3"
    assert "line 4, column" in str(exc.value)


@pytest.mark.parametrize("text, where", [
    ("gen l (1,2) dim=1 act_out=[] act_in=[[2]]\n", 1),
    ("gen l (1,2) dim=1 act_out=[] act_in=[[-1]]\nrel (1,3) = comp(q,1,1,l)\n", 2),
    ("gen l (1,2) dim=1 act_out=[] act_in=[[-1]]\nrel (2,2) = comp(l,1,1,l)\n", 2),
    ("gen l (1,2) dim=1 act_out=[] act_in=[[-1]]\nrel (1,3) = comp(l,1,1,l\n", 2),
    ("gen l (1,2) dim=1 act_out=[] act_in=[[-1]]\nrel (1,3) = 1/0*comp(l,1,1,l)\n", 2),
    ("frobnicate\n", 1),
])
def test_parse_errors_are_located(text, where):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.line == where


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_print_parse_round_trip(name):
    p = parse(builtin_text(name))
    text = format_presentation(p)
    q = parse(text)
    assert relation_isomorphic(p, q) and q.name == p.name
    assert format_presentation(q) == text


def test_dims_command():
    code, out, _ = call("dims", "bilie", "--max-weight", "4", "--format", "json")
    assert code == 0
    q = {k: v["quotient"] for k, v in rows(out).items()}
    assert q["(1,3)"] == 2 and q["(2,2)"] == 4 and q["(1,4)"] == 6 and q["(1,5)"] == 24


def test_koszul_command_exits_zero():
    code, out, _ = call("koszul", "bilie", "--max-weight", "3")
    assert code == 0 and "EXACT" in out and "NONEXACT" not in out


def test_dual_command_matches_builtin_dual():
    code, out, _ = call("dual", "bilie")
    assert code == 0
    assert relation_isomorphic(parse(out), parse(builtin_text("bilie_dual")))


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_check_command(name):
    code, out, _ = call("check", name, "--cases", "200", "--seed", "3")
    assert code == 0, out


def test_cache_does_not_change_output(tmp_path):
    for fmt in ("table", "json"):
        cold = call("dims", "bilie", "--max-weight", "3", "--format", fmt, tmp_path=tmp_path)
        warm = call("dims", "bilie", "--max-weight", "3", "--format", fmt, tmp_path=tmp_path)
        assert cold[0] == warm[0] == 0 and cold[1] == warm[1]
        assert "hits" in warm[2]
    assert any((tmp_path / "cache").rglob("*.json"))


def test_corrupt_cache_entries_are_ignored(tmp_path):
    _, ref, _ = call("koszul", "bilie", "--max-weight", "2", tmp_path=tmp_path)
    for f in (tmp_path / "cache").rglob("*.json"):
        f.write_text("{not json")
    _, again, _ = call("koszul", "bilie", "--max-weight", "2", tmp_path=tmp_path)
    assert again == ref


def test_exit_codes(tmp_path):
    assert call("box", "bilie", "--max-weight", "3")[0] == 0
    bad = tmp_path / "broken.diop"
    bad.write_text(builtin_text("bilie").replace("rel drinfeld", "# rel drinfeld"))
    assert call("box", str(bad), "--max-weight", "3")[0] == 1
    assert call("dims", "nonexistent-presentation")[0] == 2
    assert call("dims")[0] == 2
    assert call("dims", "bilie", "--max-weight", "0")[0] == 2
    (tmp_path / "err.diop").write_text(HEADER + "rel (1,3) = comp(l,3,1,l)\n")
    code, _, err = call("dims", str(tmp_path / "err.diop"))
    assert code == 2 and "line 4" in err


def test_verify_algebra():
    good = ["verify-algebra", "bilie", "--dim", "2", "--map", "l=[[0,1,-1,0],[0,0,0,0]]",
            "--map", "d=[[0,0],[0,1],[0,-1],[0,0]]"]
    assert call(*good)[0] == 0
    bad = good[:-1] + ["d=[[1,0],[0,1],[0,-1],[0,0]]"]
    code, out, _ = call(*bad)
    assert code == 1 and "cojacobi" in out
    assert call("verify-algebra", "bilie", "--dim", "2", "--map", "l=[[1]]", "--map", "d=[[1]]")[0] == 2
    assert call("verify-algebra", "bilie", "--dim", "2", "--map", "q=[[1]]")[0] == 2


def test_verify_algebra_maps_file(tmp_path):
    f = tmp_path / "maps.json"
    f.write_text(json.dumps({"l": [[0, 1, -1, 0], [0, 0, 0, 0]], "d": [[0, 0], [0, "1/2"], [0, "-1/2"], [0, 0]]}))
    # every relation is homogeneous in d, so rescaling a valid cobracket stays valid
    code, _, _ = call("verify-algebra", "bilie", "--dim", "2", "--maps", str(f))
    assert code == 0


def test_jobs_do_not_change_output():
    serial = call("koszul", "bilie", "--max-weight", "3")
    parallel = call("koszul", "bilie", "--max-weight", "3", "--jobs", "2")
    assert serial[0] == parallel[0] == 0 and serial[1] == parallel[1]
