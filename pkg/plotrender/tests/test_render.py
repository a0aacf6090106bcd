import hashlib
from pathlib import Path

import pytest

from plotrender import FigureRecipe, RenderError, build_figure, main, render

DATA = Path(__file__).parent / "data"
GOLDEN_M_FREE = str(DATA / "golden_nmi_vs_m_unconstrained.csv")
GOLDEN_M_TIGHT = str(DATA / "golden_nmi_vs_m_constrained.csv")
GOLDEN_TWO_RAY = str(DATA / "golden_two_ray.csv")
GOLDEN_D = str(DATA / "golden_nmi_sinr_vs_d.csv")

ALL_TOPOLOGIES = {"ULA", "HURA", "VURA", "UCirA", "UCylA"}


def _sha(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _recipes(tmp_path):
    return [
        FigureRecipe("nmi-vs-m", (GOLDEN_M_FREE, GOLDEN_M_TIGHT),
                     str(tmp_path / "fig_m.png"),
                     panel_titles=("unconstrained", "constrained")),
        FigureRecipe("two-ray", (GOLDEN_TWO_RAY,), str(tmp_path / "fig_tr.png")),
        FigureRecipe("nmi-sinr-vs-d", (GOLDEN_D,), str(tmp_path / "fig_d.png")),
    ]


def test_renders_three_figures_from_goldens(tmp_path):
    for recipe in _recipes(tmp_path):
        out = render(recipe)
        assert Path(out).stat().st_size > 5000


def test_legends_contain_exactly_present_topologies(tmp_path):
    for recipe in _recipes(tmp_path):
        fig, labels = build_figure(recipe)
        assert set(labels) == ALL_TOPOLOGIES
        assert len(labels) == len(set(labels))   # exactly one entry each
        import matplotlib.pyplot as plt
        plt.close(fig)


def test_rerender_is_byte_stable_and_leaves_inputs_alone(tmp_path):
    before = [_sha(p) for p in (GOLDEN_M_FREE, GOLDEN_M_TIGHT,
                                GOLDEN_TWO_RAY, GOLDEN_D)]
    for recipe in _recipes(tmp_path):
        first = Path(render(recipe)).read_bytes()
        second = Path(render(recipe)).read_bytes()
        assert first == second
    after = [_sha(p) for p in (GOLDEN_M_FREE, GOLDEN_M_TIGHT,
                               GOLDEN_TWO_RAY, GOLDEN_D)]
    assert before == after


def test_single_topology_csv_single_legend_entry(tmp_path):
    src = Path(GOLDEN_M_FREE).read_text().splitlines()
    sub = [src[0]] + [line for line in src[1:] if line.startswith("ULA,")]
    one = tmp_path / "one.csv"
    one.write_text("\n".join(sub) + "\n")
    fig, labels = build_figure(
        FigureRecipe("nmi-vs-m", (str(one),), str(tmp_path / "one.png")))
    assert labels == ["ULA"]
    import matplotlib.pyplot as plt
    plt.close(fig)


def test_empty_csv_is_an_error(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("topology,M,d_used,kappa_closed,kappa_mc,stderr\n")
    with pytest.raises(RenderError, match="no data rows"):
        render(FigureRecipe("nmi-vs-m", (str(empty),), str(tmp_path / "x.png")))
    assert not (tmp_path / "x.png").exists()
    blank = tmp_path / "blank.csv"
    blank.write_text("")
    with pytest.raises(RenderError, match="empty"):
        render(FigureRecipe("nmi-vs-m", (str(blank),), str(tmp_path / "y.png")))


def test_missing_columns_is_an_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("topology,M\nULA,4\n")
    with pytest.raises(RenderError, match="missing columns"):
        render(FigureRecipe("nmi-vs-m", (str(bad),), str(tmp_path / "x.png")))


def test_unknown_recipe_rejected(tmp_path):
    with pytest.raises(ValueError):
        FigureRecipe("volcano", (GOLDEN_D,), str(tmp_path / "x.png"))


def test_cli_entry_point(tmp_path, capsys):
    out = tmp_path / "cli.png"
    rc = main(["--recipe", "two-ray", "--in", GOLDEN_TWO_RAY, "--out", str(out)])
    assert rc == 0
    assert out.exists()
    assert "wrote" in capsys.readouterr().out
    rc = main(["--recipe", "nmi-vs-m", "--in", str(tmp_path / "nope.csv"),
               "--out", str(tmp_path / "z.png")])
    assert rc == 1


def test_cli_reports_render_errors(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("topology,M,kappa_closed\n")
    rc = main(["--recipe", "nmi-vs-m", "--in", str(empty),
               "--out", str(tmp_path / "x.png")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err
