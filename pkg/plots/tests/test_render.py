import numpy as np
import pytest

from irsplots import FigureSpec, SchemaMismatch, load_table, render
from irsplots.cli import main

HEADER = "experiment,scheme,b,sweep_param,sweep_value,mean_rate_bps_hz,mean_mse,stderr,trials,seed"


def write_fig3_csv(path, schemes=("proposed", "naive", "random_phase"), bits=(1, 2)):
    rows = [HEADER]
    rng = np.random.default_rng(0)
    for m in (1, 2, 4, 5, 8, 10, 16):
        for s in schemes:
            for b in bits:
                rate = 1.0 + 0.1 * m - 0.002 * m * m + 0.2 * rng.random()
                rows.append(
                    f"fig3-rate-groups,{s},{b},m_groups,{m},{rate:.6f},,0.01,500,1"
                )
    path.write_text("\n".join(rows) + "\n")
    return len(schemes) * len(bits)


def write_fig2_csv(path):
    rows = [HEADER]
    for m in range(1, 12):
        rows.append(f"fig2-mse,proposed,1,m_groups,{m},,{1e-3 * (1 + 0.2 * (m % 4)):.8g},0,0,1")
        rows.append(f"fig2-mse,proposed,2,m_groups,{m},,{1e-3 * (1 + 0.05 * (m % 3)):.8g},0,0,1")
        rows.append(f"fig2-mse,naive,1,m_groups,{m},,{1e-3 * (1 + m):.8g},0,0,1")
        rows.append(f"fig2-mse,lower_bound,,m_groups,{m},,0.001,0,0,1")
    path.write_text("\n".join(rows) + "\n")


def test_fig3_series_count(tmp_path):
    csv = tmp_path / "fig3.csv"
    n_series = write_fig3_csv(csv)
    out = tmp_path / "fig3.png"
    fig = render(FigureSpec(input_csv=csv, figure="fig3-rate-groups", output_image=out))
    ax = fig.axes[0]
    assert len(ax.containers) == n_series  # one errorbar container per (scheme, b)
    assert out.exists() and out.stat().st_size > 0


def test_fig2_log_scale_and_floor_line(tmp_path):
    csv = tmp_path / "fig2.csv"
    write_fig2_csv(csv)
    out = tmp_path / "fig2.svg"
    fig = render(FigureSpec(input_csv=csv, figure="fig2-mse", output_image=out))
    ax = fig.axes[0]
    assert ax.get_yscale() == "log"
    flat = [
        line
        for line in ax.lines
        if len(line.get_ydata()) > 1 and np.allclose(line.get_ydata(), 1e-3)
    ]
    assert flat, "expected a horizontal lower-bound series at 1e-3"
    assert out.exists()


def test_empty_csv_schema_mismatch(tmp_path):
    csv = tmp_path / "empty.csv"
    csv.write_text(HEADER + "\n")
    with pytest.raises(SchemaMismatch):
        load_table(csv)


def test_missing_columns_listed(tmp_path):
    csv = tmp_path / "bad.csv"
    csv.write_text("experiment,scheme\nfig2-mse,naive\n")
    with pytest.raises(SchemaMismatch) as err:
        load_table(csv)
    assert "mean_mse" in str(err.value)


def test_unknown_figure_rejected(tmp_path):
    with pytest.raises(ValueError):
        FigureSpec(input_csv=tmp_path / "x.csv", figure="fig9", output_image=tmp_path / "x.png")


def test_rendering_idempotent(tmp_path):
    csv = tmp_path / "fig3.csv"
    write_fig3_csv(csv)
    out_a, out_b = tmp_path / "a.png", tmp_path / "b.png"
    fig_a = render(FigureSpec(input_csv=csv, figure="fig3-rate-groups", output_image=out_a))
    fig_b = render(FigureSpec(input_csv=csv, figure="fig3-rate-groups", output_image=out_b))
    for ca, cb in zip(fig_a.axes[0].containers, fig_b.axes[0].containers):
        np.testing.assert_array_equal(ca[0].get_ydata(), cb[0].get_ydata())


def test_cli_render_and_errors(tmp_path, capsys):
    csv = tmp_path / "fig3.csv"
    write_fig3_csv(csv)
    out = tmp_path / "fig.png"
    assert main(["render", "--csv", str(csv), "--figure", "fig3-rate-groups", "--out", str(out)]) == 0
    assert out.exists()
    assert main(["render", "--csv", str(tmp_path / "nope.csv"), "--figure", "fig2-mse", "--out", str(out)]) == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    assert main(["render", "--csv", str(bad), "--figure", "fig2-mse", "--out", str(out)]) == 1
