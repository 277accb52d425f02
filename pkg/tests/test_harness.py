"""Harness: Legendre baseline, experiment runner, CSV/SVG, CLI, config."""

import csv
import math
import os
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from fextlab.harness.cli import main as cli_main
from fextlab.harness.experiments import (
    CSV_HEADER,
    EXPERIMENTS,
    EvalPoint,
    ExperimentSpec,
    run_experiment,
    write_experiment_csv,
)
from fextlab.harness.functions import _spec_xpow, make_jump, make_spline, parse_function
from fextlab.harness.legendre import legendre_series
from fextlab.mpcore import MPReal


# -- Legendre baseline ----------------------------------------------------------


def test_legendre_constant():
    base = legendre_series(lambda x: 1, 6)
    assert abs(float(base.coefficients[0]) - 1.0) < 1e-25
    assert all(abs(float(c)) < 1e-25 for c in base.coefficients[1:])


def test_legendre_linear():
    base = legendre_series(lambda x: x, 6)
    assert abs(float(base.coefficients[1]) - 1 / math.sqrt(3)) < 2e-16
    assert abs(float(base.coefficients[0])) < 1e-25
    # verify the normalization (1/2) int (sqrt(3) x)^2 = 1 behind that value
    assert abs(0.5 * 3 * (2 / 3) - 1.0) < 1e-15


def test_legendre_even_function_kills_odd_coefficients():
    base = legendre_series(lambda x: x * x, 8)
    for k in (1, 3, 5, 7):
        assert abs(float(base.coefficients[k])) < 1e-25


def test_legendre_partial_sums_converge():
    f = lambda x: 1 / (1 + 9 * float(x) ** 2)  # noqa: E731
    errs = []
    for K in (5, 9, 17, 33):
        base = legendre_series(f, K)
        xs = np.linspace(-1, 1, 201)
        errs.append(max(abs(float(base.evaluate(float(x))) - f(x)) for x in xs))
    assert errs[-1] < errs[0] * 1e-2
    assert all(b <= a * 1.5 for a, b in zip(errs, errs[1:]))


def test_legendre_reproduces_own_basis_element():
    # f = p_3 (normalized): a_3 = 1, all others 0
    def p3(x):
        x = float(x)
        return math.sqrt(7) * 0.5 * (5 * x**3 - 3 * x)

    base = legendre_series(p3, 6)
    assert abs(float(base.coefficients[3]) - 1.0) < 1e-15
    for k in (0, 1, 2, 4, 5):
        # p3 itself is evaluated in doubles, so spurious modes sit at ~1e-17
        assert abs(float(base.coefficients[k])) < 1e-15


# -- experiment specs -------------------------------------------------------------


def test_registry_covers_all_report_figures():
    assert set(EXPERIMENTS) == {"exp_analytic", "exp_spline", "exp_holder", "exp_interior"}
    for spec in EXPERIMENTS.values():
        assert all(n % 2 == 1 for n in spec.N_list)
        assert list(spec.N_list) == sorted(set(spec.N_list))


def test_spec_validates_N_list():
    with pytest.raises(ValueError):
        ExperimentSpec(
            name="bad",
            functions=(_spec_xpow(0.5),),
            interval=(0, 0.5),
            T=2,
            N_list=(4,),
            points=(EvalPoint("interior"),),
        )


def test_point_resolution():
    spec = EXPERIMENTS["exp_holder"]
    fs = spec.functions[0]
    assert spec.resolve_point(EvalPoint("endpoint"), fs) == 0.5
    assert abs(spec.resolve_point(EvalPoint("interior"), fs) - 0.30) < 1e-12
    assert spec.resolve_point(EvalPoint("singular"), fs) == 0.0


@pytest.fixture(scope="module")
def small_record(tmp_path_factory):
    out = tmp_path_factory.mktemp("runs")
    spec = ExperimentSpec(
        name="smoke",
        functions=(_spec_xpow(0.5),),
        interval=(0.0, 0.5),
        T=2,
        N_list=(5, 9, 13),
        points=(EvalPoint("interior"), EvalPoint("singular")),
        kind="algebraic",
        baseline=True,
    )
    record = run_experiment(spec, out_dir=str(out), keep_extensions=True)
    return spec, record, out


def test_rows_complete_for_full_grid(small_record):
    spec, record, _ = small_record
    # 2 points x 3 N x (1 function + baseline shadow)
    assert len(record.rows) == 12
    names = {r.function for r in record.rows}
    assert names == {"xpow_0.5", "xpow_0.5__legendre"}
    assert record.extensions[("xpow_0.5", 9)].N == 9


def test_csv_schema_and_deterministic_order(small_record, tmp_path):
    spec, record, out = small_record
    path = os.path.join(str(out), "smoke.csv")
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 13
    again = tmp_path / "again.csv"
    write_experiment_csv(record, str(again))
    with open(again) as fh:
        rows2 = list(csv.reader(fh))
    key = lambda r: (r[0], r[2], r[4])  # noqa: E731
    assert [key(r) for r in rows[1:]] == [key(r) for r in rows2[1:]]
    # error values identical run-to-run within one record (runtime may differ)
    assert [r[5] for r in rows[1:]] == [r[5] for r in rows2[1:]]


def test_svg_is_valid_xml_with_series(small_record):
    _, _, out = small_record
    tree = ET.parse(os.path.join(str(out), "smoke.svg"))
    root = tree.getroot()
    assert root.tag.endswith("svg")
    polylines = [el for el in root.iter() if el.tag.endswith("polyline")]
    assert len(polylines) >= 2


def test_errors_decrease_for_smooth_point(small_record):
    _, record, _ = small_record
    interior = [r.abs_error for r in record.rows if r.x_tag == "interior" and "legendre" not in r.function]
    assert interior[-1] < interior[0]


# -- function registry -------------------------------------------------------------


def test_parse_function_forms():
    assert parse_function("exp").name == "exp"
    assert parse_function("const(2.5)").name == "const_2.5"
    p = parse_function("pole(0, 0.6)")
    assert p.analytic == 0.6j
    s = parse_function("spline(3)")
    assert s.breakpoints  # knots declared for quadrature splitting


def test_parse_function_rejects_unknown():
    with pytest.raises(ValueError):
        parse_function("nope(1)")
    with pytest.raises(ValueError):
        parse_function("!!")


def test_jump_and_spline_values():
    f = make_jump()
    assert float(f(MPReal("0.1", 128))) == 0.1
    assert float(f(MPReal("0.26", 128))) == 1.0
    g = make_spline(3)
    v = float(g(MPReal("0.25", 192)))
    assert math.isfinite(v)


def test_spline_smoothness_at_knot():
    # degree-3 spline: second derivative continuous, third jumps at a knot
    g = make_spline(3)
    knot = 0.25
    h = 1e-6

    def d2(x):
        pts = [float(g(MPReal(repr(x + k * h), 320)))for k in (-1, 0, 1)]
        return (pts[0] - 2 * pts[1] + pts[2]) / h**2

    assert abs(d2(knot - 5 * h) - d2(knot + 5 * h)) < 1e-2


# -- CLI -----------------------------------------------------------------------------


def test_cli_extend_constant(capsys):
    rc = cli_main(["extend", "--T", "2", "--N", "5", "--function", "const(1)"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "c[+0] = 1" in out
    sup_line = [ln for ln in out.splitlines() if ln.startswith("sup_error")][0]
    sup = float(sup_line.split()[0].split("=")[1])
    assert sup < 1e-30


def test_cli_lebesgue_rows(capsys):
    rc = cli_main(["lebesgue", "--T", "2", "--N", "5,9", "--x", "0,1"])
    out = capsys.readouterr().out
    assert rc == 0
    data_lines = [ln for ln in out.splitlines() if ln and ln[0] in "-0123456789"]
    assert len(data_lines) == 4


def test_cli_remez(capsys):
    rc = cli_main(["remez", "--function", "abs", "--T", "2", "--N", "5"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "alternation points (6)" in out


def test_cli_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli_main(["not-a-command"])
    assert exc.value.code == 2


def test_cli_bad_function_exits_2(capsys):
    rc = cli_main(["extend", "--function", "garbage(1)"])
    assert rc == 2


def test_cli_experiment_writes_outputs(tmp_path, capsys, monkeypatch):
    # shrink a registry entry so the CLI path stays fast
    from fextlab.harness import experiments as expmod

    small = ExperimentSpec(
        name="exp_analytic",
        functions=EXPERIMENTS["exp_analytic"].functions[:1],
        interval=(-1.0, 1.0),
        T="2.43",
        N_list=(5, 9, 13),
        points=(EvalPoint("sup"),),
        kind="exponential",
    )
    monkeypatch.setitem(expmod.EXPERIMENTS, "exp_analytic", small)
    rc = cli_main(["experiment", "exp_analytic", "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "exp_analytic.csv").exists()
    assert (tmp_path / "exp_analytic.svg").exists()


def test_cli_config_file_and_env(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "fextlab.cfg"
    cfg.write_text("T = 2\nN = 5\nfunction = const(1)  # comment\n")
    rc = cli_main(["extend", "--config", str(cfg)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "N=5" in out
    # env var overrides the default precision policy
    monkeypatch.setenv("FEXTLAB_PRECISION_BITS", "320")
    rc = cli_main(["extend", "--config", str(cfg)])
    out = capsys.readouterr().out
    assert "precision_bits=320" in out
    # explicit flag beats the env var
    rc = cli_main(["extend", "--config", str(cfg), "--precision-bits", "192"])
    out = capsys.readouterr().out
    assert "precision_bits=192" in out
