import json
import math

import pytest
from click.testing import CliRunner

from galres.cli import main
from galres.extremal import constant_B
from galres.galsum import gal_sum, sigma_p_plus, sigma_p_star
from galres.lfunc import w_kernel

GALSUM_123 = 3.0 + math.sqrt(2.0) + 2.0 / math.sqrt(3.0) + 2.0 / math.sqrt(6.0)


@pytest.fixture()
def runner():
    return CliRunner()


def run_ok(runner, args):
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output + str(result.exception)
    return result


# ---------------- scalar commands and formats

def test_galsum_pretty_value(runner):
    result = run_ok(runner, ["galsum", "--set", "1,2,3"])
    assert float(result.output.strip()) == pytest.approx(GALSUM_123,
                                                         abs=1e-12)


def test_galsum_json_round_trip(runner):
    result = run_ok(runner, ["galsum", "--set", "1,2,3", "--format", "json"])
    payload = json.loads(result.output)
    assert payload["set_size"] == 3
    assert payload["alpha"] == "1/2"
    assert payload["value"] == pytest.approx(GALSUM_123, abs=1e-12)
    # repr round-trip: the serialized float is the exact binary value
    assert payload["value"] == float(gal_sum([1, 2, 3]))


def test_galsum_alpha_one(runner):
    result = run_ok(runner, ["galsum", "--set", "2,4", "--alpha", "1"])
    want = 2.0 + 2.0 * (2.0 / 4.0)
    assert float(result.output.strip()) == pytest.approx(want, abs=1e-12)


def test_csv_uses_17_digit_floats(runner):
    result = run_ok(runner, ["constant-b", "--terms", "100",
                             "--format", "csv"])
    lines = result.output.strip().split("\n")
    header = lines[0].split(",")
    cells = lines[1].split(",")
    want = float(constant_B(100))
    assert cells[header.index("value")] == "%.17g" % want


def test_constant_b_reference_window(runner):
    result = run_ok(runner, ["constant-b", "--terms", "10000"])
    assert abs(float(result.output.strip()) - 2.78422) < 5e-5


def test_qnorm_two_point_set(runner):
    result = run_ok(runner, ["qnorm", "--set", "1,2"])
    assert float(result.output.strip()) == pytest.approx(
        1.0 + 2.0 ** -0.5, abs=1e-10)


def test_sigma_p_closed_forms(runner):
    result = run_ok(runner, ["sigma-p", "--p", "2", "--r", "2", "--s", "3",
                             "--format", "json"])
    payload = json.loads(result.output)
    assert payload["sigma_star"] == pytest.approx(sigma_p_star(2, 3, 2))
    assert payload["sigma_plus"] == pytest.approx(sigma_p_plus(2, 3, 2))


def test_w_kernel_matches_library(runner):
    result = run_ok(runner, ["w-kernel", "--x", "1.0", "--nu", "0"])
    assert float(result.output.strip()) == pytest.approx(
        w_kernel(1.0, 0), rel=1e-12)


def test_primes_series(runner):
    result = run_ok(runner, ["primes", "--limit", "10"])
    assert result.output.split() == ["2", "3", "5", "7"]


def test_factor_csv(runner):
    result = run_ok(runner, ["factor", "--n", "360", "--format", "csv"])
    lines = result.output.strip().split("\n")
    assert lines[0] == "p,e"
    assert lines[1:] == ["2,3", "3,2", "5,1"]


def test_version(runner):
    result = run_ok(runner, ["--version"])
    assert "0.1.0" in result.output


# ---------------- randomized inputs are seed-deterministic

def test_random_set_seed_determinism(runner):
    a = run_ok(runner, ["galsum", "--random-set", "8", "--seed", "99",
                        "--format", "csv"])
    b = run_ok(runner, ["galsum", "--random-set", "8", "--seed", "99",
                        "--format", "csv"])
    c = run_ok(runner, ["galsum", "--random-set", "8", "--seed", "100",
                        "--format", "csv"])
    assert a.output == b.output
    assert a.output != c.output


# ---------------- structured reports

def test_resonate_l_report(runner):
    result = run_ok(runner, ["resonate-l", "--q", "13", "--auto-set"])
    payload = json.loads(result.output)      # pretty is indented JSON
    assert payload["q"] == 13
    assert payload["family_size"] == 5
    assert payload["implied_bound"] <= payload["true_extremum"] + 1e-9
    assert len(payload["rows"]) == 5


def test_moment_report_keys(runner):
    result = run_ok(runner, ["moment", "--set", "1,2,3", "--t", "30",
                             "--format", "json"])
    payload = json.loads(result.output)
    for key in ("m1", "m1_bound", "i1_estimate", "gal_direct",
                "pair_count", "i1_to_gal_ratio"):
        assert key in payload
    assert payload["m1"] <= payload["m1_bound"]


def test_zscan_csv_shape(runner):
    result = run_ok(runner, ["zscan", "--t-max", "20", "--format", "csv"])
    lines = result.output.strip().split("\n")
    assert lines[0] == "t,re,im,abs"
    count = int(math.floor((20.0 - 1.0) / 0.05))
    assert len(lines) == 1 + count + 2       # grid points plus the top edge
    first = lines[1].split(",")
    assert float(first[0]) == pytest.approx(1.0)


def test_char_table_csv_row_count(runner):
    result = run_ok(runner, ["char-table", "--q", "11", "--format", "csv"])
    lines = result.output.strip().split("\n")
    assert len(lines) == 1 + 10              # header plus q - 1 characters


# ---------------- config file and output redirection

def test_config_supplies_unset_options(runner, tmp_path):
    cfg = tmp_path / "galres.cfg"
    cfg.write_text("# defaults for runs\nterms=2000\n")
    with_cfg = run_ok(runner, ["constant-b", "--config", str(cfg)])
    explicit = run_ok(runner, ["constant-b", "--terms", "2000"])
    assert with_cfg.output == explicit.output


def test_flag_overrides_config(runner, tmp_path):
    cfg = tmp_path / "galres.cfg"
    cfg.write_text("terms=2000\n")
    result = run_ok(runner, ["constant-b", "--terms", "500",
                             "--config", str(cfg)])
    other = run_ok(runner, ["constant-b", "--terms", "500"])
    assert result.output == other.output


def test_malformed_config_exits_2(runner, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("this line has no equals sign\n")
    result = runner.invoke(main, ["constant-b", "--config", str(cfg)])
    assert result.exit_code == 2


def test_out_writes_file(runner, tmp_path):
    target = tmp_path / "out.csv"
    result = run_ok(runner, ["galsum", "--set", "1,2,3", "--format", "csv",
                             "--out", str(target)])
    assert result.output == ""
    text = target.read_text()
    assert text.endswith("\n")
    assert text.split("\n")[0].startswith("value,")


# ---------------- exit codes

def test_validation_exits_2(runner):
    result = runner.invoke(main, ["galsum", "--set", "0,1"])
    assert result.exit_code == 2
    assert "violated" in result.stderr


def test_capacity_exits_2(runner):
    result = runner.invoke(main, ["gamma-brute", "--n", "9"])
    assert result.exit_code == 2


def test_empty_range_exits_2(runner):
    result = runner.invoke(main, ["sweep", "--exp-min", "12",
                                  "--exp-max", "10"])
    assert result.exit_code == 2


def test_parse_error_exits_2(runner):
    result = runner.invoke(main, ["galsum", "--set", "abc"])
    assert result.exit_code == 2


def test_missing_required_exits_2(runner):
    result = runner.invoke(main, ["galsum"])
    assert result.exit_code == 2


def test_all_rows_failing_exits_3(runner):
    # every grid point is rejected below the construction floor
    result = runner.invoke(main, ["sweep", "--n", "512"])
    assert result.exit_code == 3


# ---------------- the sweep table

def test_sweep_csv_contract(runner):
    args = ["sweep", "--exp-min", "10", "--exp-max", "12", "--format", "csv"]
    a = run_ok(runner, args)
    b = run_ok(runner, args)
    assert a.output == b.output              # deterministic end to end
    lines = a.output.strip().split("\n")
    assert lines[0] == ("N,u,a,gamma,alpha_res,cardinality,gal_sum,"
                        "normalized_exponent,error")
    rows = [line.split(",") for line in lines[1:]]
    # one champion per budget; a champion may have been built at a
    # smaller N, so the N column is nondecreasing, not the budget list
    assert len(rows) == 3
    ns = [int(float(r[0])) for r in rows]
    assert all(n in (1024, 2048, 4096) for n in ns)
    assert ns == sorted(ns)
    exponents = [float(r[7]) for r in rows]
    assert all(x > 0.0 for x in exponents)
    assert all(x2 >= x1 - 1e-12 for x1, x2 in zip(exponents, exponents[1:]))
    assert all(r[8] == "" for r in rows)     # no per-row errors


def test_sweep_full_lists_whole_grid(runner):
    best = run_ok(runner, ["sweep", "--n", "1024", "--format", "csv"])
    full = run_ok(runner, ["sweep", "--n", "1024", "--full",
                           "--format", "csv"])
    n_best = len(best.output.strip().split("\n"))
    n_full = len(full.output.strip().split("\n"))
    assert n_best == 2                       # header plus one champion row
    assert n_full > n_best


def test_sweep_workers_match_serial(runner):
    serial = run_ok(runner, ["sweep", "--n", "1024,2048", "--format", "csv"])
    pooled = run_ok(runner, ["sweep", "--n", "1024,2048", "--format", "csv",
                             "--workers", "2"])
    assert serial.output == pooled.output
