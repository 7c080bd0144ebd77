"""Array-level storage, search, timing, and leakage tests.

The search oracle is an independent brute-force ternary matcher that walks
symbols directly; it never touches the conduction-mask machinery it checks.
"""

import random

import numpy as np
import pytest

from tcamsim import (
    ArrayConfig,
    LineParasitics,
    TernaryValue,
    elapse,
    export_contents,
    from_symbol_codes,
    from_symbols,
    import_contents,
    new_array,
    nem_3t2n,
    precharge,
    row_word,
    rram_2t2r,
    search_functional,
    search_timed,
    sram_16t,
    symbol_codes,
    ternary_word,
    word_string,
    write_row,
)

C = 100e-18  # round per-cell line capacitance for closed-form checks


def nem_config(rows=8, cols=8, **kw):
    return ArrayConfig(rows=rows, cols=cols, vdd=1.0, tech=nem_3t2n(),
                       parasitics=LineParasitics(C, C, C, C), write_supply=1.0, **kw)


def brute_force_match(stored: list[str], key: str) -> list[bool]:
    """Oracle: symbol-by-symbol ternary comparison, independent of the model."""
    result = []
    for row in stored:
        ok = True
        for s, k in zip(row, key):
            if s != "X" and k != "X" and s != k:
                ok = False
                break
        result.append(ok)
    return result


def random_symbols(rng: random.Random, n: int, alphabet="01X") -> str:
    return "".join(rng.choice(alphabet) for _ in range(n))


class TestNewArray:
    def test_fresh_array_is_all_dont_care(self):
        arr = new_array(nem_config(rows=64, cols=64))
        codes = symbol_codes(arr)
        assert codes.shape == (64, 64)
        assert np.all(codes == 2)

    def test_fresh_array_matches_any_key(self):
        arr = new_array(nem_config())
        assert all(search_functional(arr, ternary_word("10110100")))

    def test_zero_dimensions_rejected(self):
        with pytest.raises(ValueError):
            nem_config(rows=0)


class TestWriteRow:
    def test_write_then_search_matches_that_row(self):
        arr = new_array(nem_config())
        word = ternary_word("10110010")
        arr, _ = write_row(arr, 3, word)
        matches = search_functional(arr, word)
        assert matches[3]
        assert row_word(arr, 3) == word

    def test_identical_rewrite_has_no_device_term(self):
        cfg = ArrayConfig(rows=4, cols=4, vdd=1.0, tech=rram_2t2r(),
                          parasitics=LineParasitics(C, C, C, C), write_supply=1.8)
        arr = new_array(cfg)
        word = ternary_word("1010")
        arr, first = write_row(arr, 0, word)
        arr, again = write_row(arr, 0, word)
        assert first.breakdown["device"] > 0
        assert first.devices_switched > 0
        assert again.breakdown["device"] == 0.0
        assert again.devices_switched == 0
        assert again.breakdown["wordline"] == first.breakdown["wordline"]
        assert again.breakdown["bitline"] == first.breakdown["bitline"]

    def test_line_energy_closed_form(self):
        cfg = nem_config(rows=8, cols=8)
        arr = new_array(cfg)
        arr, rep = write_row(arr, 0, ternary_word("11110000"))
        # 8 wordline cells at vdd plus 8 definite bitlines of 8 cells each.
        assert rep.breakdown["wordline"] == pytest.approx(8 * C * 1.0, rel=1e-12)
        assert rep.breakdown["bitline"] == pytest.approx(8 * 8 * C * 1.0, rel=1e-12)
        assert rep.energy == pytest.approx(sum(rep.breakdown.values()), rel=1e-12)

    def test_dont_care_columns_do_not_swing_bitlines(self):
        cfg = nem_config()
        arr = new_array(cfg)
        arr, rep = write_row(arr, 0, ternary_word("1XXXXXXX"))
        assert rep.breakdown["bitline"] == pytest.approx(1 * 8 * C * 1.0, rel=1e-12)

    def test_relay_write_latency_is_mechanical(self):
        arr = new_array(nem_config())
        _, rep = write_row(arr, 0, ternary_word("10101010"))
        assert rep.latency == pytest.approx(2e-9, rel=1e-9)

    def test_bounds_checks(self):
        arr = new_array(nem_config())
        with pytest.raises(IndexError):
            write_row(arr, 8, ternary_word("10101010"))
        with pytest.raises(ValueError):
            write_row(arr, 0, ternary_word("101"))


class TestSearch:
    def test_exact_match_and_single_bit_mismatch(self):
        arr = new_array(nem_config())
        word = ternary_word("10110100")
        arr, _ = write_row(arr, 0, word)
        assert search_functional(arr, word)[0]
        flipped = list(word)
        flipped[5] = TernaryValue.ONE if flipped[5] is TernaryValue.ZERO else TernaryValue.ZERO
        assert not search_functional(arr, tuple(flipped))[0]

    def test_all_dont_care_key_matches_every_row(self):
        rng = random.Random(3)
        rows = [random_symbols(rng, 8) for _ in range(8)]
        arr = from_symbols(nem_config(), rows)
        assert all(search_functional(arr, ternary_word("X" * 8)))

    def test_matches_brute_force_oracle(self):
        rng = random.Random(11)
        cfg = nem_config(rows=16, cols=12)
        for _ in range(100):
            rows = [random_symbols(rng, 12) for _ in range(16)]
            key = random_symbols(rng, 12)
            arr = from_symbols(cfg, rows)
            assert search_functional(arr, ternary_word(key)) == brute_force_match(rows, key)

    def test_timed_and_functional_agree(self):
        rng = random.Random(5)
        cfg = nem_config(rows=16, cols=12)
        for _ in range(25):
            rows = [random_symbols(rng, 12) for _ in range(16)]
            key = random_symbols(rng, 12)
            arr = from_symbols(cfg, rows)
            _, matches, settle, _ = search_timed(arr, ternary_word(key))
            assert matches == search_functional(arr, ternary_word(key))
            for hit, t in zip(matches, settle):
                assert (t is None) == hit

    def test_more_mismatches_settle_faster(self):
        cfg = nem_config()
        one = from_symbols(cfg, ["10000000"] + ["XXXXXXXX"] * 7)
        two = from_symbols(cfg, ["11000000"] + ["XXXXXXXX"] * 7)
        key = ternary_word("00000000")
        _, _, settle_one, _ = search_timed(one, key)
        _, _, settle_two, _ = search_timed(two, key)
        assert settle_two[0] < settle_one[0]

    def test_search_energy_accounting(self):
        cfg = nem_config()
        rng = random.Random(1)
        arr = from_symbols(cfg, [random_symbols(rng, 8, "01") for _ in range(8)])
        key = ternary_word("00000000")
        arr, _, _, first = search_timed(arr, key)
        # Fresh array: all 8 matchlines precharge, 8 searchlines rise.
        assert first.breakdown["matchline"] == pytest.approx(8 * 8 * C * 1.0, rel=1e-12)
        assert first.breakdown["searchline"] == pytest.approx(8 * 8 * C * 1.0, rel=1e-12)
        assert first.energy == pytest.approx(sum(first.breakdown.values()), rel=1e-12)
        # Same key again: only the discharged rows re-precharge, no searchline
        # toggles.
        discharged = sum(1 for m in search_functional(arr, key) if not m)
        arr, _, _, second = search_timed(arr, key)
        assert second.breakdown["searchline"] == 0.0
        assert second.breakdown["matchline"] == pytest.approx(
            discharged * 8 * C * 1.0, rel=1e-12)

    def test_all_match_search_costs_no_matchline_energy_once_charged(self):
        cfg = nem_config()
        arr = from_symbols(cfg, ["XXXXXXXX"] * 8)
        arr, _ = precharge(arr)
        arr, matches, _, rep = search_timed(arr, ternary_word("10110100"))
        assert all(matches)
        assert rep.breakdown["matchline"] == 0.0
        assert rep.breakdown["searchline"] > 0.0

    def test_searchline_energy_linear_in_columns(self):
        narrow = new_array(nem_config(rows=8, cols=8))
        wide = new_array(nem_config(rows=8, cols=16))
        _, _, _, rep_n = search_timed(narrow, ternary_word("10" * 4))
        _, _, _, rep_w = search_timed(wide, ternary_word("10" * 8))
        assert rep_w.breakdown["searchline"] == pytest.approx(
            2 * rep_n.breakdown["searchline"], rel=1e-12)


class TestPrecharge:
    def test_already_charged_lines_cost_nothing(self):
        arr = new_array(nem_config())
        arr, _ = precharge(arr)
        _, energy = precharge(arr)
        assert energy == 0.0

    def test_full_precharge_energy(self):
        arr = new_array(nem_config(rows=64, cols=64))
        _, energy = precharge(arr)
        assert energy == pytest.approx(64 * 64 * C * 1.0 ** 2, rel=1e-12)

    def test_single_discharged_row_costs_one_share(self):
        cfg = nem_config(rows=64, cols=64)
        arr = new_array(cfg)
        arr, _ = precharge(arr)
        arr, _ = write_row(arr, 0, ternary_word("1" * 64))
        arr, _, _, _ = search_timed(arr, ternary_word("0" + "X" * 63))
        _, energy = precharge(arr)
        assert energy == pytest.approx(64 * C * 1.0, rel=1e-12)


class TestElapse:
    def test_retention_loss_after_full_decay(self):
        cfg = nem_config(rows=4, cols=4)
        arr = from_symbols(cfg, ["1010", "0101", "10XX", "XXXX"])
        arr, events = elapse(arr, 26.5e-6)
        stored_bits = 4 + 4 + 2
        assert len(events) == stored_bits
        assert np.all(symbol_codes(arr) == 2)

    def test_short_interval_is_harmless(self):
        arr = from_symbols(nem_config(rows=4, cols=4), ["1010"] * 4)
        arr, events = elapse(arr, 1e-6)
        assert events == []
        assert word_string(row_word(arr, 0)) == "1010"

    def test_dont_care_array_never_loses_data(self):
        arr = new_array(nem_config())
        _, events = elapse(arr, 1.0)
        assert events == []

    def test_composition_matches_single_interval(self):
        cfg = nem_config(rows=4, cols=4)
        rng = random.Random(9)
        for _ in range(20):
            arr = from_symbols(cfg, [random_symbols(rng, 4) for _ in range(4)])
            dt1, dt2 = rng.uniform(0, 20e-6), rng.uniform(0, 20e-6)
            step1, ev1 = elapse(arr, dt1)
            step2, ev2 = elapse(step1, dt2)
            whole, ev = elapse(arr, dt1 + dt2)
            assert np.array_equal(symbol_codes(step2), symbol_codes(whole))
            assert sorted(ev1 + ev2) == sorted(ev)
            np.testing.assert_allclose(step2.v_a, whole.v_a, atol=1e-12)
            np.testing.assert_allclose(step2.v_b, whole.v_b, atol=1e-12)

    def test_static_technologies_pass_through(self):
        cfg = ArrayConfig(rows=4, cols=4, vdd=1.0, tech=sram_16t(),
                          parasitics=LineParasitics(C, C, C, C), write_supply=1.0)
        arr = from_symbols(cfg, ["1010"] * 4)
        out, events = elapse(arr, 1.0)
        assert events == []
        assert word_string(row_word(out, 0)) == "1010"


class TestContentsRoundTrip:
    def test_export_import_identity(self):
        rng = random.Random(21)
        cfg = nem_config(rows=6, cols=10)
        rows = [random_symbols(rng, 10) for _ in range(6)]
        arr = from_symbols(cfg, rows)
        text = export_contents(arr)
        back = import_contents(cfg, text)
        assert np.array_equal(symbol_codes(arr), symbol_codes(back))
        for _ in range(20):
            key = ternary_word(random_symbols(rng, 10))
            assert search_functional(arr, key) == search_functional(back, key)

    def test_symbol_codes_round_trip(self):
        cfg = nem_config(rows=5, cols=7)
        rng = np.random.default_rng(2)
        codes = rng.integers(0, 3, size=(5, 7))
        arr = from_symbol_codes(cfg, codes)
        assert np.array_equal(symbol_codes(arr), codes)
