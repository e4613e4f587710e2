"""Unit tests for experiment configuration parsing and validation."""

from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adicweights import ConfigError, ExperimentConfig, parse_config
from adicweights.config import (
    DEFAULT_CONFIG_TEXT,
    parse_rational,
    rational_json,
    rational_str,
)


class TestRationalHelpers:
    def test_parse_rational(self):
        assert parse_rational(5) == Fraction(5)
        assert parse_rational("3/4") == Fraction(3, 4)
        # Decimal strings are parsed exactly, never through floats.
        assert parse_rational("1.5") == Fraction(3, 2)

    @pytest.mark.parametrize("junk", ["3/0", "a/b", "", "1/2/3", None, 2.5])
    def test_parse_rational_rejects_junk(self, junk):
        with pytest.raises(ConfigError):
            parse_rational(junk)

    @given(st.fractions(min_value=-100, max_value=100))
    def test_string_round_trip(self, value):
        assert parse_rational(rational_json(value)) == value
        text = rational_str(value)
        assert "/" not in text or value.denominator != 1

    def test_integers_render_bare(self):
        assert rational_str(Fraction(3)) == "3"
        assert rational_json(Fraction(3)) == 3
        assert rational_json(Fraction(3, 4)) == "3/4"


class TestParseConfig:
    def test_default_text_parses(self):
        cfg = parse_config(DEFAULT_CONFIG_TEXT)
        assert isinstance(cfg, ExperimentConfig)
        assert cfg.q == 2
        assert cfg.primes == (3,)
        assert cfg.alpha_schedule == (2,)
        assert cfg.a == Fraction(3, 4)
        assert cfg.b == Fraction(5, 4)
        assert cfg.workers == 1
        assert cfg.krantz_m == 5

    def test_round_trip(self):
        cfg = parse_config(DEFAULT_CONFIG_TEXT)
        again = parse_config(json.dumps(cfg.to_json_dict()))
        assert again == cfg

    def test_round_trip_with_options(self):
        text = json.dumps(
            {
                "q": 3,
                "primes": [5, 7],
                "block_count": 2,
                "alpha_schedule": "linear",
                "a": "3/4",
                "b": "3/2",
                "rh_exponent": 2,
                "workers": 4,
                "scan_depths": {"q_adic": 9},
                "alpha_independence": [2, 4],
            }
        )
        cfg = parse_config(text)
        assert cfg.alpha_schedule == (1, 2)
        assert cfg.a == Fraction(3, 4)
        assert cfg.scan_depths == {"q_adic": 9}
        assert cfg.alpha_independence == (2, 4)
        assert parse_config(json.dumps(cfg.to_json_dict())) == cfg

    def test_all_violations_reported_together(self):
        text = json.dumps(
            {
                "q": 4,
                "primes": [3, 3],
                "block_count": 1,
                "alpha_schedule": [1, 2],
                "a": "1/2",
            }
        )
        with pytest.raises(ConfigError) as err:
            parse_config(text)
        messages = "\n".join(err.value.violations)
        assert "not prime" in messages
        assert "distinct" in messages
        assert "must exceed q" in messages
        assert "expected 1 entries" in messages
        assert "both weights or neither" in messages
        assert len(err.value.violations) >= 5

    def test_weight_conservation_checked(self):
        text = json.dumps(
            {"q": 2, "primes": [3], "a": "1/2", "b": "5/4", "alpha_schedule": [1]}
        )
        with pytest.raises(ConfigError) as err:
            parse_config(text)
        assert any("(q-1)" in v or "must be" in v for v in err.value.violations)

    def test_rh_exponent_admissibility_checked(self):
        text = json.dumps(
            {
                "q": 3,
                "primes": [5],
                "a": "3/4",
                "b": "3/2",
                "alpha_schedule": [1],
                "rh_exponent": 5,
            }
        )
        with pytest.raises(ConfigError) as err:
            parse_config(text)
        assert any("exponent" in v.lower() for v in err.value.violations)

    def test_schema_rejects_unknown_keys(self):
        text = json.dumps({"q": 2, "primes": [3], "bogus": 1})
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_invalid_json_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("{not json")

    def test_non_object_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("[1, 2]")

    def test_strict_mode_gap_check(self):
        # Strict mode demands far more separation than the default profile,
        # so a schedule acceptable by default still parses with the flag on
        # (the selection just works harder), while nonsense stays rejected.
        base = {"q": 2, "primes": [3], "alpha_schedule": [1], "strict_paper": True}
        cfg = parse_config(json.dumps(base))
        assert cfg.strict_paper is True

    def test_violation_constants_positive(self):
        text = json.dumps(
            {"q": 2, "primes": [3], "violation_constants": ["-1"], "alpha_schedule": [2]}
        )
        with pytest.raises(ConfigError):
            parse_config(text)
