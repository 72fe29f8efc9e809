import math
import pytest
import sys
import os
sys.path.insert(1, os.path.abspath('.'))
from cochainlab import utils as util


class TestStringToBool:
    ############ For `str_to_bool`
    # Test cases for valid True values
    def test_str_to_bool_yes(self):
        assert util.str_to_bool("yes") == True

    def test_str_to_bool_true(self):
        assert util.str_to_bool("true") == True

    def test_str_to_bool_t(self):
        assert util.str_to_bool("t") == True

    def test_str_to_bool_one(self):
        assert util.str_to_bool("1") == True

    # Test cases for case insensitivity
    def test_str_to_bool_true_mixed_case(self):
        assert util.str_to_bool("TrUe") == True

    # Test cases for valid False values
    def test_str_to_bool_false(self):
        assert util.str_to_bool("false") == False

    def test_str_to_bool_zero(self):
        assert util.str_to_bool("0") == False

    def test_str_to_bool_random_string(self):
        assert util.str_to_bool("random") == False

    def test_str_to_bool_empty_string(self):
        assert util.str_to_bool("") == False

    # Test cases for None and numbers
    def test_str_to_bool_none(self):
        assert util.str_to_bool(None) == False

    def test_str_to_bool_int(self):
        assert util.str_to_bool(123) == False

    def test_str_to_bool_leading_whitespace(self):
        assert util.str_to_bool(" true ") == True


class TestStringToLists:
    ############ For `str_to_int_list` and `str_to_float_list`
    def test_int_list(self):
        assert util.str_to_int_list("50,80") == [50, 80]

    def test_int_list_spaces(self):
        assert util.str_to_int_list(" 4, 5 ,6 ") == [4, 5, 6]

    def test_int_list_trailing_comma(self):
        assert util.str_to_int_list("20,") == [20]

    def test_int_list_invalid(self):
        with pytest.raises(ValueError):
            util.str_to_int_list("20,abc")

    def test_int_list_empty(self):
        with pytest.raises(ValueError):
            util.str_to_int_list(" , ")

    def test_int_list_non_string(self):
        with pytest.raises(TypeError):
            util.str_to_int_list(20)

    def test_float_list(self):
        assert util.str_to_float_list("0.1,0.2,0.3") == [0.1, 0.2, 0.3]

    def test_float_list_invalid(self):
        with pytest.raises(ValueError):
            util.str_to_float_list("0.1;0.2")


class TestProbabilities:
    def test_check_probability_bounds(self):
        assert util.check_probability(0) == 0.0
        assert util.check_probability(1) == 1.0

    def test_check_probability_out_of_range(self):
        with pytest.raises(ValueError):
            util.check_probability(1.5)
        with pytest.raises(ValueError):
            util.check_probability(-0.1, "q")

    def test_log_threshold(self):
        '''8 ln(50) / 50 is about 0.626'''
        assert util.log_threshold_probability(8, 50) == pytest.approx(8 * math.log(50) / 50)
        assert util.log_threshold_probability(8, 50) == pytest.approx(0.626, abs=1e-3)

    def test_log_threshold_clipped(self):
        assert util.log_threshold_probability(100, 10) == 1.0

    def test_log_threshold_small_n(self):
        with pytest.raises(ValueError):
            util.log_threshold_probability(1, 1)


class TestBinomial:
    def test_binomial(self):
        assert util.binomial(20, 3) == 1140
        assert util.binomial(6, 2) == 15

    def test_binomial_out_of_range(self):
        assert util.binomial(3, 5) == 0
        assert util.binomial(4, -1) == 0
