#include <doctest.h>

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "cascade/model.hpp"

using namespace cascade;

TEST_CASE("validation reports the first violated invariant") {
    CHECK_FALSE(validate(CascadeSpec::equal(4, 1.0)));
    CHECK(validate(CascadeSpec{0, {}})->kind == ErrorKind::ZeroLevels);
    CHECK(validate(CascadeSpec{2, {1.0}})->kind == ErrorKind::RateCountMismatch);
    CHECK(validate(CascadeSpec{2, {1.0, 0.0}})->kind == ErrorKind::NonPositiveRate);
    CHECK(validate(CascadeSpec{2, {1.0, -3.0}})->kind == ErrorKind::NonPositiveRate);
    CHECK(validate(CascadeSpec{2, {1.0, std::numeric_limits<double>::infinity()}})->kind ==
          ErrorKind::NonFiniteRate);
    CHECK(validate(CascadeSpec{2, {std::nan(""), 1.0}})->kind == ErrorKind::NonFiniteRate);
    CHECK_THROWS_AS(require_valid(CascadeSpec{0, {}}), CascadeError);
}

TEST_CASE("equal-rate detection is relative") {
    CHECK(CascadeSpec::equal(5, 3.0).is_equal_rate());
    CHECK(CascadeSpec{2, {1e6, 1e6 * (1 + 1e-14)}}.is_equal_rate());
    CHECK_FALSE(CascadeSpec{2, {1.0, 1.0 + 1e-9}}.is_equal_rate());
    CHECK(CascadeSpec{3, {1.0, 2.0, 3.0}}.mean_rate() == doctest::Approx(2.0));
    CHECK(CascadeSpec{3, {1.0, 2.0, 3.0}}.max_rate() == 3.0);
}

TEST_CASE("indices wrap modulo N") {
    CHECK(wrap(-1, 6) == 5);
    CHECK(wrap(13, 6) == 1);
    CHECK(wrap(-13, 6) == 5);
    CHECK(TransitionIndex(7, 6).value() == 1);
    CHECK((TransitionIndex(0, 6) - 1).value() == 5);
    CHECK((TransitionIndex(5, 6) + 2) == TransitionIndex(1, 6));
}

TEST_CASE("trace class is (n - m + 1) mod N") {
    CHECK(trace_index(1, 1, 6) == 1);
    CHECK(trace_index(2, 1, 6) == 0);
    CHECK(trace_index(1, 2, 6) == 2);
    CHECK(trace_index(0, 5, 6) == 0);
    for (int m = 0; m < 7; ++m)
        for (int n = 0; n < 7; ++n) {
            CHECK(trace_index(m + 1, n + 1, 7) == trace_index(m, n, 7));
            CHECK(trace_index(TransitionIndex(m, 7), TransitionIndex(n, 7)).value() == trace_index(m, n, 7));
        }
}

TEST_CASE("subsets are sorted sets of valid labels") {
    SubsetSpec s({4, 1, 2}, 6);
    CHECK(s.members() == std::vector<int>{1, 2, 4});
    CHECK(s.size() == 3);
    CHECK(s.contains(4));
    CHECK_FALSE(s.contains(3));
    CHECK_THROWS_AS(SubsetSpec({}, 6), CascadeError);
    CHECK_THROWS_AS(SubsetSpec({1, 1}, 6), CascadeError);
    CHECK_THROWS_AS(SubsetSpec({6}, 6), CascadeError);
    try {
        SubsetSpec({}, 3);
    } catch (const CascadeError& e) {
        CHECK(e.kind() == ErrorKind::EmptySubset);
    }
}

TEST_CASE("spec JSON round trip") {
    const CascadeSpec spec{3, {1.0, 0.025, 1.1}};
    const nlohmann::json j = spec;
    CHECK(parse_spec_json(j.dump()) == spec);
    CHECK_THROWS_AS(parse_spec_json("{\"n_levels\": 2}"), CascadeError);
    CHECK_THROWS_AS(parse_spec_json("{\"n_levels\": 2, \"rates\": [1, -1]}"), CascadeError);
    CHECK_THROWS_AS(parse_spec_json("not json"), CascadeError);
    CHECK_THROWS_AS(load_spec("/nonexistent/spec.json"), CascadeError);
}

TEST_CASE("stream checks catch broken cycling and spread") {
    EventStream s;
    s.n_levels = 3;
    s.channels = {{0.3}, {0.2}, {0.1, 0.4}};
    CHECK(check_stream(s).ok());
    CHECK(merged_events(s).size() == 4);
    s.channels = {{0.3}, {0.2}, {0.1, 0.25}};
    const auto bad = check_stream(s);
    CHECK(bad.cycling_breaks > 0);
    s.channels = {{}, {}, {0.1, 0.2}};
    CHECK(check_stream(s).count_spread == 2);
}

TEST_CASE("trace invariants") {
    CorrelationTrace t;
    t.tau = {0.0, 1.0};
    t.g2 = {0.5, 1.0};
    CHECK_NOTHROW(check_trace(t));
    t.g2 = {-0.5, 1.0};
    CHECK_THROWS(check_trace(t));
    t.g2 = {0.5};
    CHECK_THROWS(check_trace(t));
}
