#include "hdcast/indices.hpp"
#include "hdcast/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace hdcast;

namespace {

ingest::WeeklySeries weeks(std::initializer_list<std::array<long, 3>> rows) {
    ingest::WeeklySeries s;
    int week = 1;
    for (const auto &r : rows) s.records.push_back({2011, week++, r[0], r[1], r[2], 0, 0, true});
    return s;
}

} // namespace

TEST_CASE("indices from a Table 1 row") {
    const auto idx = indices::compute_indices(weeks({{11672, 58, 15850}}));
    CHECK(idx.rows[0].hdi == doctest::Approx(0.0036593).epsilon(1e-4));
    CHECK(idx.rows[0].si == doctest::Approx(0.73640).epsilon(1e-4));
    CHECK(idx.rows[0].hdi == 58.0 / 15850.0);
    CHECK(idx.rows[0].hdi_sqrt == std::sqrt(58.0 / 15850.0));
}

TEST_CASE("zero sales and zero stock") {
    const auto idx = indices::compute_indices(weeks({{10, 0, 100}}));
    CHECK(idx.rows[0].hdi == 0.0);
    CHECK(idx.rows[0].hdi_sqrt == 0.0);
    try {
        indices::compute_indices(weeks({{10, 1, 100}, {10, 0, 0}}));
        FAIL("expected an error");
    } catch (const DataError &e) {
        CHECK(std::string(e.what()).find("2011") != std::string::npos);
    }
}

TEST_CASE("inverse transform") {
    CHECK(indices::inverse_transform(0.5) == 0.25);
    CHECK(indices::inverse_transform(0.0) == 0.0);
    CHECK_THROWS_AS(indices::inverse_transform(-0.1), std::invalid_argument);
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform();
        CHECK(std::abs(indices::inverse_transform(std::sqrt(x)) - x) < 1e-12);
    }
}

TEST_CASE("price elasticity") {
    CHECK(indices::price_elasticity(0.10, 0.05) == doctest::Approx(2.0));
    CHECK(indices::price_elasticity(0.0, 0.05) == 0.0);
    CHECK(indices::price_elasticity(0.37, 0.37) == 1.0);
    CHECK_THROWS_AS(indices::price_elasticity(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("index invariants") {
    Rng rng(11);
    ingest::WeeklySeries s;
    for (int w = 1; w <= 52; ++w) {
        const long om = 100 + static_cast<long>(rng.index(900));
        const long sold = static_cast<long>(rng.index(static_cast<std::uint64_t>(om)));
        const long show = sold + static_cast<long>(rng.index(500));
        s.records.push_back({2012, w, show, sold, om, 0, 0, true});
    }
    const auto idx = indices::compute_indices(s);
    ingest::WeeklySeries scaled = s;
    for (auto &r : scaled.records) {
        r.sold *= 3;
        r.on_market *= 3;
    }
    const auto idx3 = indices::compute_indices(scaled);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        CHECK(idx.rows[i].hdi <= idx.rows[i].si);
        CHECK(std::abs(idx.rows[i].hdi_sqrt * idx.rows[i].hdi_sqrt - idx.rows[i].hdi) < 1e-12);
        CHECK(idx3.rows[i].hdi == doctest::Approx(idx.rows[i].hdi).epsilon(1e-14));
        for (std::size_t j = 0; j < idx.size(); ++j) {
            CHECK((idx.rows[i].hdi < idx.rows[j].hdi) == (idx.rows[i].hdi_sqrt < idx.rows[j].hdi_sqrt));
        }
    }
    const auto csv = indices::format_index_csv(idx);
    CHECK(csv.starts_with("year,week,hdi,si,hdi_sqrt\n"));
}
