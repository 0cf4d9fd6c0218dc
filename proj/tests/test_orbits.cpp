#include "collatzlab/det.hpp"
#include "collatzlab/errors.hpp"
#include "collatzlab/orbits.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <set>

using namespace collatzlab;

TEST_CASE("truncated map") {
    const TruncatedCollatzMap f(10);
    CHECK(f.successor(1) == 2);
    CHECK(f.successor(3) == 5);
    CHECK(f.successor(8) == 4);
    CHECK_FALSE(f.successor(7).has_value());  // 11 > 10
    CHECK(f.successor(9) == std::nullopt);
}

TEST_CASE("only the trivial cycle appears") {
    CHECK(cycles(2) == std::vector<std::vector<Index>>{{1, 2}});
    CHECK(cycles(5) == std::vector<std::vector<Index>>{{1, 2}});
    CHECK(cycles(300) == std::vector<std::vector<Index>>{{1, 2}});
}

TEST_CASE("cycles agree with exhaustive iteration") {
    for (Index k = 2; k <= 400; ++k) {
        std::set<std::set<Index>> got;
        for (const auto& c : cycles(k)) {
            CHECK(c.front() == *std::min_element(c.begin(), c.end()));
            got.insert(std::set<Index>(c.begin(), c.end()));
        }
        CAPTURE(k);
        CHECK(got == oracle::cycle_sets(k));
    }
}

TEST_CASE("inverse preimages") {
    CHECK(inverse_preimages(5, 8) == std::vector<Index>{3});
    CHECK(inverse_preimages(2, 8) == std::vector<Index>{1, 4});
    CHECK(inverse_preimages(3, 8) == std::vector<Index>{6});
    CHECK(inverse_preimages(6, 8).empty());
    CHECK_THROWS_AS(inverse_preimages(0, 8), OutOfRange);
    CHECK_THROWS_AS(inverse_preimages(8, 8), OutOfRange);
}

TEST_CASE("preimages are exactly the rows of M~ holding an x in that column") {
    for (Index k = 8; k <= 400; k += 6) {
        const CollatzMatrix t = build_m_tilde(k);
        const Index r = special_row(k);
        for (Index v = 1; v < k; ++v) {
            std::vector<Index> rows;
            for (Index i = 1; i < k; ++i) {
                if (i != r && t.at(i, v) == Cell::X) rows.push_back(i);
            }
            CAPTURE(k);
            CAPTURE(v);
            CHECK(inverse_preimages(v, k) == rows);
        }
        // Column k/2: the diagonal 1 and the special row only.
        std::vector<Index> col;
        for (Index i = 1; i < k; ++i) {
            if (t.at(i, k / 2) != Cell::Zero) col.push_back(i);
        }
        CHECK(col == std::vector<Index>{std::min(k / 2, r), std::max(k / 2, r)});
    }
}

TEST_CASE("decision for k = 8") {
    const OrbitDecision d = decide_mtilde_zero(8);
    CHECK(d.status == OrbitStatus::ZeroCertified);
    REQUIRE(d.trace.size() == 4);
    CHECK(d.trace[0].value == 4);
    CHECK(d.trace[1].value == 5);
    CHECK(d.trace[2].value == 3);
    CHECK(d.trace[3].value == 6);
    CHECK(d.trace[3].fate == StepFate::DeadEnd);
    CHECK(render_trace(d, false) == std::vector<std::string>{"4 → 5 → 3 → 6 → ✕"});
    CHECK(render_trace(d) == std::vector<std::string>{"4 → 5 [tri] → 3 [tri] → 6 [double] → ✕"});
    CHECK_FALSE(d.cycle.has_value());
}

TEST_CASE("members of the k = 8 + 54l family") {
    for (Index k : {98, 152, 206}) {
        CAPTURE(k);
        CHECK(decide_mtilde_zero(k).status == OrbitStatus::ZeroCertified);
    }
}

TEST_CASE("degenerate k = 2 closes a cycle") {
    const OrbitDecision d = decide_mtilde_zero(2);
    CHECK(d.status == OrbitStatus::CycleFound);
    REQUIRE(d.cycle.has_value());
    CHECK(*d.cycle == std::vector<Index>{1});
    const auto perm = cycle_permutation(d);
    CHECK(perm == std::vector<Index>{1});
    CHECK(det_fraction_free(build_m_tilde(2)).value == Poly::x());
}

TEST_CASE("not applicable") {
    CHECK_THROWS_AS(decide_mtilde_zero(12), NotApplicable);
    CHECK_THROWS_AS(decide_mtilde_zero(9), NotApplicable);
    CHECK_THROWS_AS(decide_mtilde_zero(5), NotApplicable);
}

TEST_CASE("node budget makes the search inconclusive") {
    const OrbitDecision d = decide_mtilde_zero(8, 2);
    CHECK(d.status == OrbitStatus::Inconclusive);
    CHECK(d.nodes <= 2);
}

TEST_CASE("search agrees with forward iteration for every applicable k <= 20000") {
    for (Index k = 8; k <= 20000; k += 6) {
        const OrbitDecision d = decide_mtilde_zero(k);
        CAPTURE(k);
        CHECK(d.status == (oracle::mtilde_has_cycle(k) ? OrbitStatus::CycleFound : OrbitStatus::ZeroCertified));
        REQUIRE(d.trace.size() >= 2);
        CHECK(d.trace[0].value == k / 2);
        CHECK(d.trace[1].value == special_row(k));
        for (const TraceStep& s : d.trace) {
            CHECK(s.value >= 1);
            CHECK(s.value <= k - 1);
        }
    }
}

TEST_CASE("zero certificate implies a vanishing determinant") {
    for (Index k = 8; k <= 300; k += 6) {
        CAPTURE(k);
        if (decide_mtilde_zero(k).status == OrbitStatus::ZeroCertified) {
            CHECK(det_fraction_free(build_m_tilde(k)).value.is_zero());
        }
    }
}
