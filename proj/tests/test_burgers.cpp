// Stack word reduction: exhaustive agreement with a brute-force reducer,
// hand-checked words, and the discrepancy-variance scaling exponent.
#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <map>

#include "disklab/burgers.hpp"

using namespace disklab;

namespace {

// Enumerate every word over the alphabet {H,C,h,c,F} of the given length.
void for_each_word(std::size_t len, const std::function<void(const std::string&)>& fn) {
    static const char alphabet[] = {'H', 'C', 'h', 'c', 'F'};
    std::string w(len, 'H');
    std::vector<std::size_t> idx(len, 0);
    for (;;) {
        fn(w);
        std::size_t p = 0;
        while (p < len) {
            if (++idx[p] < 5) {
                w[p] = alphabet[idx[p]];
                break;
            }
            idx[p] = 0;
            w[p] = alphabet[0];
            ++p;
        }
        if (p == len) break;
    }
}

std::pair<int, int> stack_counts(const std::string& w) {
    BurgerWord word;
    word.symbols = w;
    const auto tr = reduce_and_track(word);
    return {tr.C_path.back(), tr.D_path.back()};
}

}  // namespace

TEST_CASE("hand-checked words") {
    REQUIRE(stack_counts("Ch") == std::make_pair(0, -2));   // C on stack, h pending forever
    REQUIRE(stack_counts("Cc") == std::make_pair(0, 0));    // order fulfilled
    REQUIRE(stack_counts("Hh") == std::make_pair(0, 0));
    REQUIRE(stack_counts("CF") == std::make_pair(0, 0));    // F eats the freshest burger
    REQUIRE(stack_counts("HCF") == std::make_pair(1, 1));   // F eats C, H remains
    REQUIRE(stack_counts("CHF") == std::make_pair(1, -1));  // F eats H, C remains
    REQUIRE(stack_counts("hC") == std::make_pair(0, -2));   // pending h never eats later C... or H
    REQUIRE(stack_counts("FH") == std::make_pair(0, 1));    // pending F, then H on stack
}

TEST_CASE("exhaustive agreement with the brute-force reducer up to length 6") {
    for (std::size_t len = 1; len <= 6; ++len) {
        for_each_word(len, [&](const std::string& w) {
            const auto expect = brute_force_counts(w);
            const auto got = stack_counts(w);
            INFO("word " << w);
            REQUIRE(got == expect);
        });
    }
}

TEST_CASE("trajectory bookkeeping invariants") {
    const auto word = generate_word(0.3, 2000, 17);
    const auto tr = reduce_and_track(word);
    REQUIRE(tr.C_path.size() == word.symbols.size() + 1);
    REQUIRE(tr.C_path.front() == 0);
    REQUIRE(tr.D_path.front() == 0);
    for (std::size_t k = 1; k < tr.C_path.size(); ++k) {
        REQUIRE(std::abs(tr.C_path[k] - tr.C_path[k - 1]) <= 1);
        REQUIRE(std::abs(tr.D_path[k] - tr.D_path[k - 1]) <= 1);
    }
}

TEST_CASE("word generator frequencies") {
    const double p = 0.4;
    const auto word = generate_word(p, 200000, 23);
    std::map<char, double> freq;
    for (char s : word.symbols) freq[s] += 1.0 / static_cast<double>(word.symbols.size());
    REQUIRE(freq['H'] == Catch::Approx(0.25).margin(0.01));
    REQUIRE(freq['C'] == Catch::Approx(0.25).margin(0.01));
    REQUIRE(freq['h'] == Catch::Approx(0.25 * (1.0 - p)).margin(0.01));
    REQUIRE(freq['c'] == Catch::Approx(0.25 * (1.0 - p)).margin(0.01));
    REQUIRE(freq['F'] == Catch::Approx(0.5 * p).margin(0.01));
}

TEST_CASE("discrepancy variance exponent interpolates max(1-2p, 0)") {
    struct Case {
        double p, expect;
    };
    for (const Case c : {Case{0.0, 1.0}, Case{0.4, 0.2}}) {
        const auto est = scaling_estimates(c.p, 50000, 100, 31);
        INFO("p " << c.p << " alpha_hat " << est.alpha_hat);
        REQUIRE(std::abs(est.alpha_hat - c.expect) < 0.08);
    }
    REQUIRE_THROWS_AS(scaling_estimates(0.2, 100, 10, 1), ConfigError);
}
