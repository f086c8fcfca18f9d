#include "cpsmine/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cpsmine/hina.hpp"
#include "cpsmine/stats.hpp"

namespace cpsmine::oracle {

namespace {

std::string pattern_to_string(const std::vector<int>& items) {
    std::string s = "<";
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(items[i]);
    }
    return s + ">";
}

std::string db_to_string(const std::vector<ItemSequence>& db) {
    std::string s = "{";
    for (size_t i = 0; i < db.size(); ++i) {
        if (i) s += "; ";
        s += pattern_to_string(db[i]);
    }
    return s + "}";
}

}  // namespace

std::vector<MinedPattern> spm_bruteforce(const std::vector<ItemSequence>& db, int threshold) {
    std::map<std::vector<int>, int> support;
    for (const auto& seq : db) {
        std::set<std::vector<int>> distinct;
        const size_t len = seq.size();
        for (uint32_t mask = 1; mask < (1u << len); ++mask) {
            std::vector<int> sub;
            sub.reserve(static_cast<size_t>(std::popcount(mask)));
            for (size_t i = 0; i < len; ++i)
                if (mask & (1u << i)) sub.push_back(seq[i]);
            distinct.insert(std::move(sub));
        }
        for (const auto& sub : distinct) ++support[sub];
    }
    std::vector<MinedPattern> out;
    for (const auto& [items, count] : support)
        if (count >= threshold) out.push_back(MinedPattern{items, count});
    std::stable_sort(out.begin(), out.end(), [](const MinedPattern& a, const MinedPattern& b) {
        if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
        return a.items < b.items;
    });
    return out;
}

double mwu_enumeration_p(std::span<const double> a, std::span<const double> b) {
    const int n_a = static_cast<int>(a.size());
    const int n = n_a + static_cast<int>(b.size());

    // observed U from ranks (tie-free, so plain ordering suffices)
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    int64_t rank_sum_a = 0;
    for (int i = 0; i < n_a; ++i) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), a[static_cast<size_t>(i)]);
        rank_sum_a += (it - sorted.begin()) + 1;
    }
    const int64_t u_obs = rank_sum_a - static_cast<int64_t>(n_a) * (n_a + 1) / 2;

    uint64_t total = 0, at_most = 0, at_least = 0;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != n_a) continue;
        int64_t rs = 0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) rs += i + 1;
        int64_t u = rs - static_cast<int64_t>(n_a) * (n_a + 1) / 2;
        ++total;
        if (u <= u_obs) ++at_most;
        if (u >= u_obs) ++at_least;
    }
    double one_sided =
        static_cast<double>(std::min(at_most, at_least)) / static_cast<double>(total);
    return std::min(1.0, 2.0 * one_sided);
}

double binomial_pmf_direct(int64_t n, double p, int64_t k) {
    if (k < 0 || k > n) return 0.0;
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    double log_mass = std::lgamma(static_cast<double>(n) + 1) -
                      std::lgamma(static_cast<double>(k) + 1) -
                      std::lgamma(static_cast<double>(n - k) + 1) +
                      static_cast<double>(k) * std::log(p) +
                      static_cast<double>(n - k) * std::log1p(-p);
    return std::exp(log_mass);
}

int64_t binomial_quantile_direct(int64_t n, double p, double conf) {
    double cum = 0;
    for (int64_t q = 0; q <= n; ++q) {
        cum += binomial_pmf_direct(n, p, q);
        if (cum >= conf) return q;
    }
    return n;
}

double binomial_sf_direct(int64_t n, double p, int64_t w) {
    if (w <= 0) return 1.0;
    double tail = 0;
    for (int64_t k = n; k >= w; --k) tail += binomial_pmf_direct(n, p, k);
    return std::min(tail, 1.0);
}

SuiteResult run_spm_suite(int trials, uint64_t seed) {
    SuiteResult result;
    std::mt19937_64 rng(seed);
    const int alphabet = 5;
    const double supports[2] = {0.25, 0.5};

    for (int t = 0; t < trials; ++t) {
        int n_seqs = 1 + static_cast<int>(rng() % 8);
        std::vector<ItemSequence> db;
        db.reserve(static_cast<size_t>(n_seqs));
        for (int i = 0; i < n_seqs; ++i) {
            int len = 1 + static_cast<int>(rng() % 8);
            ItemSequence s;
            s.reserve(static_cast<size_t>(len));
            for (int j = 0; j < len; ++j) s.push_back(static_cast<int>(rng() % alphabet));
            db.push_back(std::move(s));
        }
        double ms = supports[t % 2];
        ++result.trials;

        auto mined = prefix_span(db, ms);
        auto expected = spm_bruteforce(db, support_threshold(ms, n_seqs));
        bool match = mined.size() == expected.size();
        for (size_t i = 0; match && i < mined.size(); ++i)
            match = mined[i].items == expected[i].items && mined[i].support == expected[i].support;
        if (!match) {
            ++result.failures;
            if (result.first_counterexample.empty()) {
                std::ostringstream os;
                os << "trial " << t << " min_support " << ms << " db " << db_to_string(db)
                   << ": prefix_span " << mined.size() << " patterns, brute force "
                   << expected.size();
                result.first_counterexample = os.str();
            }
        }
    }
    return result;
}

SuiteResult run_mwu_suite(int trials, uint64_t seed) {
    SuiteResult result;
    std::mt19937_64 rng(seed);

    auto check = [&](const std::vector<double>& a, const std::vector<double>& b,
                     const char* what) {
        ++result.trials;
        auto r = mann_whitney(a, b);
        bool ok = true;
        std::ostringstream why;
        if (r.u_a + r.u_b != static_cast<double>(a.size()) * static_cast<double>(b.size())) {
            ok = false;
            why << "U_A + U_B != n_a*n_b";
        } else if (r.method == "exact") {
            double expected = mwu_enumeration_p(a, b);
            if (r.p_value != expected) {
                ok = false;
                why << "exact p " << r.p_value << " != enumeration " << expected;
            }
        }
        if (!ok) {
            ++result.failures;
            if (result.first_counterexample.empty())
                result.first_counterexample = std::string(what) + ": " + why.str();
        }
    };

    // exhaustive tie-free fixtures: every split shape and every rank
    // assignment with pooled size up to 10
    for (int n = 2; n <= 10; ++n) {
        for (int n_a = 1; n_a < n; ++n_a) {
            for (uint32_t mask = 0; mask < (1u << n); ++mask) {
                if (std::popcount(mask) != n_a) continue;
                std::vector<double> a, b;
                for (int i = 0; i < n; ++i)
                    ((mask >> i) & 1u ? a : b).push_back(static_cast<double>(i + 1));
                check(a, b, "exact-vs-enumeration");
            }
        }
    }

    // approximation quality at n_a = n_b = 6: forced normal path vs exact
    for (int t = 0; t < trials; ++t) {
        std::vector<double> vals(12);
        std::set<int64_t> used;
        for (auto& v : vals) {
            int64_t x;
            do {
                x = static_cast<int64_t>(rng() % 100000);
            } while (!used.insert(x).second);
            v = static_cast<double>(x);
        }
        std::vector<double> a(vals.begin(), vals.begin() + 6), b(vals.begin() + 6, vals.end());
        ++result.trials;
        auto exact = mann_whitney(a, b);  // pooled 12, tie-free -> exact path
        auto approx = mann_whitney_approx(a, b);
        bool ok = exact.method == "exact" && approx.method == "normal-approximation" &&
                  std::abs(exact.p_value - approx.p_value) <= 0.01 &&
                  exact.p_value == mwu_enumeration_p(a, b);
        if (!ok) {
            ++result.failures;
            if (result.first_counterexample.empty()) {
                std::ostringstream os;
                os << "n=6/6 U=" << exact.u_a << ": exact " << exact.p_value << " approx "
                   << approx.p_value;
                result.first_counterexample = os.str();
            }
        }
    }
    return result;
}

SuiteResult run_binomial_suite(int trials, uint64_t seed) {
    SuiteResult result;
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        ++result.trials;
        int64_t w_total = 1 + static_cast<int64_t>(rng() % 10000);
        int64_t cells = 1 + static_cast<int64_t>(rng() % 256);
        double p = 1.0 / static_cast<double>(cells);

        int64_t q_impl = binomial_upper_quantile(w_total, p, 0.95);
        int64_t q_direct = binomial_quantile_direct(w_total, p, 0.95);
        bool ok = q_impl == q_direct;
        std::string why = ok ? "" : "quantile mismatch";

        if (ok) {
            double prev = 2.0;
            int64_t hi = std::min<int64_t>(w_total, q_impl + 50);
            for (int64_t w = std::max<int64_t>(0, q_impl - 50); w <= hi; ++w) {
                double sf = binomial_sf(w_total, p, w);
                double sf_direct = binomial_sf_direct(w_total, p, w);
                if (sf > prev) {
                    ok = false;
                    why = "p_value not non-increasing";
                    break;
                }
                if (std::abs(sf - sf_direct) > 1e-9) {
                    ok = false;
                    why = "tail mismatch vs direct summation";
                    break;
                }
                prev = sf;
            }
        }
        if (!ok) {
            ++result.failures;
            if (result.first_counterexample.empty()) {
                std::ostringstream os;
                os << "W=" << w_total << " K=" << cells << ": " << why;
                result.first_counterexample = os.str();
            }
        }
    }
    return result;
}

}  // namespace cpsmine::oracle
