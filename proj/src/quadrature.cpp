#include "magflow/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace magflow {

namespace {

template <typename Key, typename Make>
const GaussRule<double>& lookup(std::map<Key, std::unique_ptr<GaussRule<double>>>& cache,
                                std::mutex& mu, const Key& key, Make make) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<GaussRule<double>>(make())).first;
    return *it->second;
}

}  // namespace

const GaussRule<double>& cached_gauss_legendre(int n) {
    static std::map<int, std::unique_ptr<GaussRule<double>>> cache;
    static std::mutex mu;
    return lookup(cache, mu, n, [n] { return gauss_legendre<double>(n); });
}

const GaussRule<double>& cached_graded_legendre_0pi(int n) {
    static std::map<int, std::unique_ptr<GaussRule<double>>> cache;
    static std::mutex mu;
    return lookup(cache, mu, n,
                  [n] { return graded_legendre<double>(n, 0.0, std::numbers::pi); });
}

const GaussRule<double>& cached_gauss_laguerre(int n, double lambda) {
    static std::map<std::pair<int, double>, std::unique_ptr<GaussRule<double>>> cache;
    static std::mutex mu;
    return lookup(cache, mu, std::make_pair(n, lambda),
                  [n, lambda] { return gauss_laguerre<double>(n, lambda); });
}

}  // namespace magflow
