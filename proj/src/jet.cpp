#include "finslernav/jet.hpp"

namespace finslernav {

namespace {

std::uint64_t pack(const std::array<std::uint8_t, MonomialTable::kMaxVars>& e) {
    std::uint64_t key = 0;
    for (int v = 0; v < MonomialTable::kMaxVars; ++v)
        key |= static_cast<std::uint64_t>(e[static_cast<std::size_t>(v)]) << (4 * v);
    return key;
}

void enumerate_degree(int nvars, int degree, int pos,
                      std::array<std::uint8_t, MonomialTable::kMaxVars>& current,
                      std::vector<std::array<std::uint8_t, MonomialTable::kMaxVars>>& out) {
    if (pos == nvars - 1) {
        current[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(degree);
        out.push_back(current);
        current[static_cast<std::size_t>(pos)] = 0;
        return;
    }
    for (int e = degree; e >= 0; --e) {
        current[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(e);
        enumerate_degree(nvars, degree - e, pos + 1, current, out);
    }
    current[static_cast<std::size_t>(pos)] = 0;
}

double multi_factorial(const std::array<std::uint8_t, MonomialTable::kMaxVars>& e) {
    double f = 1.0;
    for (int v = 0; v < MonomialTable::kMaxVars; ++v)
        for (int k = 2; k <= e[static_cast<std::size_t>(v)]; ++k) f *= k;
    return f;
}

} // namespace

MonomialTable::MonomialTable(int nvars, int order) : nvars_(nvars), order_(order) {
    assert(nvars >= 1 && nvars <= kMaxVars);
    assert(order >= 0 && order <= kMaxOrder);

    std::array<std::uint8_t, kMaxVars> current{};
    for (int d = 0; d <= order; ++d) enumerate_degree(nvars, d, 0, current, exps_);
    count_ = static_cast<int>(exps_.size());

    degree_.resize(static_cast<std::size_t>(count_));
    fact_.resize(static_cast<std::size_t>(count_));
    for (int i = 0; i < count_; ++i) {
        int deg = 0;
        for (int v = 0; v < nvars; ++v) deg += exps_[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)];
        degree_[static_cast<std::size_t>(i)] = deg;
        fact_[static_cast<std::size_t>(i)] = multi_factorial(exps_[static_cast<std::size_t>(i)]);
        lookup_[pack(exps_[static_cast<std::size_t>(i)])] = i;
    }

    var_idx_.resize(static_cast<std::size_t>(nvars), -1);
    if (order >= 1) {
        for (int v = 0; v < nvars; ++v) {
            std::array<std::uint8_t, kMaxVars> e{};
            e[static_cast<std::size_t>(v)] = 1;
            var_idx_[static_cast<std::size_t>(v)] = index_of(e);
        }
    }

    prod_.assign(static_cast<std::size_t>(count_) * count_, -1);
    for (int i = 0; i < count_; ++i) {
        for (int j = 0; j < count_; ++j) {
            if (degree_[static_cast<std::size_t>(i)] + degree_[static_cast<std::size_t>(j)] > order) continue;
            std::array<std::uint8_t, kMaxVars> sum{};
            for (int v = 0; v < nvars; ++v)
                sum[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(
                    exps_[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)] +
                    exps_[static_cast<std::size_t>(j)][static_cast<std::size_t>(v)]);
            prod_[static_cast<std::size_t>(i) * count_ + j] = index_of(sum);
        }
    }
}

int MonomialTable::index_of(const std::array<std::uint8_t, kMaxVars>& e) const {
    auto it = lookup_.find(pack(e));
    assert(it != lookup_.end());
    return it->second;
}

int MonomialTable::pair_index(int v, int w) const {
    std::array<std::uint8_t, kMaxVars> e{};
    e[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(e[static_cast<std::size_t>(v)] + 1);
    e[static_cast<std::size_t>(w)] = static_cast<std::uint8_t>(e[static_cast<std::size_t>(w)] + 1);
    return index_of(e);
}

int MonomialTable::triple_index(int u, int v, int w) const {
    std::array<std::uint8_t, kMaxVars> e{};
    e[static_cast<std::size_t>(u)] = static_cast<std::uint8_t>(e[static_cast<std::size_t>(u)] + 1);
    e[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(e[static_cast<std::size_t>(v)] + 1);
    e[static_cast<std::size_t>(w)] = static_cast<std::uint8_t>(e[static_cast<std::size_t>(w)] + 1);
    return index_of(e);
}

const MonomialTable& monomial_table(int nvars, int order) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<MonomialTable>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(nvars, order);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<MonomialTable>(nvars, order)).first;
    return *it->second;
}

} // namespace finslernav
