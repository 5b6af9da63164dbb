#include "gisl/backend.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "gisl/rng.hpp"

namespace gisl {

std::string to_string(Slot s) {
    switch (s) {
        case Slot::Dep: return "dep";
        case Slot::Indep: return "indep";
        case Slot::Unusable: return "unusable";
    }
    return "unusable";
}

std::string PatternQuad::str() const {
    return "(" + to_string(t1) + ", " + to_string(t2) + ", " + to_string(t3) + ", " + to_string(t4) + ")";
}

PooledPairData build_pooled(const DataMatrix& d0, const DataMatrix& dk, const std::vector<std::string>& columns,
                            std::uint64_t seed) {
    if (d0.columns != dk.columns) throw std::invalid_argument("observational and perturbed data have different columns");
    if (dk.regime.is_observational()) throw std::invalid_argument("second matrix must be a perturbed regime");
    std::vector<std::size_t> cols;
    for (const auto& c : columns) cols.push_back(d0.require_column(c));

    auto pick = [&](std::size_t have, std::size_t cap, std::uint64_t salt) {
        std::vector<std::size_t> idx(have);
        std::iota(idx.begin(), idx.end(), 0);
        if (have > cap) {
            Rng rng(derive_seed(seed, {salt}));
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(cap);
            std::sort(idx.begin(), idx.end());
        }
        return idx;
    };
    std::size_t n0 = d0.rows(), nk = dk.rows();
    auto r0 = pick(n0, std::max<std::size_t>(3 * nk, 1), 0);
    auto rk = pick(nk, std::max<std::size_t>(3 * n0, 1), 1);

    PooledPairData out;
    out.columns = columns;
    auto total = static_cast<Eigen::Index>(r0.size() + rk.size());
    out.indicator.resize(total);
    out.values.resize(total, static_cast<Eigen::Index>(cols.size()));
    Eigen::Index row = 0;
    for (auto r : r0) {
        out.indicator(row) = 0.0;
        for (std::size_t c = 0; c < cols.size(); ++c) out.values(row, static_cast<Eigen::Index>(c)) = d0.values(r, cols[c]);
        ++row;
    }
    for (auto r : rk) {
        out.indicator(row) = 1.0;
        for (std::size_t c = 0; c < cols.size(); ++c) out.values(row, static_cast<Eigen::Index>(c)) = dk.values(r, cols[c]);
        ++row;
    }
    return out;
}

namespace {

Slot run_slot(CiBackend& b, std::size_t k, std::size_t j, std::vector<std::size_t> cond) {
    try {
        return b.indicator(k, j, cond).dependent ? Slot::Dep : Slot::Indep;
    } catch (const CiError&) {
        return Slot::Unusable;
    }
}

}  // namespace

PatternQuad test_quad(CiBackend& backend, std::size_t i, std::size_t j, const std::vector<std::size_t>& extra) {
    PatternQuad q;
    q.cond_used = extra;
    std::sort(q.cond_used.begin(), q.cond_used.end());
    auto with = [&](std::size_t v) {
        auto c = q.cond_used;
        c.push_back(v);
        std::sort(c.begin(), c.end());
        return c;
    };
    q.t1 = run_slot(backend, i, j, q.cond_used);
    q.t2 = run_slot(backend, i, j, with(i));
    q.t3 = run_slot(backend, j, i, q.cond_used);
    q.t4 = run_slot(backend, j, i, with(j));
    return q;
}

KernelBackend::KernelBackend(DataMatrix d0, std::map<std::string, DataMatrix> perturbed, KernelCiConfig cfg)
    : d0_(std::move(d0)), perturbed_(std::move(perturbed)), cfg_(cfg) {
    if (!d0_.regime.is_observational()) throw std::invalid_argument("first matrix must be observational");
    perturbed_by_index_.assign(d0_.cols(), nullptr);
    for (const auto& [label, m] : perturbed_) {
        if (m.columns != d0_.columns)
            throw std::invalid_argument("perturbed data for " + label + " has different columns");
        auto idx = d0_.column_index(label);
        if (!idx) throw std::invalid_argument("perturbation target " + label + " is not a column");
        perturbed_by_index_[*idx] = &m;
    }
}

bool KernelBackend::has_perturbation(std::size_t k) const {
    return k < perturbed_by_index_.size() && perturbed_by_index_[k] != nullptr;
}

std::vector<std::size_t> KernelBackend::sorted_by_name(std::vector<std::size_t> cond) const {
    std::sort(cond.begin(), cond.end(),
              [&](std::size_t a, std::size_t b) { return d0_.columns[a] < d0_.columns[b]; });
    return cond;
}

std::uint64_t KernelBackend::test_seed(int kind, std::size_t a, std::size_t b, const std::vector<std::size_t>& cond) const {
    std::string na = d0_.columns[a], nb = d0_.columns[b];
    if (kind == 0 && nb < na) std::swap(na, nb);
    std::string joined;
    for (auto c : sorted_by_name(cond)) joined += d0_.columns[c] + '\x1f';
    return derive_seed(cfg_.seed, {static_cast<std::uint64_t>(kind), hash_string(na), hash_string(nb), hash_string(joined)});
}

CiVerdict KernelBackend::lookup_or_run(const Key& key, const std::function<CiVerdict()>& run) {
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            if (!it->second.error.empty()) throw CiError(it->second.error);
            return it->second.verdict;
        }
    }
    Entry e;
    try {
        e.verdict = run();
    } catch (const CiError& err) {
        e.error = err.what();
    } catch (const std::invalid_argument& err) {
        e.error = err.what();
    }
    {
        std::lock_guard lock(mutex_);
        if (cache_.emplace(key, e).second) order_.push_back(key);
    }
    if (!e.error.empty()) throw CiError(e.error);
    return e.verdict;
}

CiVerdict KernelBackend::observational(std::size_t i, std::size_t j, const std::vector<std::size_t>& cond_in) {
    auto cond = sorted_by_name(cond_in);
    Key key{0, std::min(i, j), std::max(i, j), cond};
    std::sort(std::get<3>(key).begin(), std::get<3>(key).end());
    return lookup_or_run(key, [&] {
        KernelCiConfig c = cfg_;
        c.seed = test_seed(0, i, j, cond);
        std::vector<Column> z;
        for (auto k : cond) z.push_back(Column::real(d0_.values.col(static_cast<Eigen::Index>(k))));
        return conditional_test(Column::real(d0_.values.col(static_cast<Eigen::Index>(i))),
                                Column::real(d0_.values.col(static_cast<Eigen::Index>(j))), z, c);
    });
}

CiVerdict KernelBackend::indicator(std::size_t k, std::size_t j, const std::vector<std::size_t>& cond_in) {
    if (!has_perturbation(k)) throw CiError("no perturbation data for " + d0_.columns.at(k));
    auto cond = sorted_by_name(cond_in);
    Key key{1, k, j, cond};
    std::sort(std::get<3>(key).begin(), std::get<3>(key).end());
    return lookup_or_run(key, [&] {
        KernelCiConfig c = cfg_;
        c.seed = test_seed(1, k, j, cond);
        std::vector<std::string> cols{d0_.columns[j]};
        for (auto v : cond) cols.push_back(d0_.columns[v]);
        auto pooled = build_pooled(d0_, *perturbed_by_index_[k], cols, c.seed);
        std::vector<Column> z;
        for (std::size_t v = 1; v < cols.size(); ++v) z.push_back(Column::real(pooled.values.col(static_cast<Eigen::Index>(v))));
        return conditional_test(Column::indicator(pooled.indicator), Column::real(pooled.values.col(0)), z, c);
    });
}

std::vector<TestRecord> KernelBackend::records() const {
    std::lock_guard lock(mutex_);
    std::vector<TestRecord> out;
    for (const auto& key : order_) {
        const auto& [kind, a, b, cond] = key;
        const auto& e = cache_.at(key);
        TestRecord r;
        r.kind = kind == 0 ? "observational" : "indicator";
        r.a = kind == 0 ? d0_.columns[a] : "I_" + d0_.columns[a];
        r.b = d0_.columns[b];
        for (auto c : cond) r.cond.push_back(d0_.columns[c]);
        r.verdict = e.verdict;
        r.error = e.error;
        out.push_back(r);
    }
    return out;
}

std::size_t KernelBackend::tests_run() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

void KernelBackend::write_records_csv(const std::filesystem::path& path) const {
    std::ostringstream out;
    out << "kind,a,b,cond,statistic,p_value,dependent,n_used,error\n";
    for (const auto& r : records()) {
        std::string cond;
        for (std::size_t k = 0; k < r.cond.size(); ++k) cond += (k ? ";" : "") + r.cond[k];
        out << r.kind << ',' << r.a << ',' << r.b << ',' << cond << ',' << format_double(r.verdict.statistic) << ','
            << format_double(r.verdict.p_value) << ',' << (r.verdict.dependent ? 1 : 0) << ',' << r.verdict.n_used << ','
            << '"' << r.error << '"' << '\n';
    }
    write_file_atomic(path, out.str());
}

PatternQuad test_quad(const DataMatrix& d0, const DataMatrix& d_i, const DataMatrix& d_j, std::size_t i, std::size_t j,
                      const std::vector<std::size_t>& extra, const KernelCiConfig& cfg) {
    if (d_i.regime.target != d0.columns.at(i)) throw std::invalid_argument("d_i does not perturb variable i");
    if (d_j.regime.target != d0.columns.at(j)) throw std::invalid_argument("d_j does not perturb variable j");
    std::map<std::string, DataMatrix> pert{{d0.columns[i], d_i}, {d0.columns[j], d_j}};
    KernelBackend backend(d0, std::move(pert), cfg);
    return test_quad(backend, i, j, extra);
}

}  // namespace gisl
