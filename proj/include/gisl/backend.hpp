#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "gisl/data.hpp"
#include "gisl/kernel_ci.hpp"

namespace gisl {

enum class Slot { Dep, Indep, Unusable };

std::string to_string(Slot s);

// t1 = I_i vs X_j, t2 = I_i vs X_j | X_i, t3 = I_j vs X_i, t4 = I_j vs X_i | X_j,
// each additionally conditioned on `cond_used`.
struct PatternQuad {
    Slot t1 = Slot::Unusable, t2 = Slot::Unusable, t3 = Slot::Unusable, t4 = Slot::Unusable;
    std::vector<std::size_t> cond_used;

    bool operator==(const PatternQuad&) const = default;
    std::string str() const;
};

struct PooledPairData {
    Eigen::VectorXd indicator;
    std::vector<std::string> columns;
    Eigen::MatrixXd values;
};

// Concatenates observational and perturbed rows over the named columns. A regime larger than
// three times the other is subsampled down to that ratio.
PooledPairData build_pooled(const DataMatrix& d0, const DataMatrix& dk, const std::vector<std::string>& columns,
                            std::uint64_t seed);

// Independence queries over variables indexed 0..num_variables()-1.
class CiBackend {
public:
    virtual ~CiBackend() = default;
    virtual const std::vector<std::string>& names() const = 0;
    virtual bool has_perturbation(std::size_t k) const = 0;
    // X_i vs X_j | cond on observational data. Throws CiError when the test cannot run.
    virtual CiVerdict observational(std::size_t i, std::size_t j, const std::vector<std::size_t>& cond) = 0;
    // I_k vs X_j | cond on observational data pooled with the data perturbing k.
    virtual CiVerdict indicator(std::size_t k, std::size_t j, const std::vector<std::size_t>& cond) = 0;

    std::size_t num_variables() const { return names().size(); }
};

PatternQuad test_quad(CiBackend& backend, std::size_t i, std::size_t j, const std::vector<std::size_t>& extra);

struct TestRecord {
    std::string kind;  // "observational" or "indicator"
    std::string a, b;
    std::vector<std::string> cond;
    CiVerdict verdict;
    std::string error;
};

class KernelBackend : public CiBackend {
public:
    KernelBackend(DataMatrix d0, std::map<std::string, DataMatrix> perturbed, KernelCiConfig cfg);
    KernelBackend(const KernelBackend&) = delete;
    KernelBackend& operator=(const KernelBackend&) = delete;

    const std::vector<std::string>& names() const override { return d0_.columns; }
    bool has_perturbation(std::size_t k) const override;
    CiVerdict observational(std::size_t i, std::size_t j, const std::vector<std::size_t>& cond) override;
    CiVerdict indicator(std::size_t k, std::size_t j, const std::vector<std::size_t>& cond) override;

    const KernelCiConfig& config() const { return cfg_; }
    std::vector<TestRecord> records() const;
    std::size_t tests_run() const;
    void write_records_csv(const std::filesystem::path& path) const;

private:
    using Key = std::tuple<int, std::size_t, std::size_t, std::vector<std::size_t>>;
    struct Entry {
        CiVerdict verdict;
        std::string error;
    };

    std::uint64_t test_seed(int kind, std::size_t a, std::size_t b, const std::vector<std::size_t>& cond) const;
    std::vector<std::size_t> sorted_by_name(std::vector<std::size_t> cond) const;
    CiVerdict lookup_or_run(const Key& key, const std::function<CiVerdict()>& run);

    DataMatrix d0_;
    std::vector<const DataMatrix*> perturbed_by_index_;
    std::map<std::string, DataMatrix> perturbed_;
    KernelCiConfig cfg_;
    mutable std::mutex mutex_;
    std::map<Key, Entry> cache_;
    std::vector<Key> order_;
};

// Convenience form over raw matrices; i and j index the columns of d0.
PatternQuad test_quad(const DataMatrix& d0, const DataMatrix& d_i, const DataMatrix& d_j, std::size_t i, std::size_t j,
                      const std::vector<std::size_t>& extra, const KernelCiConfig& cfg);

}  // namespace gisl
