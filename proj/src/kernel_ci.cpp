#include "gisl/kernel_ci.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "gisl/rng.hpp"

namespace gisl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

bool is_constant(const VectorXd& v) {
    return v.size() == 0 || (v.array() == v(0)).all();
}

VectorXd standardize(const VectorXd& v) {
    double mu = v.mean();
    VectorXd c = v.array() - mu;
    double sd = std::sqrt(c.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(1, v.size() - 1)));
    return sd > 0 ? VectorXd(c / sd) : c;
}

// Pivoted incomplete Cholesky of a unit-diagonal kernel given column access.
template <class KernelColumn>
MatrixXd incomplete_cholesky(Eigen::Index n, KernelColumn&& column, std::size_t max_rank, double tol) {
    auto cap = std::min<Eigen::Index>(static_cast<Eigen::Index>(max_rank), n);
    MatrixXd g(n, cap);
    VectorXd diag = VectorXd::Ones(n);
    VectorXd col(n);
    Eigen::Index rank = 0;
    for (; rank < cap; ++rank) {
        Eigen::Index pivot;
        double best = diag.maxCoeff(&pivot);
        if (best <= tol) break;
        column(pivot, col);
        if (rank > 0) col.noalias() -= g.leftCols(rank) * g.row(pivot).head(rank).transpose();
        double root = std::sqrt(best);
        col /= root;
        col(pivot) = root;
        g.col(rank) = col;
        diag -= col.cwiseAbs2();
        diag(pivot) = 0.0;
        diag = diag.cwiseMax(0.0);
    }
    return g.leftCols(rank);
}

MatrixXd one_hot(const VectorXd& v) {
    std::vector<double> levels(v.data(), v.data() + v.size());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    MatrixXd g = MatrixXd::Zero(v.size(), static_cast<Eigen::Index>(levels.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        auto k = std::lower_bound(levels.begin(), levels.end(), v(i)) - levels.begin();
        g(i, k) = 1.0;
    }
    return g;
}

void center_rows(MatrixXd& g) {
    if (g.cols() == 0) return;
    Eigen::RowVectorXd mu = g.colwise().mean();
    g.rowwise() -= mu;
}

// Lexicographic order used to make the statistic symmetric in its arguments.
bool canonical_less(const Column& a, const Column& b) {
    if (a.binary != b.binary) return !a.binary;
    return std::lexicographical_compare(a.values.data(), a.values.data() + a.values.size(), b.values.data(),
                                        b.values.data() + b.values.size());
}

std::vector<Eigen::Index> subsample_rows(Eigen::Index n, const KernelCiConfig& cfg) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    auto cap = static_cast<Eigen::Index>(cfg.n_max);
    if (n <= cap) return idx;
    Rng rng(derive_seed(cfg.seed, {0x55, static_cast<std::uint64_t>(n)}));
    for (Eigen::Index i = 0; i < cap; ++i) {
        auto j = std::uniform_int_distribution<Eigen::Index>(i, n - 1)(rng);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(cap));
    std::sort(idx.begin(), idx.end());
    return idx;
}

Column take(const Column& c, const std::vector<Eigen::Index>& rows) {
    Column out{VectorXd(static_cast<Eigen::Index>(rows.size())), c.binary};
    for (std::size_t r = 0; r < rows.size(); ++r) out.values(static_cast<Eigen::Index>(r)) = c.values(rows[r]);
    if (!out.binary) out.values = standardize(out.values);
    return out;
}

MatrixXd factor_gaussian_block(const MatrixXd& data, const KernelCiConfig& cfg) {
    double bw = median_bandwidth(data, cfg.bandwidth_rows, cfg.seed);
    return gaussian_factor(data, bw, cfg.max_rank, cfg.cholesky_tol);
}

MatrixXd factor_column(const Column& c, const KernelCiConfig& cfg) {
    if (c.binary) return one_hot(c.values);
    return factor_gaussian_block(c.values, cfg);
}

double gamma_pvalue(double stat, double mean, double var) {
    if (!(mean > 0) || !(var > 0)) return 1.0;
    double shape = mean * mean / var;
    double scale = var / mean;
    if (stat <= 0) return 1.0;
    double p = boost::math::gamma_q(shape, stat / scale);
    return std::clamp(p, 0.0, 1.0);
}

CiVerdict finish(double stat, double p, std::size_t n, const KernelCiConfig& cfg) {
    CiVerdict v;
    v.statistic = stat;
    v.p_value = p;
    v.alpha = cfg.alpha;
    v.dependent = p < cfg.alpha;
    v.n_used = n;
    return v;
}

CiVerdict zero_variance(std::size_t n, const KernelCiConfig& cfg) {
    CiVerdict v = finish(0.0, 1.0, n, cfg);
    v.note = CiNote::ZeroVariance;
    return v;
}

double permutation_pvalue(const MatrixXd& a, const MatrixXd& b, double stat, const KernelCiConfig& cfg) {
    Rng rng(derive_seed(cfg.seed, {0x77}));
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(b.rows()));
    std::iota(perm.begin(), perm.end(), 0);
    MatrixXd bp(b.rows(), b.cols());
    std::size_t hits = 0;
    for (std::size_t k = 0; k < cfg.permutations; ++k) {
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t r = 0; r < perm.size(); ++r) bp.row(static_cast<Eigen::Index>(r)) = b.row(perm[r]);
        if ((a.transpose() * bp).squaredNorm() >= stat) ++hits;
    }
    return static_cast<double>(1 + hits) / static_cast<double>(1 + cfg.permutations);
}

}  // namespace

double median_bandwidth(const MatrixXd& data, std::size_t max_rows, std::uint64_t seed) {
    Eigen::Index n = data.rows();
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), 0);
    if (static_cast<std::size_t>(n) > max_rows) {
        Rng rng(derive_seed(seed, {0xbd}));
        std::shuffle(rows.begin(), rows.end(), rng);
        rows.resize(max_rows);
    }
    std::vector<double> d;
    d.reserve(rows.size() * (rows.size() - 1) / 2);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j)
            d.push_back((data.row(rows[i]) - data.row(rows[j])).squaredNorm());
    if (d.empty()) return 1.0;
    auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    double med = std::sqrt(*mid);
    return med > 0 ? med : 1.0;
}

MatrixXd gaussian_factor(const MatrixXd& data, double bandwidth, std::size_t max_rank, double tol) {
    const double gamma = 1.0 / (2.0 * bandwidth * bandwidth);
    Eigen::Index n = data.rows();
    return incomplete_cholesky(
        n,
        [&](Eigen::Index p, VectorXd& col) {
            col = (-gamma * (data.rowwise() - data.row(p)).rowwise().squaredNorm()).array().exp();
        },
        max_rank, tol);
}

CiVerdict unconditional_test(const Column& x_in, const Column& y_in, const KernelCiConfig& cfg) {
    if (x_in.values.size() != y_in.values.size()) throw std::invalid_argument("columns differ in length");
    if (x_in.values.size() < 30) throw InsufficientSamples("unconditional test needs at least 30 rows");
    bool swap = canonical_less(y_in, x_in);
    const Column& x0 = swap ? y_in : x_in;
    const Column& y0 = swap ? x_in : y_in;
    auto rows = subsample_rows(x0.values.size(), cfg);
    const std::size_t n = rows.size();
    Column x = take(x0, rows), y = take(y0, rows);
    if (is_constant(x.values) || is_constant(y.values)) return zero_variance(n, cfg);

    MatrixXd a = factor_column(x, cfg);
    MatrixXd b = factor_column(y, cfg);
    center_rows(a);
    center_rows(b);
    double stat = (a.transpose() * b).squaredNorm();
    double nd = static_cast<double>(n);
    double p;
    if (cfg.null_mode == NullMode::Permutation) {
        p = permutation_pvalue(a, b, stat, cfg);
    } else {
        double mean = a.squaredNorm() * b.squaredNorm() / nd;
        double var = 2.0 * (a.transpose() * a).squaredNorm() * (b.transpose() * b).squaredNorm() / (nd * nd);
        p = gamma_pvalue(stat, mean, var);
    }
    return finish(stat, p, n, cfg);
}

CiVerdict conditional_test(const Column& x_in, const Column& y_in, const std::vector<Column>& z_in,
                           const KernelCiConfig& cfg) {
    const auto len = x_in.values.size();
    if (y_in.values.size() != len) throw std::invalid_argument("columns differ in length");
    for (const auto& c : z_in)
        if (c.values.size() != len) throw std::invalid_argument("conditioning columns differ in length");
    if (z_in.empty()) return unconditional_test(x_in, y_in, cfg);
    if (len < 50) throw InsufficientSamples("conditional test needs at least 50 rows");

    bool swap = canonical_less(y_in, x_in);
    const Column& x0 = swap ? y_in : x_in;
    const Column& y0 = swap ? x_in : y_in;
    auto rows = subsample_rows(len, cfg);
    const auto n = static_cast<Eigen::Index>(rows.size());
    Column x = take(x0, rows), y = take(y0, rows);
    if (is_constant(x.values) || is_constant(y.values)) return zero_variance(rows.size(), cfg);

    std::vector<Column> zs;
    for (const auto& c : z_in) {
        Column t = take(c, rows);
        if (!is_constant(t.values)) zs.push_back(std::move(t));
    }
    if (zs.empty()) {
        KernelCiConfig c2 = cfg;
        c2.n_max = rows.size();
        return unconditional_test(x, y, c2);
    }
    // Binary conditioning columns enter the Gaussian block like real ones.
    MatrixXd z(n, static_cast<Eigen::Index>(zs.size()));
    for (std::size_t k = 0; k < zs.size(); ++k) z.col(static_cast<Eigen::Index>(k)) = zs[k].values;

    MatrixXd gz = factor_gaussian_block(z, cfg);
    center_rows(gz);

    // x-side kernel is on (x, z/2).
    MatrixXd gx;
    if (x.binary) {
        MatrixXd zh = 0.5 * z;
        double bw = median_bandwidth(zh, cfg.bandwidth_rows, cfg.seed);
        const double gamma = 1.0 / (2.0 * bw * bw);
        gx = incomplete_cholesky(
            n,
            [&](Eigen::Index p, VectorXd& col) {
                col = (-gamma * (zh.rowwise() - zh.row(p)).rowwise().squaredNorm()).array().exp();
                for (Eigen::Index i = 0; i < n; ++i)
                    if (x.values(i) != x.values(p)) col(i) = 0.0;
            },
            cfg.max_rank, cfg.cholesky_tol);
    } else {
        MatrixXd xz(n, z.cols() + 1);
        xz.col(0) = x.values;
        xz.rightCols(z.cols()) = 0.5 * z;
        gx = factor_gaussian_block(xz, cfg);
    }
    MatrixXd gy = factor_column(y, cfg);
    center_rows(gx);
    center_rows(gy);

    const double eps = cfg.ridge_scales_with_n ? cfg.ridge * static_cast<double>(n) : cfg.ridge;
    MatrixXd m = gz.transpose() * gz;
    m.diagonal().array() += eps;
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw SingularSolve("regularized kernel solve failed with ridge " + std::to_string(eps));
    MatrixXd a = gx - gz * llt.solve(gz.transpose() * gx);
    MatrixXd b = gy - gz * llt.solve(gz.transpose() * gy);
    if (!a.allFinite() || !b.allFinite())
        throw SingularSolve("regularized kernel solve produced non-finite values with ridge " + std::to_string(eps));

    double stat = (a.transpose() * b).squaredNorm();
    double p;
    if (cfg.null_mode == NullMode::Permutation) {
        p = permutation_pvalue(a, b, stat, cfg);
    } else {
        VectorXd da = a.rowwise().squaredNorm();
        VectorXd db = b.rowwise().squaredNorm();
        double mean = da.dot(db);
        MatrixXd ka = MatrixXd::Zero(n, n), kb = MatrixXd::Zero(n, n);
        ka.selfadjointView<Eigen::Lower>().rankUpdate(a);
        kb.selfadjointView<Eigen::Lower>().rankUpdate(b);
        double off = 0.0, on = 0.0;
        for (Eigen::Index c = 0; c < n; ++c) {
            on += ka(c, c) * ka(c, c) * kb(c, c) * kb(c, c);
            for (Eigen::Index r = c + 1; r < n; ++r) {
                double t = ka(r, c) * kb(r, c);
                off += t * t;
            }
        }
        double var = 2.0 * (on + 2.0 * off);
        p = gamma_pvalue(stat, mean, var);
    }
    return finish(stat, p, rows.size(), cfg);
}

}  // namespace gisl
