#include "meshcrit/eigensolve.hpp"

#include "meshcrit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace meshcrit {

namespace {

constexpr std::size_t kChunk = 4096;

using Vec = std::vector<double>;

double norm(std::span<const double> a) { return std::sqrt(reproducible_dot(a, a)); }

void scale(Vec& a, double s)
{
    const std::size_t n = a.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i)
        a[i] *= s;
}

bool all_finite(std::span<const double> a)
{
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

} // namespace

double reproducible_dot(std::span<const double> a, std::span<const double> b)
{
    const std::size_t n = a.size();
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(n, lo + kChunk);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            s += a[i] * b[i];
        partial[c] = s;
    }
    double total = 0.0;
    for (double s : partial)
        total += s;
    return total;
}

namespace {

using Mat = Eigen::MatrixXd;

std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

// a^T b summed over fixed row chunks in chunk order.
Mat gram(const Mat& a, const Mat& b)
{
    const std::size_t n = static_cast<std::size_t>(a.rows());
    const std::size_t chunks = chunk_count(n);
    std::vector<Mat> partial(chunks);
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < chunks; ++c) {
        const auto lo = static_cast<Eigen::Index>(c * kChunk);
        const auto len = static_cast<Eigen::Index>(std::min(n, (c + 1) * kChunk)) - lo;
        partial[c].noalias() = a.middleRows(lo, len).transpose() * b.middleRows(lo, len);
    }
    Mat total = Mat::Zero(a.cols(), b.cols());
    for (const auto& p : partial)
        total += p;
    return total;
}

// out = a * c, row chunks in parallel.
Mat times(const Mat& a, const Mat& c)
{
    const std::size_t n = static_cast<std::size_t>(a.rows());
    const std::size_t chunks = chunk_count(n);
    Mat out(a.rows(), c.cols());
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < chunks; ++k) {
        const auto lo = static_cast<Eigen::Index>(k * kChunk);
        const auto len = static_cast<Eigen::Index>(std::min(n, (k + 1) * kChunk)) - lo;
        out.middleRows(lo, len).noalias() = a.middleRows(lo, len) * c;
    }
    return out;
}

// a -= b * c
void subtract_times(Mat& a, const Mat& b, const Mat& c)
{
    const std::size_t n = static_cast<std::size_t>(a.rows());
    const std::size_t chunks = chunk_count(n);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < chunks; ++k) {
        const auto lo = static_cast<Eigen::Index>(k * kChunk);
        const auto len = static_cast<Eigen::Index>(std::min(n, (k + 1) * kChunk)) - lo;
        a.middleRows(lo, len).noalias() -= b.middleRows(lo, len) * c;
    }
}

Mat hcat(const std::vector<const Mat*>& parts)
{
    Eigen::Index cols = 0;
    for (const Mat* p : parts)
        cols += p->cols();
    Mat out(parts.front()->rows(), cols);
    Eigen::Index at = 0;
    for (const Mat* p : parts) {
        out.middleCols(at, p->cols()) = *p;
        at += p->cols();
    }
    return out;
}

// Removes the span of orthonormal q from v (two passes); hv follows when given.
void orthogonalize(const Mat& q, const Mat* hq, Mat& v, Mat* hv)
{
    if (q.cols() == 0 || v.cols() == 0)
        return;
    for (int pass = 0; pass < 2; ++pass) {
        const Mat c = gram(q, v);
        subtract_times(v, q, c);
        if (hv)
            subtract_times(*hv, *hq, c);
    }
}

// Orthonormalizes the columns of v through the eigendecomposition of their
// scaled Gram matrix, dropping directions whose relative weight is below
// `drop`. Two sweeps restore orthogonality to working precision.
void orthonormalize(Mat& v, Mat* hv, double drop)
{
    for (int sweep = 0; sweep < 2 && v.cols() > 0; ++sweep) {
        const Mat m = gram(v, v);
        Eigen::VectorXd d = m.diagonal();
        for (Eigen::Index i = 0; i < d.size(); ++i)
            d(i) = d(i) > 0.0 ? 1.0 / std::sqrt(d(i)) : 0.0;
        const Mat scaled = d.asDiagonal() * m * d.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Mat> es(scaled);
        if (es.info() != Eigen::Success)
            throw NumericError("lowest_eigenpair: orthonormalization failed");
        const double top = es.eigenvalues().maxCoeff();
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i)
            if (es.eigenvalues()(i) > (sweep == 0 ? drop : 1e-14) * top)
                keep.push_back(i);
        Mat t(v.cols(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j)
            t.col(static_cast<Eigen::Index>(j)) =
                d.asDiagonal() * es.eigenvectors().col(keep[j]) / std::sqrt(es.eigenvalues()(keep[j]));
        v = times(v, t);
        if (hv)
            *hv = times(*hv, t);
    }
}

} // namespace

EigenResult lowest_eigenpair(const OperatorView& op, std::span<const double> init, const EigenOptions& options)
{
    const std::size_t n = op.dim;
    if (n == 0 || init.size() != n || op.diagonal.size() != n || !op.apply)
        throw std::invalid_argument("lowest_eigenpair: inconsistent operator or initial vector");
    if (!(options.tol >= 1e-14))
        throw std::invalid_argument("lowest_eigenpair: tol must be >= 1e-14");
    if (options.maxiter < 1)
        throw std::invalid_argument("lowest_eigenpair: maxiter must be >= 1");
    if (options.block_size < 1 || options.fallback_block_size < 1)
        throw std::invalid_argument("lowest_eigenpair: block sizes must be >= 1");
    if (options.refresh_interval < 1)
        throw std::invalid_argument("lowest_eigenpair: refresh_interval must be >= 1");

    const auto rows = static_cast<Eigen::Index>(n);
    auto project = [&](Mat& v) {
        if (op.project)
            for (Eigen::Index j = 0; j < v.cols(); ++j)
                op.project(std::span<double>(v.col(j).data(), n));
    };
    auto apply = [&](const Mat& v) {
        Mat out(rows, v.cols());
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            op.apply(std::span<const double>(v.col(j).data(), n), std::span<double>(out.col(j).data(), n));
            if (!all_finite(std::span<const double>(out.col(j).data(), n)))
                throw NumericError("lowest_eigenpair: operator produced a non-finite value");
        }
        return out;
    };
    auto column = [&](const Mat& v, Eigen::Index j) { return std::span<const double>(v.col(j).data(), n); };

    Mat start(rows, 1);
    std::copy(init.begin(), init.end(), start.data());
    project(start);
    {
        const double fn = norm(column(start, 0));
        if (!(fn > 0.0) || !std::isfinite(fn))
            throw NumericError("lowest_eigenpair: initial vector has zero or non-finite norm");
        start /= fn;
    }

    EigenResult result;
    {
        const Mat hs = apply(start);
        result.initial_rayleigh = reproducible_dot(column(start, 0), column(hs, 0));
    }
    if (n == 1) {
        result.energy = result.initial_rayleigh;
        result.vector = StateVector(1, 1, 1, start(0, 0));
        result.iterations = 1;
        result.converged = true;
        return result;
    }

    struct Stage {
        int iterations = 0;
        bool converged = false;
        bool stalled = false;
    };

    // One LOBPCG run from `start` with block size m and the given budget.
    // With `watch` set it gives up early once the observed residual decay
    // predicts that the budget will not suffice.
    auto run_stage = [&](std::size_t want, int budget, bool watch) {
        Stage st;
        Mat x(rows, static_cast<Eigen::Index>(want));
        x.col(0) = start.col(0);
        std::mt19937_64 rng(20240611);
        std::uniform_real_distribution<double> jitter(-1.0, 1.0);
        const double spread = 1e-3 / std::sqrt(static_cast<double>(n));
        for (Eigen::Index j = 1; j < x.cols(); ++j)
            for (Eigen::Index i = 0; i < rows; ++i)
                x(i, j) = start(i, 0) * (1.0 + jitter(rng)) + spread * jitter(rng);
        project(x);
        if (x.cols() > 1) {
            Mat rest = x.rightCols(x.cols() - 1);
            const Mat head = x.leftCols(1);
            orthogonalize(head, nullptr, rest, nullptr);
            orthonormalize(rest, nullptr, 1e-12);
            x = hcat({&head, &rest});
        }
        const Eigen::Index m = x.cols();
        Mat hx = apply(x), p(rows, 0), hp(rows, 0);
        Eigen::VectorXd theta(m);

        // Rayleigh-Ritz on orthonormal s; keeps the lowest m Ritz vectors and
        // returns the part built from the columns past the current block.
        auto rayleigh_ritz = [&](const Mat& s, const Mat& hs, bool keep_tail) {
            Mat a = gram(s, hs);
            a = 0.5 * (a + a.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Mat> es(a);
            if (es.info() != Eigen::Success || !es.eigenvalues().allFinite())
                throw NumericError("lowest_eigenpair: Rayleigh-Ritz step failed");
            const Mat c = es.eigenvectors().leftCols(m);
            theta = es.eigenvalues().head(m);
            x = times(s, c);
            hx = times(hs, c);
            if (keep_tail && s.cols() > m) {
                const Eigen::Index tail = s.cols() - m;
                p = times(s.rightCols(tail), c.bottomRows(tail));
                hp = times(hs.rightCols(tail), c.bottomRows(tail));
            }
        };

        rayleigh_ritz(x, hx, false);
        double theta_prev = std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        double best_at_checkpoint = best;
        constexpr int kWindow = 250;
        Vec r(n);

        for (int it = 1; it <= budget; ++it) {
            st.iterations = it;
            if (it % options.refresh_interval == 0) {
                project(x);
                orthonormalize(x, nullptr, 1e-12);
                if (x.cols() != m)
                    throw NumericError("lowest_eigenpair: iteration block lost rank");
                hx = apply(x);
                rayleigh_ritz(x, hx, false);
                if (p.cols() > 0) {
                    project(p);
                    hp = apply(p);
                }
            }

            const double th = theta(0);
#pragma omp parallel for schedule(static)
            for (std::size_t i = 0; i < n; ++i)
                r[i] = hx(static_cast<Eigen::Index>(i), 0) - th * x(static_cast<Eigen::Index>(i), 0);
            const double res = norm(r);
            const double bound = options.tol * std::max(1.0, std::abs(th));
            if (res <= bound && std::abs(th - theta_prev) <= 0.1 * options.tol * std::abs(th)) {
                st.converged = true;
                break;
            }
            theta_prev = th;
            best = std::min(best, res);
            if (it % kWindow == 0) {
                if (watch && it >= 2 * kWindow) {
                    const double rate = (std::log(best) - std::log(best_at_checkpoint)) / kWindow;
                    const double needed = rate < 0.0 ? (std::log(bound) - std::log(best)) / rate
                                                     : std::numeric_limits<double>::infinity();
                    if (needed > budget - it) {
                        st.stalled = true;
                        break;
                    }
                }
                best_at_checkpoint = best;
            }

            Mat w(rows, m);
            for (Eigen::Index j = 0; j < m; ++j) {
                const double tj = theta(j);
                const double floor = 0.1 * std::max(1.0, std::abs(tj));
#pragma omp parallel for schedule(static)
                for (std::size_t i = 0; i < n; ++i) {
                    const auto ii = static_cast<Eigen::Index>(i);
                    w(ii, j) = (hx(ii, j) - tj * x(ii, j)) / std::max(op.diagonal[i] - tj, floor);
                }
            }
            project(w);
            orthogonalize(x, nullptr, w, nullptr);
            orthonormalize(w, nullptr, 1e-12);
            if (w.cols() == 0)
                break;
            const Mat hw = apply(w);
            if (p.cols() > 0) {
                const Mat xw = hcat({&x, &w}), hxw = hcat({&hx, &hw});
                orthogonalize(xw, &hxw, p, &hp);
                orthonormalize(p, &hp, 1e-12);
            }
            rayleigh_ritz(hcat({&x, &w, &p}), hcat({&hx, &hw, &hp}), true);
        }
        start = x.leftCols(1);
        return st;
    };

    const std::size_t first_block = std::min<std::size_t>(static_cast<std::size_t>(options.block_size), n);
    const std::size_t second_block = std::min<std::size_t>(static_cast<std::size_t>(options.fallback_block_size), n);
    const bool can_widen = second_block > first_block;
    Stage st = run_stage(first_block, options.maxiter, can_widen);
    int used = st.iterations;
    if (st.stalled && used < options.maxiter) {
        st = run_stage(second_block, options.maxiter - used, false);
        used += st.iterations;
    }

    // Final answer from scratch.
    Vec xf(start.data(), start.data() + n);
    if (op.project)
        op.project(xf);
    scale(xf, 1.0 / norm(xf));
    Vec hxf(n);
    op.apply(xf, hxf);
    if (!all_finite(hxf))
        throw NumericError("lowest_eigenpair: operator produced a non-finite value");
    double e = reproducible_dot(xf, hxf);
    Vec r(n);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i)
        r[i] = hxf[i] - e * xf[i];
    const double res = norm(r);
    if (op.rayleigh)
        e = op.rayleigh(xf);

    result.energy = e;
    result.vector = StateVector(static_cast<int>(n), 1, 1);
    result.vector.values = std::move(xf);
    result.residual = res;
    result.iterations = std::min(used, options.maxiter);
    result.converged = st.converged && res <= options.tol * std::max(1.0, std::abs(e));
    return result;
}

StateVector cold_start_vector(const PerimetricGrid& grid)
{
    const auto& s = grid.spec();
    StateVector v(s);
    for (int p = 0; p < s.nx; ++p)
        for (int q = 0; q < s.ny; ++q)
            for (int r = 0; r < s.nz; ++r)
                v(p, q, r) = std::exp(-(grid.x()[p] + grid.y()[q] + grid.z()[r]) / 4.0);
    return v;
}

EigenResult lowest_eigenpair(const HamiltonianOperator& h, const StateVector* init, const EigenOptions& options)
{
    const auto& s = h.spec();
    StateVector start = init ? *init : cold_start_vector(h.grid());
    if (start.size() != h.dim())
        throw std::invalid_argument("lowest_eigenpair: initial vector does not match the mesh");
    start.nx = s.nx;
    start.ny = s.ny;
    start.nz = s.nz;

    OperatorView view;
    view.dim = h.dim();
    view.apply = [&h](std::span<const double> v, std::span<double> out) { h.apply(v, out); };
    view.diagonal = h.diagonal();
    view.rayleigh = [&h](std::span<const double> v) { return h.rayleigh_quotient(v); };
    if (h.options().exchange_symmetric)
        view.project = [&s](std::span<double> v) { exchange_project_inplace(v, s.nx, s.ny, s.nz); };

    EigenResult result = lowest_eigenpair(view, start.values, options);
    result.vector.nx = s.nx;
    result.vector.ny = s.ny;
    result.vector.nz = s.nz;
    return result;
}

DensePair dense_lowest_pair(const Eigen::MatrixXd& m)
{
    if (m.rows() != m.cols() || m.rows() == 0)
        throw std::invalid_argument("dense_lowest: matrix must be square and non-empty");
    if (static_cast<std::size_t>(m.rows()) > kDenseLimit)
        throw ResourceError("dense_lowest: dimension " + std::to_string(m.rows()) + " exceeds the limit of " +
                            std::to_string(kDenseLimit));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success)
        throw NumericError("dense_lowest: eigensolver failed");
    return {solver.eigenvalues()(0), solver.eigenvectors().col(0)};
}

double dense_lowest(const Eigen::MatrixXd& m) { return dense_lowest_pair(m).value; }

} // namespace meshcrit
