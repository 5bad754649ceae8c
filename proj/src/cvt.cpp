#include <aurora/cvt.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <aurora/tasks/trajectory.hpp>

namespace aurora::cvt {

namespace {
    double squared_distance(const double* a, const double* b, std::size_t d)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double t = a[i] - b[i];
            s += t * t;
        }
        return s;
    }

    constexpr Eigen::Index kQueryBlock = 32;
} // namespace

std::size_t nearest_centroid(const Matrix& centroids, std::span<const double> point)
{
    if (centroids.rows() == 0)
        throw ContractViolation("nearest_centroid: empty centroid set");
    if (point.size() != static_cast<std::size_t>(centroids.cols()))
        throw ContractViolation("nearest_centroid: dimensionality mismatch");
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < centroids.rows(); ++i) {
        const double d2 = squared_distance(centroids.row(i).data(), point.data(), point.size());
        if (d2 < best_d2) {
            best_d2 = d2;
            best = static_cast<std::size_t>(i);
        }
    }
    return best;
}

std::vector<std::size_t> nearest_centroids(const Matrix& centroids, const Eigen::VectorXd& squared_norms, const Matrix& points)
{
    if (centroids.rows() == 0)
        throw ContractViolation("nearest_centroids: empty centroid set");
    if (points.cols() != centroids.cols())
        throw ContractViolation("nearest_centroids: dimensionality mismatch");
    const auto d = static_cast<std::size_t>(points.cols());
    const double max_norm = std::sqrt(squared_norms.maxCoeff());

    std::vector<std::size_t> out(static_cast<std::size_t>(points.rows()));
    Eigen::MatrixXd dots;
    std::vector<Eigen::Index> candidates;
    for (Eigen::Index start = 0; start < points.rows(); start += kQueryBlock) {
        const Eigen::Index len = std::min(kQueryBlock, points.rows() - start);
        dots.noalias() = centroids * points.middleRows(start, len).transpose();
        for (Eigen::Index q = 0; q < len; ++q) {
            const Eigen::Index row = start + q;
            const double xnorm = points.row(row).norm();
            // Bound on the rounding error of |c|^2 - 2 c.x relative to the
            // direct form; 1e-10 leaves several orders of slack for d <= 1e4.
            const double margin = 1e-10 * (max_norm + xnorm) * (max_norm + xnorm) + 1e-300;
            double best_approx = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < centroids.rows(); ++i)
                best_approx = std::min(best_approx, squared_norms[i] - 2.0 * dots(i, q));
            candidates.clear();
            for (Eigen::Index i = 0; i < centroids.rows(); ++i)
                if (squared_norms[i] - 2.0 * dots(i, q) <= best_approx + margin)
                    candidates.push_back(i);
            std::size_t best = 0;
            double best_d2 = std::numeric_limits<double>::infinity();
            for (Eigen::Index i : candidates) {
                const double d2 = squared_distance(centroids.row(i).data(), points.row(row).data(), d);
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = static_cast<std::size_t>(i);
                }
            }
            out[static_cast<std::size_t>(row)] = best;
        }
    }
    return out;
}

namespace {
    double assign(const Matrix& points, const Matrix& centroids, std::vector<std::size_t>& assignment)
    {
        const Eigen::VectorXd norms = centroids.rowwise().squaredNorm();
        assignment = nearest_centroids(centroids, norms, points);
        double inertia = 0.0;
        for (Eigen::Index r = 0; r < points.rows(); ++r)
            inertia += (points.row(r) - centroids.row(static_cast<Eigen::Index>(assignment[static_cast<std::size_t>(r)]))).squaredNorm();
        return inertia;
    }

    Matrix seed_plus_plus(const Matrix& points, std::size_t k, Rng& rng)
    {
        const auto m = static_cast<std::size_t>(points.rows());
        Matrix c(static_cast<Eigen::Index>(k), points.cols());
        std::uniform_int_distribution<std::size_t> pick(0, m - 1);
        c.row(0) = points.row(static_cast<Eigen::Index>(pick(rng)));
        std::vector<double> d2(m);
        for (std::size_t r = 0; r < m; ++r)
            d2[r] = (points.row(static_cast<Eigen::Index>(r)) - c.row(0)).squaredNorm();
        for (std::size_t i = 1; i < k; ++i) {
            double total = 0.0;
            for (double v : d2)
                total += v;
            std::size_t chosen = 0;
            if (total > 0.0) {
                std::uniform_real_distribution<double> u(0.0, total);
                double target = u(rng);
                for (chosen = 0; chosen + 1 < m; ++chosen) {
                    target -= d2[chosen];
                    if (target < 0.0 && d2[chosen] > 0.0)
                        break;
                }
            }
            else {
                chosen = pick(rng);
            }
            c.row(static_cast<Eigen::Index>(i)) = points.row(static_cast<Eigen::Index>(chosen));
            for (std::size_t r = 0; r < m; ++r)
                d2[r] = std::min(d2[r], (points.row(static_cast<Eigen::Index>(r)) - c.row(static_cast<Eigen::Index>(i))).squaredNorm());
        }
        return c;
    }
} // namespace

KMeansResult kmeans(const Matrix& points, std::size_t k, Rng& rng, KMeansOptions opts)
{
    if (points.rows() == 0)
        throw ContractViolation("kmeans: no points");
    if (k == 0)
        throw ContractViolation("kmeans: k must be positive");
    const auto m = static_cast<std::size_t>(points.rows());

    KMeansResult res;
    if (m == k) {
        // k-means++ on exactly k points selects every point once.
        res.centroids = points;
    }
    else if (m < k) {
        res.centroids.resize(static_cast<Eigen::Index>(k), points.cols());
        std::uniform_int_distribution<std::size_t> pick(0, m - 1);
        for (std::size_t i = 0; i < k; ++i)
            res.centroids.row(static_cast<Eigen::Index>(i)) = points.row(static_cast<Eigen::Index>(pick(rng)));
    }
    else {
        res.centroids = seed_plus_plus(points, k, rng);
    }
    res.inertia_history.push_back(assign(points, res.centroids, res.assignment));

    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
        Matrix sums = Matrix::Zero(res.centroids.rows(), res.centroids.cols());
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t r = 0; r < m; ++r) {
            sums.row(static_cast<Eigen::Index>(res.assignment[r])) += points.row(static_cast<Eigen::Index>(r));
            ++counts[res.assignment[r]];
        }
        std::vector<double> residual(m);
        for (std::size_t r = 0; r < m; ++r)
            residual[r] = (points.row(static_cast<Eigen::Index>(r)) - res.centroids.row(static_cast<Eigen::Index>(res.assignment[r]))).squaredNorm();
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                res.centroids.row(static_cast<Eigen::Index>(c)) = sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
            }
            else if (m >= k) {
                const auto far = static_cast<std::size_t>(std::max_element(residual.begin(), residual.end()) - residual.begin());
                res.centroids.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(far));
                residual[far] = 0.0;
            }
        }
        std::vector<std::size_t> previous = res.assignment;
        res.inertia_history.push_back(assign(points, res.centroids, res.assignment));
        res.iterations = it + 1;
        if (previous == res.assignment)
            break;
    }
    return res;
}

CentroidSet build_prior_centroids(const tasks::Task& task, const std::vector<Genotype>& samples, std::size_t k,
                                  std::uint64_t seed, KMeansOptions opts)
{
    if (samples.empty())
        throw ContractViolation("build_prior_centroids: no samples");
    Matrix data(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(kSensoryDim));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Vector s = tasks::sensory_vector(task.simulate(samples[i]));
        for (std::size_t j = 0; j < kSensoryDim; ++j)
            data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s[j];
    }
    Rng rng(seed);
    return {kmeans(data, k, rng, opts).centroids, seed};
}

CentroidSet build_blind_centroids(const Bounds& bounds, std::size_t k, std::uint64_t seed, std::size_t refine_points,
                                  KMeansOptions opts)
{
    if (k == 0 || bounds.empty())
        throw ContractViolation("build_blind_centroids: need k > 0 and non-empty bounds");
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto draw = [&](std::size_t n) {
        Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(bounds.size()));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < bounds.size(); ++j)
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = bounds[j].lower + u(rng) * bounds[j].width();
        return m;
    };
    if (refine_points == 0)
        return {draw(k), seed};
    const Matrix cloud = draw(refine_points);
    return {kmeans(cloud, k, rng, opts).centroids, seed};
}

void save_centroids_csv(const CentroidSet& set, const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write centroid file " + path);
    os << "k,dim,seed\n" << set.k() << ',' << set.dim() << ',' << set.seed << '\n';
    char buf[32];
    for (Eigen::Index r = 0; r < set.centroids.rows(); ++r) {
        for (Eigen::Index c = 0; c < set.centroids.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", set.centroids(r, c));
            os << (c ? "," : "") << buf;
        }
        os << '\n';
    }
}

CentroidSet load_centroids_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot read centroid file " + path);
    std::string line;
    std::getline(is, line);
    if (line != "k,dim,seed")
        throw std::runtime_error("centroid file " + path + ": bad header");
    std::getline(is, line);
    std::size_t k = 0, dim = 0;
    std::uint64_t seed = 0;
    char c1, c2;
    std::istringstream hs(line);
    if (!(hs >> k >> c1 >> dim >> c2 >> seed))
        throw std::runtime_error("centroid file " + path + ": bad header values");
    CentroidSet set{Matrix(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(dim)), seed};
    for (std::size_t r = 0; r < k; ++r) {
        if (!std::getline(is, line))
            throw std::runtime_error("centroid file " + path + ": truncated");
        std::istringstream ls(line);
        std::string cell;
        for (std::size_t c = 0; c < dim; ++c) {
            if (!std::getline(ls, cell, ','))
                throw std::runtime_error("centroid file " + path + ": short row");
            set.centroids(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = std::stod(cell);
        }
    }
    return set;
}

CvtGrid::CvtGrid(std::shared_ptr<const CentroidSet> centroids, bool curiosity_selection)
    : _centroids(std::move(centroids)), _curiosity_selection(curiosity_selection)
{
    if (!_centroids || _centroids->k() == 0)
        throw ContractViolation("CvtGrid: empty centroid set");
    _squared_norms = _centroids->centroids.rowwise().squaredNorm();
    _cell_entry.assign(_centroids->k(), -1);
}

AddResult CvtGrid::place(Individual candidate, std::size_t cell)
{
    const std::int64_t slot = _cell_entry[cell];
    if (slot < 0) {
        _entries.push_back(std::move(candidate));
        _entry_cell.push_back(cell);
        _cell_entry[cell] = static_cast<std::int64_t>(_entries.size() - 1);
        return {AddOutcome::added, _entries.size() - 1, std::nullopt};
    }
    auto idx = static_cast<std::size_t>(slot);
    if (candidate.fitness > _entries[idx].fitness) {
        Individual old = std::exchange(_entries[idx], std::move(candidate));
        return {AddOutcome::replaced, idx, std::move(old)};
    }
    return {AddOutcome::rejected, idx, std::nullopt};
}

AddResult CvtGrid::try_add(Individual candidate)
{
    if (candidate.descriptor.size() != _centroids->dim())
        throw ContractViolation("CvtGrid::try_add: descriptor dimensionality mismatch");
    const std::size_t cell = nearest_centroid(_centroids->centroids, candidate.descriptor);
    return place(std::move(candidate), cell);
}

std::vector<AddResult> CvtGrid::try_add_all(std::vector<Individual> candidates)
{
    Matrix q(static_cast<Eigen::Index>(candidates.size()), static_cast<Eigen::Index>(_centroids->dim()));
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].descriptor.size() != _centroids->dim())
            throw ContractViolation("CvtGrid::try_add: descriptor dimensionality mismatch");
        for (std::size_t j = 0; j < _centroids->dim(); ++j)
            q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = candidates[i].descriptor[j];
    }
    const auto cells = candidates.empty() ? std::vector<std::size_t>{}
                                          : nearest_centroids(_centroids->centroids, _squared_norms, q);
    std::vector<AddResult> results;
    results.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        results.push_back(place(std::move(candidates[i]), cells[i]));
    return results;
}

ParentSampler CvtGrid::sampler(const CuriosityParams& params) const
{
    std::vector<double> w(_entries.size(), 1.0);
    if (_curiosity_selection)
        for (std::size_t i = 0; i < _entries.size(); ++i)
            w[i] = selection_weight(_entries[i], params);
    return ParentSampler(std::move(w));
}

void CvtGrid::reward_parent(std::size_t index, std::uint64_t parent_id, AddOutcome outcome, const CuriosityParams& params)
{
    if (index < _entries.size() && _entries[index].id == parent_id)
        update_curiosity(_entries[index], outcome, params);
}

} // namespace aurora::cvt
