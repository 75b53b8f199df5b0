#include "salodom/odometry.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "salodom/error.hpp"

namespace salodom {

namespace {

constexpr double kMaxConditionNumber = 1e12;
constexpr int kMaxDampingAttempts = 12;
constexpr std::size_t kMinPairs = 6;

double channel_or_one(const ChannelMap& channels, const char* name, std::size_t k) {
    const auto it = channels.find(name);
    return it == channels.end() ? 1.0 : it->second[k];
}

bool in_unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

const char* weighting_mode_name(WeightingMode mode) {
    switch (mode) {
        case WeightingMode::None:
            return "none";
        case WeightingMode::SaliencyOnly:
            return "saliency";
        case WeightingMode::SemanticOnly:
            return "semantic";
        case WeightingMode::Both:
            return "both";
    }
    return "none";
}

WeightingMode parse_weighting_mode(const std::string& name) {
    if (name == "none") return WeightingMode::None;
    if (name == "saliency" || name == "saliency_only") return WeightingMode::SaliencyOnly;
    if (name == "semantic" || name == "semantic_only") return WeightingMode::SemanticOnly;
    if (name == "both") return WeightingMode::Both;
    fail(ErrorCode::InvalidArgument, "unknown weighting mode '" + name + "'");
}

void OdometryConfig::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorCode::InvalidArgument, "lambda must be positive");
    if (!(max_corr_dist > 0.0)) fail(ErrorCode::InvalidArgument, "max_corr_dist must be positive");
    if (max_iterations < 1) fail(ErrorCode::InvalidArgument, "max_iterations must be at least 1");
    if (!(convergence_tol >= 0.0)) fail(ErrorCode::InvalidArgument, "convergence_tol must be non-negative");
    if (!(huber_delta >= 0.0)) fail(ErrorCode::InvalidArgument, "huber_delta must be non-negative");
    if (source_stride < 1) fail(ErrorCode::InvalidArgument, "source_stride must be at least 1");
}

// ---------------------------------------------------------------------------
// Frames

void Frame::validate() const {
    const std::size_t n = points.size();
    if (normals.size() != n || saliency.size() != n || mask.size() != n) {
        fail(ErrorCode::InvalidArgument, "frame channels have inconsistent lengths");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!points[i].allFinite()) fail(ErrorCode::InvalidArgument, "invalid point at index " + std::to_string(i));
        if (std::abs(normals[i].norm() - 1.0) > 1e-6) {
            fail(ErrorCode::InvalidArgument, "normal at index " + std::to_string(i) + " is not unit length");
        }
        if (!in_unit_interval(saliency[i]) || !in_unit_interval(mask[i])) {
            fail(ErrorCode::InvalidArgument, "saliency/mask value outside [0,1] at index " + std::to_string(i));
        }
    }
}

Frame make_frame(const RangeImage& image, const NormalMap& normals) {
    if (normals.height != image.height || normals.width != image.width) {
        fail(ErrorCode::InvalidArgument, "normal map does not match range image dimensions");
    }
    Frame f;
    for (std::size_t k = 0; k < image.pixel_count(); ++k) {
        if (!image.valid[k] || !normals.valid[k]) continue;
        f.points.push_back(image.xyz[k]);
        f.normals.push_back(normals.normals[k]);
        f.saliency.push_back(channel_or_one(image.channels, kSaliencyChannel, k));
        f.mask.push_back(channel_or_one(image.channels, kSemanticChannel, k));
    }
    f.validate();
    return f;
}

Frame make_frame(const PointCloud& cloud, std::span<const Vec3> normals) {
    cloud.validate();
    if (normals.size() != cloud.size()) fail(ErrorCode::InvalidArgument, "normal count does not match point count");
    Frame f;
    f.points = cloud.positions;
    f.normals.assign(normals.begin(), normals.end());
    f.saliency.resize(cloud.size());
    f.mask.resize(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        f.saliency[i] = channel_or_one(cloud.channels, kSaliencyChannel, i);
        f.mask[i] = channel_or_one(cloud.channels, kSemanticChannel, i);
    }
    f.validate();
    return f;
}

Frame transform_frame(const Frame& frame, const RigidTransform& T) {
    Frame out = frame;
    const Mat3 R = T.rotation();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.points[i] = R * out.points[i] + T.translation();
        out.normals[i] = R * out.normals[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Association and loss terms

Correspondences find_correspondences(const Frame& source, const Frame& target, const KdTree& target_tree,
                                     const RigidTransform& T, double max_dist, int source_stride) {
    if (source.size() == 0 || target.size() == 0) fail(ErrorCode::InvalidArgument, "empty input");
    if (target_tree.size() != target.size()) fail(ErrorCode::InvalidArgument, "kd-tree does not index the target");
    const std::size_t stride = static_cast<std::size_t>(std::max(1, source_stride));
    const double max_d2 = max_dist * max_dist;
    const Mat3 R = T.rotation();

    Correspondences out;
    out.reserve(source.size() / stride + 1);
    for (std::size_t i = 0; i < source.size(); i += stride) {
        const Vec3 p = R * source.points[i] + T.translation();
        const KdTree::Neighbor nn = target_tree.nearest(p);
        if (!nn.found() || nn.squared_distance > max_d2) continue;
        Correspondence c;
        c.source = i;
        c.target = nn.index;
        c.target_point = target.points[nn.index];
        c.target_normal = target.normals[nn.index];
        c.source_saliency = source.saliency[i];
        c.target_saliency = target.saliency[nn.index];
        c.source_mask = source.mask[i];
        c.target_mask = target.mask[nn.index];
        out.push_back(c);
    }
    if (out.empty()) fail(ErrorCode::NoCorrespondences, "no correspondences");
    return out;
}

double robust_square(double residual, double delta) {
    const double a = std::abs(residual);
    if (delta > 0.0 && a > delta) return 2.0 * delta * a - delta * delta;
    return residual * residual;
}

namespace {

// d rho / d r
double robust_derivative(double residual, double delta) {
    if (delta > 0.0 && std::abs(residual) > delta) return residual > 0.0 ? 2.0 * delta : -2.0 * delta;
    return 2.0 * residual;
}

// Gauss-Newton curvature weight of rho, relative to a plain square.
double robust_irls_weight(double residual, double delta) {
    const double a = std::abs(residual);
    if (delta > 0.0 && a > delta) return delta / a;
    return 1.0;
}

double mean_of(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace

PointToPlaneTerms point_to_plane_loss(const Correspondences& corr, std::span<const Vec3> transformed_source,
                                      double huber_delta) {
    if (corr.empty()) fail(ErrorCode::NoCorrespondences, "no correspondences");
    PointToPlaneTerms out;
    out.residuals.resize(corr.size());
    out.per_pair.resize(corr.size());
    for (std::size_t k = 0; k < corr.size(); ++k) {
        const Correspondence& c = corr[k];
        const double r = (transformed_source[c.source] - c.target_point).dot(c.target_normal);
        out.residuals[k] = r;
        out.per_pair[k] = robust_square(r, huber_delta);
    }
    out.loss = mean_of(out.per_pair);
    return out;
}

NormalToNormalTerms normal_to_normal_loss(const Correspondences& corr, std::span<const Vec3> rotated_source_normals) {
    if (corr.empty()) fail(ErrorCode::NoCorrespondences, "no correspondences");
    NormalToNormalTerms out;
    out.per_pair.resize(corr.size());
    for (std::size_t k = 0; k < corr.size(); ++k) {
        out.per_pair[k] = (rotated_source_normals[corr[k].source] - corr[k].target_normal).squaredNorm();
    }
    out.loss = mean_of(out.per_pair);
    return out;
}

double combined_loss(double point_to_plane, double normal_to_normal, double lambda) {
    if (!(lambda > 0.0)) fail(ErrorCode::InvalidArgument, "lambda must be positive");
    return lambda * point_to_plane + normal_to_normal;
}

std::vector<double> compute_weights(const Correspondences& corr, WeightingMode mode) {
    std::vector<double> w(corr.size(), 1.0);
    if (mode == WeightingMode::None) return w;
    for (std::size_t k = 0; k < corr.size(); ++k) {
        const Correspondence& c = corr[k];
        if (!in_unit_interval(c.source_saliency) || !in_unit_interval(c.target_saliency) ||
            !in_unit_interval(c.source_mask) || !in_unit_interval(c.target_mask)) {
            fail(ErrorCode::InvalidArgument, "correspondence channel value outside [0,1] at pair " + std::to_string(k));
        }
        double exponent = 1.0;
        if (mode == WeightingMode::SaliencyOnly || mode == WeightingMode::Both) {
            exponent *= c.source_saliency * c.target_saliency;
        }
        if (mode == WeightingMode::SemanticOnly || mode == WeightingMode::Both) {
            exponent *= c.source_mask * c.target_mask;
        }
        w[k] = std::exp(exponent);
    }
    return w;
}

double weighted_loss(std::span<const double> losses, std::span<const double> weights) {
    if (losses.size() != weights.size()) fail(ErrorCode::InvalidArgument, "loss and weight counts differ");
    if (losses.empty()) fail(ErrorCode::NoCorrespondences, "no correspondences");
    double sum = 0.0;
    for (std::size_t k = 0; k < losses.size(); ++k) sum += losses[k] * weights[k];
    return sum / static_cast<double>(losses.size());
}

double weighted_objective(const Correspondences& corr, std::span<const double> weights, const Frame& source,
                          const RigidTransform& T, const OdometryConfig& config) {
    if (corr.empty()) fail(ErrorCode::NoCorrespondences, "no correspondences");
    const Mat3 R = T.rotation();
    std::vector<double> p2n(corr.size());
    std::vector<double> n2n(corr.size());
    for (std::size_t k = 0; k < corr.size(); ++k) {
        const Correspondence& c = corr[k];
        const Vec3 p = R * source.points[c.source] + T.translation();
        const Vec3 n = R * source.normals[c.source];
        p2n[k] = robust_square((p - c.target_point).dot(c.target_normal), config.huber_delta);
        n2n[k] = (n - c.target_normal).squaredNorm();
    }
    return config.lambda * weighted_loss(p2n, weights) + weighted_loss(n2n, weights);
}

LinearizedObjective linearize_objective(const Correspondences& corr, std::span<const double> weights,
                                        const Frame& source, const RigidTransform& T, const OdometryConfig& config) {
    if (corr.empty()) fail(ErrorCode::NoCorrespondences, "no correspondences");
    if (weights.size() != corr.size()) fail(ErrorCode::InvalidArgument, "weight count does not match pairs");
    const Mat3 R = T.rotation();
    const double inv_n = 1.0 / static_cast<double>(corr.size());

    LinearizedObjective out;
    double p2n_sum = 0.0;
    double n2n_sum = 0.0;
    for (std::size_t k = 0; k < corr.size(); ++k) {
        const Correspondence& c = corr[k];
        const double w = weights[k];
        const Vec3 p = R * source.points[c.source] + T.translation();
        const Vec3 n = R * source.normals[c.source];

        // Point-to-plane: d r / d delta = [p x n_t ; n_t].
        const double r = (p - c.target_point).dot(c.target_normal);
        Vec6 J;
        J.head<3>() = p.cross(c.target_normal);
        J.tail<3>() = c.target_normal;
        const double scale = config.lambda * w * inv_n;
        out.gradient += scale * robust_derivative(r, config.huber_delta) * J;
        out.hessian += (2.0 * scale * robust_irls_weight(r, config.huber_delta)) * (J * J.transpose());
        p2n_sum += robust_square(r, config.huber_delta) * w;

        // Normal-to-normal: d n_hat / d omega = -[n_hat]x.
        const Vec3 e = n - c.target_normal;
        const Mat3 Jn = -skew(n);
        out.gradient.head<3>() += (2.0 * w * inv_n) * (Jn.transpose() * e);
        out.hessian.topLeftCorner<3, 3>() += (2.0 * w * inv_n) * (Jn.transpose() * Jn);
        n2n_sum += e.squaredNorm() * w;
    }
    const auto n = static_cast<double>(corr.size());
    out.loss = config.lambda * (p2n_sum / n) + n2n_sum / n;
    return out;
}

// ---------------------------------------------------------------------------
// Solver

namespace {

Correspondences apply_hard_mask(Correspondences corr) {
    std::erase_if(corr, [](const Correspondence& c) { return c.source_mask * c.target_mask == 0.0; });
    return corr;
}

void check_conditioning(const Mat6& H) {
    const Eigen::SelfAdjointEigenSolver<Mat6> eig(H, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxConditionNumber) fail(ErrorCode::Degenerate, "degenerate geometry");
}

struct StepOutcome {
    bool accepted = false;
    RigidTransform transform;
    double loss = 0.0;
    double step_norm = 0.0;
};

// One damped Gauss-Newton update. `damping` is relative to the mean diagonal
// of the Hessian; x10 after a rejected trial, /10 after an accepted one.
StepOutcome levenberg_step(const Correspondences& corr, std::span<const double> weights, const Frame& source,
                           const RigidTransform& T, const LinearizedObjective& lin, const OdometryConfig& config,
                           double& damping) {
    const double scale = std::max(lin.hessian.trace() / 6.0, std::numeric_limits<double>::min());
    StepOutcome out;
    for (int attempt = 0; attempt < kMaxDampingAttempts; ++attempt) {
        const Mat6 A = lin.hessian + (damping * scale) * Mat6::Identity();
        const Vec6 delta = A.ldlt().solve(-lin.gradient);
        if (!delta.allFinite()) fail(ErrorCode::Numeric, "non-finite pose update");
        const RigidTransform candidate = se3_exp(delta) * T;
        const double loss = weighted_objective(corr, weights, source, candidate, config);
        if (loss <= lin.loss) {
            damping = std::max(damping / 10.0, 1e-12);
            out.accepted = true;
            out.transform = candidate;
            out.loss = loss;
            out.step_norm = delta.norm();
            return out;
        }
        damping = std::min(damping * 10.0, 1e12);
    }
    return out;
}

constexpr double kInitialDamping = 1e-6;

}  // namespace

SolveResult solve_frame_pair(const Frame& source, const Frame& target, const OdometryConfig& config,
                             const RigidTransform& initial) {
    config.validate();
    if (source.size() == 0 || target.size() == 0) fail(ErrorCode::InvalidArgument, "empty input");
    const KdTree tree(target.points);

    SolveResult result;
    result.transform = initial;
    double damping = kInitialDamping;
    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        Correspondences corr = find_correspondences(source, target, tree, result.transform, config.max_corr_dist,
                                                    config.source_stride);
        if (config.hard_mask) corr = apply_hard_mask(std::move(corr));
        if (corr.size() < kMinPairs) {
            fail(ErrorCode::NoCorrespondences, "no correspondences (" + std::to_string(corr.size()) + " pairs)");
        }
        const std::vector<double> weights = compute_weights(corr, config.weighting);
        const LinearizedObjective lin = linearize_objective(corr, weights, source, result.transform, config);
        check_conditioning(lin.hessian);
        if (iter == 1) result.diagnostics.loss_history.push_back(lin.loss);

        result.diagnostics.iterations = iter;
        result.diagnostics.pair_count = corr.size();
        result.diagnostics.final_loss = lin.loss;

        const StepOutcome step = levenberg_step(corr, weights, source, result.transform, lin, config, damping);
        if (!step.accepted) {
            result.diagnostics.converged = true;
            break;
        }
        result.transform = step.transform;
        result.diagnostics.final_loss = step.loss;
        result.diagnostics.loss_history.push_back(step.loss);
        if (step.step_norm < config.convergence_tol) {
            result.diagnostics.converged = true;
            break;
        }
    }
    if (!std::isfinite(result.diagnostics.final_loss)) fail(ErrorCode::Numeric, "solver diverged (non-finite loss)");
    return result;
}

SolveResult solve_frame_pair(const RangeImage& source, const NormalMap& source_normals, const RangeImage& target,
                             const NormalMap& target_normals, const OdometryConfig& config,
                             const RigidTransform& initial) {
    return solve_frame_pair(make_frame(source, source_normals), make_frame(target, target_normals), config, initial);
}

SolveResult refine_fixed_correspondences(const Correspondences& input, const Frame& source,
                                         const OdometryConfig& config, const RigidTransform& initial) {
    config.validate();
    const Correspondences corr = config.hard_mask ? apply_hard_mask(input) : input;
    if (corr.size() < kMinPairs) fail(ErrorCode::NoCorrespondences, "no correspondences");
    const std::vector<double> weights = compute_weights(corr, config.weighting);

    SolveResult result;
    result.transform = initial;
    result.diagnostics.pair_count = corr.size();
    double damping = kInitialDamping;
    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        const LinearizedObjective lin = linearize_objective(corr, weights, source, result.transform, config);
        check_conditioning(lin.hessian);
        if (iter == 1) result.diagnostics.loss_history.push_back(lin.loss);
        result.diagnostics.iterations = iter;
        result.diagnostics.final_loss = lin.loss;

        const StepOutcome step = levenberg_step(corr, weights, source, result.transform, lin, config, damping);
        if (!step.accepted) {
            result.diagnostics.converged = true;
            break;
        }
        result.transform = step.transform;
        result.diagnostics.final_loss = step.loss;
        result.diagnostics.loss_history.push_back(step.loss);
        if (step.step_norm < config.convergence_tol) {
            result.diagnostics.converged = true;
            break;
        }
    }
    return result;
}

Trajectory accumulate_trajectory(std::span<const RigidTransform> relative) {
    Trajectory traj;
    traj.poses.reserve(relative.size() + 1);
    traj.poses.push_back(RigidTransform::identity());
    for (const auto& rel : relative) traj.poses.push_back(traj.poses.back() * rel);
    return traj;
}

SequenceResult run_sequence(std::span<const Frame> frames, const OdometryConfig& config, bool constant_velocity,
                            unsigned threads) {
    config.validate();
    SequenceResult out;
    if (frames.size() < 2) return out;
    const std::size_t pairs = frames.size() - 1;
    out.relative.resize(pairs);
    out.diagnostics.resize(pairs);

    auto solve_pair = [&](std::size_t k, const RigidTransform& init) {
        try {
            SolveResult r = solve_frame_pair(frames[k + 1], frames[k], config, init);
            out.relative[k] = r.transform;
            out.diagnostics[k] = std::move(r.diagnostics);
        } catch (const Error& e) {
            throw Error(e.code(), "frame " + std::to_string(k + 1) + ": " + e.what());
        }
    };

    if (constant_velocity) {
        RigidTransform init = RigidTransform::identity();
        for (std::size_t k = 0; k < pairs; ++k) {
            solve_pair(k, init);
            init = out.relative[k];
        }
        return out;
    }

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(pairs)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::size_t first_error_pair = pairs;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t k = next++; k < pairs; k = next++) {
            try {
                solve_pair(k, RigidTransform::identity());
            } catch (...) {
                // Report the lowest failing frame so the diagnostic does not depend on scheduling.
                std::lock_guard lock(error_mutex);
                if (k < first_error_pair) {
                    first_error_pair = k;
                    first_error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

}  // namespace salodom
