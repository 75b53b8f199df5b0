#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "salodom/geometry.hpp"
#include "salodom/kdtree.hpp"

namespace salodom {

/// Which per-point cues enter the correspondence weight
/// W = exp(s_t * s_{t-1} * c_t * c_{t-1}).
enum class WeightingMode { None, SaliencyOnly, SemanticOnly, Both };

const char* weighting_mode_name(WeightingMode mode);
/// Accepts none, saliency, saliency_only, semantic, semantic_only, both.
WeightingMode parse_weighting_mode(const std::string& name);

struct OdometryConfig {
    /// Balance between the point-to-plane and normal-to-normal terms.
    double lambda = 1.0;
    int max_iterations = 50;
    /// Stop once an accepted update has norm below this.
    double convergence_tol = 1e-9;
    double max_corr_dist = 1.5;
    /// Huber threshold on point-to-plane residuals in meters; 0 gives plain squares.
    double huber_delta = 0.3;
    WeightingMode weighting = WeightingMode::Both;
    /// Drop pairs whose semantic product c_t * c_{t-1} is zero.
    bool hard_mask = false;
    /// Use every n-th source point.
    int source_stride = 1;

    void validate() const;
};

/// A scan prepared for registration: points with unit normals and the two
/// weighting cues. Points without a usable normal are already removed.
struct Frame {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;
    std::vector<double> saliency;  // s_i in [0,1]
    std::vector<double> mask;      // c_i in {0,1}

    std::size_t size() const { return points.size(); }
    void validate() const;
};

/// Keeps pixels with a valid normal. Missing "saliency"/"semantic" planes default to 1.
Frame make_frame(const RangeImage& image, const NormalMap& normals);
/// Same, from a cloud with externally computed normals.
Frame make_frame(const PointCloud& cloud, std::span<const Vec3> normals);
Frame transform_frame(const Frame& frame, const RigidTransform& T);

struct Correspondence {
    std::size_t source = 0;
    std::size_t target = 0;
    Vec3 target_point = Vec3::Zero();
    Vec3 target_normal = Vec3::UnitZ();
    double source_saliency = 1.0;
    double target_saliency = 1.0;
    double source_mask = 1.0;
    double target_mask = 1.0;
};

using Correspondences = std::vector<Correspondence>;

/// Nearest target point for each (strided) source point moved by `T`,
/// gated at `max_dist`. Throws NoCorrespondences when nothing survives.
Correspondences find_correspondences(const Frame& source, const Frame& target, const KdTree& target_tree,
                                     const RigidTransform& T, double max_dist, int source_stride = 1);

/// rho(r) = r^2, or the Huber function with threshold `delta` when delta > 0.
double robust_square(double residual, double delta);

struct PointToPlaneTerms {
    std::vector<double> residuals;  // (p_hat - p) . n
    std::vector<double> per_pair;   // rho(residual)
    double loss = 0.0;              // mean of per_pair
};

/// `transformed_source` is indexed like the source frame.
PointToPlaneTerms point_to_plane_loss(const Correspondences& corr, std::span<const Vec3> transformed_source,
                                      double huber_delta);

struct NormalToNormalTerms {
    std::vector<double> per_pair;  // |n_hat - n|^2
    double loss = 0.0;
};

NormalToNormalTerms normal_to_normal_loss(const Correspondences& corr, std::span<const Vec3> rotated_source_normals);

/// lambda * p2n + n2n.
double combined_loss(double point_to_plane, double normal_to_normal, double lambda);

std::vector<double> compute_weights(const Correspondences& corr, WeightingMode mode);

/// (1/N) sum l_i * W_i.
double weighted_loss(std::span<const double> losses, std::span<const double> weights);

/// Weighted objective lambda * L_p2n + L_n2n, each term weighted per pair.
double weighted_objective(const Correspondences& corr, std::span<const double> weights, const Frame& source,
                          const RigidTransform& T, const OdometryConfig& config);

/// Gradient and Gauss-Newton Hessian of weighted_objective with respect to a
/// left perturbation exp(delta) * T, evaluated at delta = 0. delta = (omega, v).
struct LinearizedObjective {
    Mat6 hessian = Mat6::Zero();
    Vec6 gradient = Vec6::Zero();
    double loss = 0.0;
};

LinearizedObjective linearize_objective(const Correspondences& corr, std::span<const double> weights,
                                        const Frame& source, const RigidTransform& T, const OdometryConfig& config);

struct SolveDiagnostics {
    double final_loss = 0.0;
    int iterations = 0;
    std::size_t pair_count = 0;
    bool converged = false;
    /// Objective after each accepted update, starting with the initial value.
    std::vector<double> loss_history;
};

struct SolveResult {
    RigidTransform transform;
    SolveDiagnostics diagnostics;
};

/// Estimates T_{t-1,t}: the pose mapping `source` (scan t) into the frame of
/// `target` (scan t-1), minimizing the weighted loss with Levenberg-damped
/// Gauss-Newton and re-association every iteration.
SolveResult solve_frame_pair(const Frame& source, const Frame& target, const OdometryConfig& config,
                             const RigidTransform& initial = RigidTransform::identity());

SolveResult solve_frame_pair(const RangeImage& source, const NormalMap& source_normals, const RangeImage& target,
                             const NormalMap& target_normals, const OdometryConfig& config,
                             const RigidTransform& initial = RigidTransform::identity());

/// Levenberg-Marquardt on fixed correspondences.
SolveResult refine_fixed_correspondences(const Correspondences& corr, const Frame& source,
                                         const OdometryConfig& config, const RigidTransform& initial);

struct Trajectory {
    /// T_world_from_frame, one per scan.
    std::vector<RigidTransform> poses;

    std::size_t size() const { return poses.size(); }
};

Trajectory accumulate_trajectory(std::span<const RigidTransform> relative);

/// Relative motions for a sequence of frames. With constant-velocity
/// initialization each pair starts from the previous estimate; otherwise the
/// pairs are independent and may run on `threads` workers.
struct SequenceResult {
    std::vector<RigidTransform> relative;
    std::vector<SolveDiagnostics> diagnostics;
};

SequenceResult run_sequence(std::span<const Frame> frames, const OdometryConfig& config, bool constant_velocity,
                            unsigned threads = 1);

}  // namespace salodom
